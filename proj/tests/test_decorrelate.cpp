#include <doctest.h>

#include <cmath>
#include <vector>

#include "fairprobe/decorrelate.hpp"
#include "fairprobe/rng.hpp"
#include "fairprobe/stats.hpp"

using namespace fairprobe;

namespace {

AnnotationTable table_from_columns(const std::vector<std::string>& names,
                                   const std::vector<std::vector<int>>& columns) {
  AnnotationTable t;
  t.attribute_names = names;
  const std::size_t n = columns.front().size();
  for (std::size_t r = 0; r < n; ++r) {
    t.template_ids.push_back(r);
    t.identity.push_back(std::uint32_t(r));
    t.identity_names.push_back("i" + std::to_string(r));
    t.gender.push_back(r % 2 == 0 ? Gender::Male : Gender::Female);
    for (const auto& col : columns) t.labels.push_back(Label(col[r]));
  }
  t.finalize();
  return t;
}

// Textbook two-pass Pearson: subtract means, then normalized dot product.
double pearson_oracle(const std::vector<int>& x, const std::vector<int>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Ternary latent-Gaussian sampler used for the known-block scenarios.
AnnotationTable latent_table(std::size_t n, const std::vector<std::vector<double>>& loads,
                             std::uint64_t seed) {
  const std::size_t k = loads.size();
  std::vector<std::string> names;
  for (std::size_t a = 0; a < k; ++a) names.push_back("attr" + std::to_string(a));
  std::vector<std::vector<int>> cols(k, std::vector<int>(n));
  RngStream rng(seed);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> factors(loads.front().size());
    for (auto& f : factors) f = rng.normal();
    for (std::size_t a = 0; a < k; ++a) {
      double z = 0.0, load_sq = 0.0;
      for (std::size_t f = 0; f < factors.size(); ++f) {
        z += loads[a][f] * factors[f];
        load_sq += loads[a][f] * loads[a][f];
      }
      z += std::sqrt(std::max(0.0, 1.0 - load_sq)) * rng.normal();
      cols[a][r] = z < -0.35 ? -1 : (z > 0.35 ? 1 : 0);
    }
  }
  return table_from_columns(names, cols);
}

}  // namespace

TEST_CASE("pearson_matrix basics") {
  const auto t = table_from_columns(
      {"A", "NegA", "B"},
      {{1, -1, 0, 1, -1, 1}, {-1, 1, 0, -1, 1, -1}, {0, 1, 1, -1, 0, 1}});
  const auto m = pearson_matrix(t);
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.at(1, 1) == 1.0);
  CHECK(m.at(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(m.at(0, 2) == doctest::Approx(m.at(2, 0)).epsilon(1e-15));
}

TEST_CASE("pearson_matrix equals the two-pass oracle on a hand-built table") {
  const std::vector<std::vector<int>> cols{
      {1, 0, -1, 1, 0}, {0, 1, 1, -1, -1}, {1, 1, 0, 0, -1}};
  const auto t = table_from_columns({"X", "Y", "Z"}, cols);
  const auto m = pearson_matrix(t);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(std::fabs(m.at(i, j) - pearson_oracle(cols[i], cols[j])) < 1e-12);
    }
  }
}

TEST_CASE("pearson_matrix rejects constant columns by name") {
  const auto t = table_from_columns({"Ok", "Flat"}, {{1, -1, 0, 1}, {1, 1, 1, 1}});
  try {
    pearson_matrix(t);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Flat") != std::string::npos);
  }
}

TEST_CASE("cluster_correlation means the absolute pairwise entries") {
  CorrelationMatrix m;
  m.names = {"A", "B", "C"};
  m.values = {1.0, 0.9, 0.1, 0.9, 1.0, -0.3, 0.1, -0.3, 1.0};

  const Cluster a{{0}, {0}, "A"};
  const Cluster b{{1}, {0}, "B"};
  const Cluster c{{2}, {0}, "C"};
  CHECK(cluster_correlation(a, c, m) == doctest::Approx(0.1));

  const Cluster ab{{0, 1}, {0, 0}, "A+B"};
  CHECK(cluster_correlation(ab, c, m) == doctest::Approx((0.1 + 0.3) / 2.0));

  CHECK_THROWS_AS(cluster_correlation(ab, a, m), ValidationError);
}

TEST_CASE("clustering_step merges the most correlated pair") {
  CorrelationMatrix m;
  m.names = {"A", "B", "C"};
  m.values = {1.0, 0.9, 0.1, 0.9, 1.0, 0.2, 0.1, 0.2, 1.0};
  std::vector<Cluster> clusters{{{0}, {0}, "A"}, {{1}, {0}, "B"}, {{2}, {0}, "C"}};

  std::vector<Cluster> lone{{{0}, {0}, "A"}};
  CHECK_THROWS_AS(clustering_step(lone, m), ValidationError);

  const std::size_t merged = clustering_step(clusters, m);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[merged].members == std::vector<std::uint32_t>{0, 1});
  clustering_step(clusters, m);
  CHECK(clusters.size() == 1);
}

TEST_CASE("clustering_step breaks exact ties lexicographically") {
  CorrelationMatrix m;
  m.names = {"D", "C", "B", "A"};
  // D-C and B-A both at 0.5; sorted tuples ("A","B") < ("C","D")
  m.values = {1.0, 0.5, 0.0, 0.0,  //
              0.5, 1.0, 0.0, 0.0,  //
              0.0, 0.0, 1.0, 0.5,  //
              0.0, 0.0, 0.5, 1.0};
  std::vector<Cluster> clusters{
      {{0}, {0}, "D"}, {{1}, {0}, "C"}, {{2}, {0}, "B"}, {{3}, {0}, "A"}};
  const std::size_t merged = clustering_step(clusters, m);
  CHECK(clusters[merged].members == std::vector<std::uint32_t>{2, 3});
}

TEST_CASE("harmonize inverts the anticorrelated member and renames it") {
  // Eyeglasses vs an inverse twin; the inverse gets the Not prefix
  const std::size_t n = 400;
  std::vector<std::vector<int>> cols(2, std::vector<int>(n));
  RngStream rng(12);
  for (std::size_t r = 0; r < n; ++r) {
    const int v = int(rng.below(3)) - 1;
    cols[0][r] = v;
    cols[1][r] = -v;
  }
  // a little noise so the correlation is not exactly -1
  for (std::size_t r = 0; r < n; r += 17) cols[1][r] = 0;

  auto t = table_from_columns({"Eyeglasses", "No Eyewear"}, cols);
  auto m = pearson_matrix(t);
  REQUIRE(m.at(0, 1) < -0.8);

  std::vector<Cluster> clusters{{{0}, {0}, "Eyeglasses"}, {{1}, {0}, "No Eyewear"}};
  const std::size_t merged = clustering_step(clusters, m);
  const auto toggled = harmonize(clusters[merged], t, m);

  CHECK(toggled == std::vector<std::uint32_t>{1});
  CHECK(m.names[1] == "Not No Eyewear");
  CHECK(t.attribute_names[1] == "Not No Eyewear");
  CHECK(clusters[merged].display_name == "Eyeglasses+Not No Eyewear");
  CHECK(m.at(0, 1) > 0.8);

  // recomputing from the mutated table reproduces the sign-flipped matrix
  const auto recomputed = pearson_matrix(t);
  CHECK(std::fabs(recomputed.at(0, 1) - m.at(0, 1)) < 1e-12);
}

TEST_CASE("harmonize is a no-op for all-positive clusters") {
  const auto base = latent_table(3000, {{0.9}, {0.85}, {0.0}}, 3);
  auto t = base;
  auto m = pearson_matrix(t);
  REQUIRE(m.at(0, 1) > 0.2);
  Cluster c{{0, 1}, {0, 0}, "attr0+attr1"};
  const auto toggled = harmonize(c, t, m);
  CHECK(toggled.empty());
  CHECK(t.labels == base.labels);
  CHECK(c.inverted == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("harmonize flips exactly one member of a three-member cluster") {
  // attr0, attr1 aligned with the factor; attr2 loads negatively
  const auto base = latent_table(5000, {{0.9}, {0.8}, {-0.85}}, 9);
  auto t = base;
  auto m = pearson_matrix(t);
  REQUIRE(m.at(0, 2) < 0.0);
  REQUIRE(m.at(1, 2) < 0.0);

  Cluster c{{0, 1, 2}, {0, 0, 0}, ""};
  const auto toggled = harmonize(c, t, m);
  CHECK(toggled == std::vector<std::uint32_t>{2});
  CHECK(c.inverted == std::vector<std::uint8_t>{0, 0, 1});

  // all intra-cluster correlations are now non-negative, and the matrix
  // matches a recomputation from the mutated table
  const auto recomputed = pearson_matrix(t);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) CHECK(m.at(i, j) >= 0.0);
      CHECK(std::fabs(recomputed.at(i, j) - m.at(i, j)) < 1e-12);
    }
  }
}

TEST_CASE("harmonization preserves absolute correlations") {
  const auto base = latent_table(4000, {{0.9}, {-0.8}, {0.5}, {0.0}}, 21);
  auto t = base;
  auto m = pearson_matrix(t);
  const auto original = pearson_matrix(base);

  Cluster c{{0, 1}, {0, 0}, ""};
  harmonize(c, t, m);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(std::fabs(std::fabs(m.at(i, j)) - std::fabs(original.at(i, j))) < 1e-12);
    }
  }
}

TEST_CASE("requirements_for folds inversion flags into raw labels") {
  Cluster c{{2, 5}, {0, 1}, "X+Not Y"};
  const auto plus = requirements_for(c, 1);
  REQUIRE(plus.size() == 2);
  CHECK(plus[0] == std::pair<std::uint32_t, int>{2, 1});
  CHECK(plus[1] == std::pair<std::uint32_t, int>{5, -1});
  const auto minus = requirements_for(c, -1);
  CHECK(minus[0] == std::pair<std::uint32_t, int>{2, -1});
  CHECK(minus[1] == std::pair<std::uint32_t, int>{5, 1});
  CHECK_THROWS_AS(requirements_for(c, 0), ValidationError);
}

TEST_CASE("select_imax keeps the last valid iteration") {
  // One factor with mixed signs keeps every merge sign-consistent, so all
  // K-1 iterations are probed; validity is scripted by the probe.
  const auto t =
      latent_table(4000, {{0.9}, {0.85}, {-0.8}, {0.75}, {0.5}, {-0.45}}, 33);

  const SamplingProbe always = [](const LabelRequirements&) { return true; };
  const auto all_valid = select_imax(t, always);
  CHECK(all_valid.iteration == 5);  // K-1 merges, vacuous constraint
  CHECK(all_valid.clusters.size() == 1);
  CHECK(all_valid.diagnostics.size() == 6);
  CHECK(all_valid.harmonization_violation.empty());

  const SamplingProbe cap = [](const LabelRequirements& reqs) {
    return reqs.size() < 3;  // any cluster of 3+ members becomes unsamplable
  };
  const auto capped = select_imax(t, cap);
  // greedy merging chains on one-factor data: iteration 2 already grows a
  // 3-member cluster, so the last valid iteration is 1
  CHECK(capped.iteration == 1);
  for (const auto& c : capped.clusters) CHECK(c.members.size() <= 2);
  CHECK(capped.clusters.size() == t.attribute_count() - 1);
  // diagnostics cover every probed iteration regardless of the choice
  CHECK(capped.diagnostics.size() == t.attribute_count());
  CHECK(capped.diagnostics[1].sampling_valid);
  CHECK_FALSE(capped.diagnostics[2].sampling_valid);
}

TEST_CASE("select_imax errors when even singletons are unsamplable") {
  const auto t = latent_table(500, {{0.5}, {0.0}}, 8);
  const SamplingProbe never = [](const LabelRequirements&) { return false; };
  CHECK_THROWS_AS(select_imax(t, never), InsufficientSamplesError);
}

TEST_CASE("greedy clustering matches a brute-force argmax at every step") {
  // 8 attributes on one factor: every pairwise correlation is a product of
  // loads, so sign-normalization is globally consistent and all 7 merges
  // harmonize cleanly.
  const auto t = latent_table(
      6000,
      {{0.9}, {0.85}, {-0.8}, {0.75}, {-0.7}, {0.65}, {0.6}, {0.55}}, 55);
  auto m = pearson_matrix(t);
  std::vector<Cluster> clusters;
  for (std::uint32_t a = 0; a < 8; ++a) {
    clusters.push_back(Cluster{{a}, {0}, t.attribute_names[a]});
  }

  for (int step = 0; step < 7; ++step) {
    // brute-force argmax over all cluster pairs, computed independently
    double best = -1.0;
    std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> best_pair;
    for (std::size_t i = 0; i + 1 < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double acc = 0.0;
        for (const auto u : clusters[i].members) {
          for (const auto v : clusters[j].members) acc += std::fabs(m.at(u, v));
        }
        acc /= double(clusters[i].members.size() * clusters[j].members.size());
        if (acc > best) {
          best = acc;
          best_pair = {clusters[i].members, clusters[j].members};
        }
      }
    }
    std::vector<std::uint32_t> expected_members;
    expected_members.insert(expected_members.end(), best_pair.first.begin(),
                            best_pair.first.end());
    expected_members.insert(expected_members.end(), best_pair.second.begin(),
                            best_pair.second.end());
    std::sort(expected_members.begin(), expected_members.end());

    const std::size_t merged = clustering_step(clusters, m);
    CHECK(clusters[merged].members == expected_members);
    CHECK(clusters.size() == 8 - std::size_t(step) - 1);
    harmonize_matrix(clusters[merged], m);

    // intra-cluster correlations stay non-negative after every harmonization
    for (const auto& c : clusters) {
      for (std::size_t i = 0; i + 1 < c.members.size(); ++i) {
        for (std::size_t j = i + 1; j < c.members.size(); ++j) {
          CHECK(m.at(c.members[i], c.members[j]) >= 0.0);
        }
      }
    }
  }
}
