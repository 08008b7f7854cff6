#include "fairprobe/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fairprobe/parallel.hpp"
#include "fairprobe/rng.hpp"
#include "fairprobe/stats.hpp"

namespace fairprobe {

void validate_config(const SyntheticConfig& config) {
  if (config.identities_per_gender < 2) {
    throw ValidationError("synthetic: need at least 2 identities per gender");
  }
  if (config.images_per_identity < 2) {
    throw ValidationError("synthetic: need at least 2 images per identity");
  }
  if (config.attribute_count() == 0) {
    throw ValidationError("synthetic: attribute count must be positive");
  }
  if (!(config.p_positive >= 0.0 && config.p_zero >= 0.0 &&
        config.p_positive + config.p_zero <= 1.0)) {
    throw ValidationError("synthetic: attribute marginals must form a distribution");
  }
  if (!(config.genuine_mu > config.impostor_mu)) {
    throw ValidationError("synthetic: genuine mean must exceed impostor mean");
  }
  if (!(config.genuine_sigma > 0.0 && config.impostor_sigma > 0.0)) {
    throw ValidationError("synthetic: score sigmas must be positive");
  }
  if (!(config.impostor_per_genuine > 0.0)) {
    throw ValidationError("synthetic: impostor_per_genuine must be positive");
  }

  std::vector<std::uint8_t> in_group(config.attribute_count(), 0);
  for (const auto& g : config.groups) {
    if (g.members.size() < 2) {
      throw ValidationError("synthetic: correlated groups need at least 2 members");
    }
    if (!(g.rho >= 0.0 && g.rho < 1.0)) {
      throw ValidationError(
          "synthetic: group rho must be in [0,1); the correlation structure is "
          "infeasible otherwise");
    }
    for (const std::uint32_t a : g.members) {
      if (a >= config.attribute_count()) {
        throw ValidationError("synthetic: group references attribute " + std::to_string(a));
      }
      if (in_group[a]) {
        throw ValidationError(
            "synthetic: attribute " + std::to_string(a) +
            " belongs to two correlated groups; the structure is infeasible");
      }
      in_group[a] = 1;
    }
  }
  for (const auto& r : config.rules) {
    if (r.attribute >= config.attribute_count()) {
      throw ValidationError("synthetic: rule references attribute " +
                            std::to_string(r.attribute));
    }
    if (r.label != 1 && r.label != -1) {
      throw ValidationError("synthetic: rule labels must be +1 or -1");
    }
    if (!(r.delta > 0.0 && r.delta < 1.0)) {
      throw ValidationError("synthetic: rule delta must be in (0,1)");
    }
    for (const double p : {r.prevalence_biased, r.prevalence_other}) {
      if (!(p > 0.0 && p + config.p_zero < 1.0)) {
        throw ValidationError("synthetic: rule prevalences must fit the label space");
      }
    }
  }
}

namespace {

struct AttributeModel {
  // Latent loading: z = load_factor * factor(group) + load_noise * noise.
  int group = -1;
  double load_factor = 0.0;
  double load_noise = 1.0;
  // Thresholds per gender: z < lo -> -1, z > hi -> +1, else 0.
  std::array<double, kGenderCount> lo{}, hi{};
};

std::vector<AttributeModel> build_attribute_models(const SyntheticConfig& config) {
  const std::size_t k = config.attribute_count();
  std::vector<AttributeModel> models(k);
  for (std::size_t gi = 0; gi < config.groups.size(); ++gi) {
    const auto& g = config.groups[gi];
    for (std::size_t mi = 0; mi < g.members.size(); ++mi) {
      AttributeModel& m = models[g.members[mi]];
      m.group = int(gi);
      const double load = std::sqrt(g.rho);
      m.load_factor = (g.negate_first && mi == 0) ? -load : load;
      m.load_noise = std::sqrt(1.0 - g.rho);
    }
  }

  for (std::size_t a = 0; a < k; ++a) {
    std::array<double, kGenderCount> p_plus{config.p_positive, config.p_positive};
    std::array<double, kGenderCount> p_minus{1.0 - config.p_positive - config.p_zero,
                                             1.0 - config.p_positive - config.p_zero};
    for (const auto& r : config.rules) {
      if (r.attribute != a) continue;
      for (std::size_t g = 0; g < kGenderCount; ++g) {
        const double prev =
            Gender(g) == r.gender ? r.prevalence_biased : r.prevalence_other;
        if (r.label > 0) {
          p_plus[g] = prev;
          p_minus[g] = 1.0 - prev - config.p_zero;
        } else {
          p_minus[g] = prev;
          p_plus[g] = 1.0 - prev - config.p_zero;
        }
      }
    }
    for (std::size_t g = 0; g < kGenderCount; ++g) {
      models[a].lo[g] = norm_ppf(p_minus[g]);
      models[a].hi[g] = norm_ppf(1.0 - p_plus[g]);
    }
  }
  return models;
}

}  // namespace

std::pair<AnnotationTable, ComparisonStore> generate(const SyntheticConfig& config) {
  validate_config(config);

  SyntheticConfig cfg = config;
  for (std::size_t a = 0; a < cfg.attribute_names.size(); ++a) {
    if (cfg.attribute_names[a].empty()) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "attr_%02zu", a);
      cfg.attribute_names[a] = buf;
    }
  }

  const std::size_t k = cfg.attribute_count();
  const std::uint64_t n_id = cfg.identities_per_gender;
  const std::uint64_t m = cfg.images_per_identity;
  const std::uint64_t n_templates = 2 * n_id * m;
  const auto models = build_attribute_models(cfg);

  AnnotationTable table;
  table.attribute_names = cfg.attribute_names;
  table.template_ids.resize(n_templates);
  table.identity.resize(n_templates);
  table.gender.resize(n_templates);
  table.labels.resize(n_templates * k);
  table.identity_names.resize(2 * n_id);
  for (std::uint64_t i = 0; i < 2 * n_id; ++i) {
    const Gender g = i < n_id ? Gender::Male : Gender::Female;
    char buf[24];
    std::snprintf(buf, sizeof buf, "%c%06llu", gender_code(g),
                  (unsigned long long)(i < n_id ? i : i - n_id));
    table.identity_names[i] = buf;
  }

  parallel_for(n_templates, 4096, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint64_t ident = std::uint64_t(t) / m;
      const Gender g = ident < n_id ? Gender::Male : Gender::Female;
      table.template_ids[t] = t;
      table.identity[t] = std::uint32_t(ident);
      table.gender[t] = g;

      for (std::size_t a = 0; a < k; ++a) {
        const AttributeModel& am = models[a];
        double z;
        if (am.group >= 0) {
          const double f = keyed_normal(
              SeedChain{}.add(cfg.seed).add("factor").add(t).add(std::uint64_t(am.group)).digest());
          const double e = keyed_normal(
              SeedChain{}.add(cfg.seed).add("latent").add(t).add(std::uint64_t(a)).digest());
          z = am.load_factor * f + am.load_noise * e;
        } else {
          z = keyed_normal(
              SeedChain{}.add(cfg.seed).add("latent").add(t).add(std::uint64_t(a)).digest());
        }
        const std::size_t gi = std::size_t(g);
        Label v = 0;
        if (z < am.lo[gi]) {
          v = -1;
        } else if (z > am.hi[gi]) {
          v = 1;
        }
        table.labels[t * k + a] = v;
      }
    }
  });
  table.finalize();

  // Genuine blocks first (identity order, pair order), then impostor blocks
  // per gender; every slot is precomputable, so scoring runs in parallel.
  const std::uint64_t pairs_per_identity = m * (m - 1) / 2;
  const std::uint64_t genuine_per_gender = n_id * pairs_per_identity;
  const std::uint64_t impostor_per_gender = std::uint64_t(
      std::llround(cfg.impostor_per_genuine * double(genuine_per_gender)));
  const std::uint64_t total =
      2 * genuine_per_gender + 2 * impostor_per_gender;

  ComparisonStore store;
  store.idx_a.resize(total);
  store.idx_b.resize(total);
  store.score.resize(total);
  store.kind.resize(total);
  store.gender.resize(total);

  const auto score_shift = [&](std::uint64_t ta, std::uint64_t tb) {
    double shift = 0.0;
    for (const auto& r : cfg.rules) {
      if (int(table.label(ta, r.attribute)) == r.label ||
          int(table.label(tb, r.attribute)) == r.label) {
        shift += r.delta;
      }
    }
    return shift;
  };
  const auto clamp_score = [](double s) { return std::clamp(s, -1.0, 1.0); };

  parallel_for(2 * n_id, 16, [&](std::size_t begin, std::size_t end) {
    for (std::size_t ident = begin; ident < end; ++ident) {
      const Gender g = ident < n_id ? Gender::Male : Gender::Female;
      std::uint64_t slot = std::uint64_t(ident) * pairs_per_identity;
      const std::uint64_t base_t = std::uint64_t(ident) * m;
      for (std::uint64_t i = 0; i + 1 < m; ++i) {
        for (std::uint64_t j = i + 1; j < m; ++j, ++slot) {
          const std::uint64_t ta = base_t + i;
          const std::uint64_t tb = base_t + j;
          const double noise = keyed_normal(
              SeedChain{}.add(cfg.seed).add("gen-score").add(ta).add(tb).digest());
          store.idx_a[slot] = ta;
          store.idx_b[slot] = tb;
          store.kind[slot] = Kind::Genuine;
          store.gender[slot] = g;
          store.score[slot] = clamp_score(cfg.genuine_mu - score_shift(ta, tb) +
                                          cfg.genuine_sigma * noise);
        }
      }
    }
  });

  const std::uint64_t impostor_base = 2 * genuine_per_gender;
  parallel_for(2 * impostor_per_gender, 8192, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const std::size_t gi = s < impostor_per_gender ? 0 : 1;
      const std::uint64_t gender_first_template = gi == 0 ? 0 : n_id * m;
      RngStream rng(SeedChain{}
                        .add(cfg.seed)
                        .add("imp-pair")
                        .add(std::uint64_t(gi))
                        .add(std::uint64_t(s))
                        .digest());
      std::uint64_t ta, tb;
      do {
        ta = gender_first_template + rng.below(n_id * m);
        tb = gender_first_template + rng.below(n_id * m);
      } while (ta / m == tb / m);
      if (ta > tb) std::swap(ta, tb);
      const double noise = keyed_normal(
          SeedChain{}.add(cfg.seed).add("imp-score").add(ta).add(tb).digest());
      const std::uint64_t slot = impostor_base + s;
      store.idx_a[slot] = ta;
      store.idx_b[slot] = tb;
      store.kind[slot] = Kind::Impostor;
      store.gender[slot] = Gender(gi);
      store.score[slot] = clamp_score(cfg.impostor_mu + cfg.impostor_sigma * noise);
    }
  });

  store.compute_fingerprint();
  return {std::move(table), std::move(store)};
}

std::vector<RecoveryAssignment> expected_recovery(const SyntheticConfig& config) {
  if (config.rules.empty()) {
    throw ValidationError("expected_recovery: config has no planted rules");
  }
  std::vector<RecoveryAssignment> out;
  for (const auto& r : config.rules) {
    for (const int label : {1, -1}) {
      const RecoveryAssignment a{r.attribute, label};
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
  }
  return out;
}

std::vector<Assignment> expected_recovery(const SyntheticConfig& config,
                                          const ClusterModel& model) {
  const auto attr_level = expected_recovery(config);
  std::vector<Assignment> out;
  for (const auto& ra : attr_level) {
    bool found = false;
    for (std::uint32_t c = 0; c < model.clusters.size(); ++c) {
      const auto& members = model.clusters[c].members;
      if (std::find(members.begin(), members.end(), ra.attribute) != members.end()) {
        const Assignment a{c, ra.label};
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        found = true;
        break;
      }
    }
    if (!found) {
      throw ValidationError("expected_recovery: attribute " + std::to_string(ra.attribute) +
                            " is not covered by the cluster model");
    }
  }
  return out;
}

}  // namespace fairprobe
