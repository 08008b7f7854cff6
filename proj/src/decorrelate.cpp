#include "fairprobe/decorrelate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairprobe/parallel.hpp"
#include "fairprobe/stats.hpp"

namespace fairprobe {

CorrelationMatrix pearson_matrix(const AnnotationTable& table) {
  const std::size_t n = table.size();
  const std::size_t k = table.attribute_count();
  if (n < 2) throw ValidationError("pearson_matrix: need at least 2 templates");

  // Labels live in {-1,0,+1}, so all moments are exact integer sums. Keeps
  // the result independent of summation order and avoids large buffers.
  std::vector<std::int64_t> sum(k, 0), sumsq(k, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const Label* row = table.labels.data() + r * k;
    for (std::size_t a = 0; a < k; ++a) {
      sum[a] += row[a];
      sumsq[a] += std::int64_t(row[a]) * row[a];
    }
  }
  std::vector<double> centered_norm(k);
  for (std::size_t a = 0; a < k; ++a) {
    const double variance_n = double(sumsq[a]) - double(sum[a]) * double(sum[a]) / double(n);
    if (variance_n <= 0.0) {
      throw ValidationError("pearson_matrix: attribute '" + table.attribute_names[a] +
                            "' is constant");
    }
    centered_norm[a] = std::sqrt(variance_n);
  }

  CorrelationMatrix m;
  m.names = table.attribute_names;
  m.values.assign(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) m.at(a, a) = 1.0;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t a = 0; a + 1 < k; ++a) {
    for (std::uint32_t b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
  }
  parallel_for(pairs.size(), 4, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto [a, b] = pairs[p];
      std::int64_t dot = 0;
      const Label* base = table.labels.data();
      for (std::size_t r = 0; r < n; ++r) {
        dot += std::int64_t(base[r * k + a]) * base[r * k + b];
      }
      const double cov_n = double(dot) - double(sum[a]) * double(sum[b]) / double(n);
      const double r = cov_n / (centered_norm[a] * centered_norm[b]);
      m.at(a, b) = r;
      m.at(b, a) = r;
    }
  });
  return m;
}

bool Cluster::is_inverted(std::uint32_t attr) const {
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] == attr) return inverted[i] != 0;
  }
  throw ValidationError("attribute " + std::to_string(attr) + " not in cluster");
}

std::string cluster_member_name(const std::string& attribute_name, bool inverted) {
  return inverted ? "Not " + attribute_name : attribute_name;
}

// `names` must already reflect the inversion state (matrix names do).
std::string default_cluster_name(const Cluster& c, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    if (i > 0) out += '+';
    out += names[c.members[i]];
  }
  return out;
}

double cluster_correlation(const Cluster& a, const Cluster& b, const CorrelationMatrix& m) {
  for (std::uint32_t u : a.members) {
    for (std::uint32_t v : b.members) {
      if (u == v) {
        throw ValidationError("cluster_correlation: clusters overlap on attribute " +
                              std::to_string(u));
      }
    }
  }
  double acc = 0.0;
  for (std::uint32_t u : a.members) {
    for (std::uint32_t v : b.members) acc += std::fabs(m.at(u, v));
  }
  return acc / double(a.members.size() * b.members.size());
}

namespace {

// Sorted member-name tuple used as the deterministic tie-break key.
std::vector<std::string> name_tuple(const Cluster& c, const CorrelationMatrix& m) {
  std::vector<std::string> names;
  names.reserve(c.members.size());
  for (std::uint32_t a : c.members) names.push_back(m.names[a]);
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

std::size_t clustering_step(std::vector<Cluster>& clusters, const CorrelationMatrix& m) {
  if (clusters.size() < 2) {
    throw ValidationError("clustering_step: fewer than 2 clusters remain");
  }

  double best_r = -1.0;
  std::size_t best_i = 0, best_j = 1;
  std::pair<std::vector<std::string>, std::vector<std::string>> best_key;

  for (std::size_t i = 0; i + 1 < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      const double r = cluster_correlation(clusters[i], clusters[j], m);
      if (r < best_r) continue;
      auto ti = name_tuple(clusters[i], m);
      auto tj = name_tuple(clusters[j], m);
      if (tj < ti) std::swap(ti, tj);
      auto key = std::make_pair(std::move(ti), std::move(tj));
      if (r > best_r || key < best_key) {
        best_r = r;
        best_i = i;
        best_j = j;
        best_key = std::move(key);
      }
    }
  }

  Cluster merged;
  const Cluster& a = clusters[best_i];
  const Cluster& b = clusters[best_j];
  merged.members.reserve(a.members.size() + b.members.size());
  for (std::size_t t = 0; t < a.members.size(); ++t) {
    merged.members.push_back(a.members[t]);
    merged.inverted.push_back(a.inverted[t]);
  }
  for (std::size_t t = 0; t < b.members.size(); ++t) {
    merged.members.push_back(b.members[t]);
    merged.inverted.push_back(b.inverted[t]);
  }
  // keep members ascending by attribute index
  std::vector<std::size_t> order(merged.members.size());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return merged.members[x] < merged.members[y];
  });
  Cluster sorted_cluster;
  for (std::size_t t : order) {
    sorted_cluster.members.push_back(merged.members[t]);
    sorted_cluster.inverted.push_back(merged.inverted[t]);
  }
  sorted_cluster.display_name = default_cluster_name(sorted_cluster, m.names);

  clusters.erase(clusters.begin() + std::ptrdiff_t(best_j));
  clusters[best_i] = std::move(sorted_cluster);
  return best_i;
}

std::vector<std::uint32_t> harmonize_matrix(Cluster& cluster, CorrelationMatrix& m) {
  if (cluster.members.size() < 2) {
    throw ValidationError("harmonize: cluster must have at least 2 members");
  }

  // Most negative intra-cluster pair; its lexicographically smaller member
  // becomes the sign reference.
  double most_negative = 0.0;
  std::uint32_t ref = 0;
  bool any_negative = false;
  for (std::size_t i = 0; i + 1 < cluster.members.size(); ++i) {
    for (std::size_t j = i + 1; j < cluster.members.size(); ++j) {
      const std::uint32_t u = cluster.members[i];
      const std::uint32_t v = cluster.members[j];
      const double r = m.at(u, v);
      if (r < most_negative) {
        most_negative = r;
        any_negative = true;
        ref = m.names[u] <= m.names[v] ? u : v;
      }
    }
  }
  if (!any_negative) return {};

  std::vector<std::uint32_t> toggled;
  for (std::size_t i = 0; i < cluster.members.size(); ++i) {
    const std::uint32_t w = cluster.members[i];
    if (w == ref) continue;
    if (m.at(w, ref) < 0.0) {
      toggled.push_back(w);
      cluster.inverted[i] ^= 1;
      for (std::size_t c = 0; c < m.size(); ++c) {
        if (c == w) continue;
        m.at(w, c) = -m.at(w, c);
        m.at(c, w) = -m.at(c, w);
      }
      m.names[w] = m.names[w].rfind("Not ", 0) == 0 ? m.names[w].substr(4)
                                                    : "Not " + m.names[w];
    }
  }

  for (std::size_t i = 0; i + 1 < cluster.members.size(); ++i) {
    for (std::size_t j = i + 1; j < cluster.members.size(); ++j) {
      const std::uint32_t u = cluster.members[i];
      const std::uint32_t v = cluster.members[j];
      if (m.at(u, v) < 0.0) {
        throw ValidationError("harmonize: correlation between '" + m.names[u] + "' and '" +
                              m.names[v] + "' is still negative after inversion");
      }
    }
  }
  cluster.display_name = default_cluster_name(cluster, m.names);
  return toggled;
}

std::vector<std::uint32_t> harmonize(Cluster& cluster, AnnotationTable& table,
                                     CorrelationMatrix& m) {
  const auto toggled = harmonize_matrix(cluster, m);
  const std::size_t n = table.size();
  for (const std::uint32_t a : toggled) {
    for (std::size_t r = 0; r < n; ++r) {
      table.label(r, a) = Label(-table.label(r, a));
    }
    table.attribute_names[a] = m.names[a];
  }
  return toggled;
}

LabelRequirements requirements_for(const Cluster& cluster, int label) {
  if (label != 1 && label != -1) {
    throw ValidationError("assignment label must be +1 or -1");
  }
  LabelRequirements reqs;
  reqs.reserve(cluster.members.size());
  for (std::size_t i = 0; i < cluster.members.size(); ++i) {
    reqs.emplace_back(cluster.members[i], cluster.inverted[i] ? -label : label);
  }
  return reqs;
}

namespace {

bool cluster_valid(const Cluster& c, const SamplingProbe& probe) {
  return probe(requirements_for(c, 1)) || probe(requirements_for(c, -1));
}

IterationDiagnostics diagnose(int iteration, const std::vector<Cluster>& clusters,
                              const CorrelationMatrix& m, const SamplingProbe* probe) {
  IterationDiagnostics d;
  d.iteration = iteration;
  d.cluster_count = clusters.size();
  std::vector<double> corr;
  for (std::size_t i = 0; i + 1 < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      corr.push_back(cluster_correlation(clusters[i], clusters[j], m));
    }
  }
  if (!corr.empty()) {
    d.mean_abs_r = mean(corr);
    d.std_abs_r = sample_stddev(corr);
    d.max_abs_r = *std::max_element(corr.begin(), corr.end());
  }
  d.sampling_valid = true;
  if (probe != nullptr) {
    for (const auto& c : clusters) {
      if (!cluster_valid(c, *probe)) {
        d.sampling_valid = false;
        break;
      }
    }
  }
  return d;
}

ClusterModel run_clustering(const AnnotationTable& table, const SamplingProbe* probe,
                            int fixed_iteration, bool require_valid) {
  const std::size_t k = table.attribute_count();
  if (k == 0) throw ValidationError("clustering: table has no attributes");
  const int max_iter = fixed_iteration >= 0 ? fixed_iteration : int(k) - 1;
  if (max_iter < 0 || std::size_t(max_iter) >= k) {
    throw ValidationError("clustering: iteration must be in [0, " +
                          std::to_string(k - 1) + "]");
  }

  CorrelationMatrix m = pearson_matrix(table);
  std::vector<Cluster> clusters;
  clusters.reserve(k);
  for (std::uint32_t a = 0; a < k; ++a) {
    Cluster c;
    c.members = {a};
    c.inverted = {0};
    c.display_name = table.attribute_names[a];
    clusters.push_back(std::move(c));
  }

  ClusterModel model;
  model.attribute_names = table.attribute_names;

  std::vector<Cluster> snapshot = clusters;
  int best_valid = -1;

  auto diag0 = diagnose(0, clusters, m, probe);
  if (diag0.sampling_valid) {
    best_valid = 0;
    snapshot = clusters;
  }
  model.diagnostics.push_back(diag0);
  if (require_valid && !diag0.sampling_valid) {
    throw InsufficientSamplesError(
        "select_imax: no cluster assignment is samplable before any merge; "
        "the dataset is too sparse");
  }

  int reached = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const std::size_t merged = clustering_step(clusters, m);
    try {
      harmonize_matrix(clusters[merged], m);
    } catch (const ValidationError& e) {
      // The correlation structure does not admit a sign-consistent cluster
      // beyond this point. Stop probing and keep what was valid so far.
      model.harmonization_violation =
          "iteration " + std::to_string(it) + ": " + e.what();
      break;
    }
    reached = it;
    const auto diag = diagnose(it, clusters, m, probe);
    model.diagnostics.push_back(diag);
    if (diag.sampling_valid) {
      best_valid = it;
      snapshot = clusters;
    }
  }

  if (fixed_iteration >= 0) {
    if (reached < fixed_iteration) {
      throw ValidationError("clustering: cannot harmonize up to iteration " +
                            std::to_string(fixed_iteration) + "; " +
                            model.harmonization_violation);
    }
    model.iteration = fixed_iteration;
    model.clusters = std::move(clusters);
  } else {
    model.iteration = best_valid;
    model.clusters = std::move(snapshot);
  }
  return model;
}

}  // namespace

ClusterModel select_imax(const AnnotationTable& table, const SamplingProbe& probe) {
  return run_clustering(table, &probe, -1, true);
}

ClusterModel cluster_at_iteration(const AnnotationTable& table, int iteration,
                                  const SamplingProbe* probe) {
  return run_clustering(table, probe, iteration, false);
}

const Cluster* ClusterModel::find(const std::string& display_name) const {
  for (const auto& c : clusters) {
    if (c.display_name == display_name) return &c;
  }
  return nullptr;
}

}  // namespace fairprobe
