#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fairprobe/types.hpp"

namespace fairprobe {

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<double> values;  // row-major K x K, symmetric, unit diagonal

  std::size_t size() const { return names.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * names.size() + j]; }
};

// Pearson correlation over the raw ternary values of every attribute pair,
// unclear (0) rows included. Constant columns are rejected by name.
CorrelationMatrix pearson_matrix(const AnnotationTable& table);

struct Cluster {
  std::vector<std::uint32_t> members;   // attribute indices, ascending
  std::vector<std::uint8_t> inverted;   // parallel to members
  std::string display_name;

  bool is_inverted(std::uint32_t attr) const;
};

std::string cluster_member_name(const std::string& attribute_name, bool inverted);
std::string default_cluster_name(const Cluster& c, const std::vector<std::string>& names);

// Mean pairwise absolute Pearson correlation across two disjoint clusters.
double cluster_correlation(const Cluster& a, const Cluster& b, const CorrelationMatrix& m);

// Merges the pair of clusters with maximum cluster_correlation; ties resolve
// to the lexicographically smallest pair of sorted member-name tuples.
// Returns the index of the merged cluster.
std::size_t clustering_step(std::vector<Cluster>& clusters, const CorrelationMatrix& m);

// Sign-normalizes a cluster so every intra-cluster correlation is
// non-negative: takes the lexicographically smaller attribute of the most
// negative pair as reference and inverts every member negatively correlated
// with it. Inverting toggles the member's flag, flips the matrix row/column
// and prefixes the name with "Not ". Returns the toggled attribute indices.
std::vector<std::uint32_t> harmonize_matrix(Cluster& cluster, CorrelationMatrix& m);

// harmonize_matrix plus the table-side effect: non-zero annotations of every
// toggled attribute are multiplied by -1 and the column is renamed.
std::vector<std::uint32_t> harmonize(Cluster& cluster, AnnotationTable& table,
                                     CorrelationMatrix& m);

struct IterationDiagnostics {
  int iteration = 0;
  std::size_t cluster_count = 0;
  double mean_abs_r = 0.0;
  double std_abs_r = 0.0;
  double max_abs_r = 0.0;
  bool sampling_valid = false;
};

struct ClusterModel {
  std::vector<std::string> attribute_names;  // original, uninverted names
  std::vector<Cluster> clusters;
  int iteration = 0;
  std::vector<IterationDiagnostics> diagnostics;
  // Set when the merge sweep stopped early because a cluster could not be
  // sign-normalized; iterations past that point were not probed.
  std::string harmonization_violation;

  const Cluster* find(const std::string& display_name) const;
};

// Requirements on raw annotation values: (attribute index, required label).
using LabelRequirements = std::vector<std::pair<std::uint32_t, int>>;

// Answers whether filtering + sampling retains enough comparisons for both
// genders under the given template requirements.
using SamplingProbe = std::function<bool(const LabelRequirements&)>;

// Resolves an assignment on a cluster to raw-label requirements, folding in
// the per-member inversion flags.
LabelRequirements requirements_for(const Cluster& cluster, int label);

// Runs the merge/harmonize loop over all K-1 iterations, recording per
// iteration the cluster count, inter-cluster correlation stats and whether
// every cluster still admits a samplable label. Returns the model at the
// largest valid iteration.
ClusterModel select_imax(const AnnotationTable& table, const SamplingProbe& probe);

// Same loop but stopping at a fixed iteration, no validity requirement.
ClusterModel cluster_at_iteration(const AnnotationTable& table, int iteration,
                                  const SamplingProbe* probe = nullptr);

}  // namespace fairprobe
