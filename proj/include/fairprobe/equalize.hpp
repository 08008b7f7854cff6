#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairprobe/decorrelate.hpp"
#include "fairprobe/metrics.hpp"
#include "fairprobe/types.hpp"

namespace fairprobe {

struct Assignment {
  std::uint32_t cluster = 0;  // index into ClusterModel::clusters
  int label = 1;              // +1 or -1

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// A set of per-cluster label requirements; empty means no filtering (the
// baseline). At most one assignment per cluster.
struct AssignmentCombination {
  std::vector<Assignment> assignments;

  bool empty() const { return assignments.empty(); }
  std::size_t size() const { return assignments.size(); }
  bool uses_cluster(std::uint32_t cluster) const;
  AssignmentCombination extended(const Assignment& a) const;
};

void validate_combination(const AssignmentCombination& combo, const ClusterModel& model);

// Canonical rendering: assignments sorted by cluster name, `name=+1|-1`,
// joined by `;`. Used for cache keys, seed derivation and reports.
std::string canonical_encoding(const AssignmentCombination& combo,
                               const ClusterModel& model);

// Per-template predicate of the combination: 1 where every member attribute
// of every assigned cluster carries the assigned label exactly.
std::vector<std::uint8_t> template_mask(const AnnotationTable& table,
                                        const ClusterModel& model,
                                        const AssignmentCombination& combo);

struct FilterResult {
  // Surviving comparison indices split by gender and kind, each ascending in
  // store order.
  std::array<std::vector<std::uint32_t>, kGenderCount> genuine;
  std::array<std::vector<std::uint32_t>, kGenderCount> impostor;

  std::uint64_t retained_genuine() const {
    return genuine[0].size() + genuine[1].size();
  }
  std::vector<std::uint32_t> all_indices() const;
};

// Semi-join filter: select matching templates, semi-join the comparisons on
// each partner index, intersect so both partners match.
FilterResult filter_comparisons(const Dataset& data, const ClusterModel& model,
                                const AssignmentCombination& combo);

struct SampleParams {
  double rho_s = 0.2;           // genuine-to-impostor ratio of each set
  std::uint64_t lambda_g = 1000;  // minimum genuine samples per set
  int gamma = 3;                // sets per subgroup
};

struct SampleSets {
  std::size_t c_g = 0;
  std::size_t c_i = 0;
  // [gender][set] -> comparison indices
  std::array<std::vector<std::vector<std::uint32_t>>, kGenderCount> genuine;
  std::array<std::vector<std::vector<std::uint32_t>>, kGenderCount> impostor;
};

// Identifies the RNG streams of one sampling run so draws depend only on
// (master seed, combination, gender, kind, set index).
struct SampleSeed {
  std::uint64_t master = 0;
  std::string combo_key;
};

// Equal-size bounded sampling per gender: gamma pairwise-disjoint genuine
// sets and gamma independent impostor sets, sizes balanced across genders and
// tied to rho_s. Returns nullopt when the lower bounds cannot be met.
std::optional<SampleSets> sample(
    const std::array<std::vector<std::uint32_t>, kGenderCount>& genuine_pools,
    const std::array<std::vector<std::uint32_t>, kGenderCount>& impostor_pools,
    const SampleParams& params, const SampleSeed& seed);

struct EqualizeParams {
  SampleParams sampling;
  OperatingPoint op;
  std::uint64_t seed = 0;
};

// Filter -> split by gender -> sample -> evaluate. nullopt when sampling
// cannot satisfy the guards (the combination is too restrictive).
std::optional<EvalResult> equalize(const Dataset& data, const ClusterModel& model,
                                   const AssignmentCombination& combo,
                                   const EqualizeParams& params);

// Probe used by select_imax: filtering + the sampling guards, counts only.
SamplingProbe make_sampling_probe(const Dataset& data, const SampleParams& params);

}  // namespace fairprobe
