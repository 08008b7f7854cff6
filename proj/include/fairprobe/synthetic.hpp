#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairprobe/decorrelate.hpp"
#include "fairprobe/equalize.hpp"
#include "fairprobe/types.hpp"

namespace fairprobe {

// Pairwise-correlated attribute block realized through a shared latent
// factor. negate_first flips the first member's loading, planting negative
// correlations between it and the rest of the block.
struct CorrelatedGroup {
  std::vector<std::uint32_t> members;
  double rho = 0.0;
  bool negate_first = false;
};

// Couples one attribute label to a gender (prevalence skew) and degrades the
// genuine scores of every comparison in which either partner carries that
// label. The skew is what turns an attribute effect into an apparent gender
// gap.
struct PlantedRule {
  std::uint32_t attribute = 0;
  int label = 1;
  Gender gender = Gender::Female;
  double delta = 0.2;
  double prevalence_biased = 0.5;  // P(attribute = label) for the stated gender
  double prevalence_other = 0.05;  // same for the other gender
};

struct SyntheticConfig {
  std::uint32_t identities_per_gender = 200;
  std::uint32_t images_per_identity = 6;
  std::vector<std::string> attribute_names;  // empty entries are auto-named
  double p_positive = 0.45;  // marginal P(+1) for unplanted attributes
  double p_zero = 0.10;      // marginal P(0), the unclear-label rate
  std::vector<CorrelatedGroup> groups;
  std::vector<PlantedRule> rules;
  double genuine_mu = 0.72;
  double genuine_sigma = 0.10;
  double impostor_mu = 0.0;
  double impostor_sigma = 0.13;
  double impostor_per_genuine = 3.0;
  std::uint64_t seed = 0;

  std::size_t attribute_count() const { return attribute_names.size(); }
};

void validate_config(const SyntheticConfig& config);

// Deterministic dataset with the requested correlation structure and planted
// bias. Scores are drawn per comparison from the genuine/impostor normal
// models, truncated to [-1,1]; rule-matching genuine pairs have their mean
// shifted down by delta.
std::pair<AnnotationTable, ComparisonStore> generate(const SyntheticConfig& config);

struct RecoveryAssignment {
  std::uint32_t attribute = 0;
  int label = 1;

  friend bool operator==(const RecoveryAssignment&, const RecoveryAssignment&) = default;
};

// The attribute-level assignments whose equalization neutralizes every
// planted shift: for each rule, requiring the shared absence of the label
// removes the shifted pairs, requiring its shared presence applies the shift
// to both genders alike.
std::vector<RecoveryAssignment> expected_recovery(const SyntheticConfig& config);

// Same set at cluster granularity under a fitted model.
std::vector<Assignment> expected_recovery(const SyntheticConfig& config,
                                          const ClusterModel& model);

}  // namespace fairprobe
