#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fairprobe/types.hpp"

namespace fairprobe {

struct OperatingPoint {
  double fmr_target = 1e-3;
  double alpha = 0.5;  // FMR-Gini weight in the aggregate score
};

struct GroupRates {
  Gender group = Gender::Male;
  double fmr = 0.0;
  double fnmr = 0.0;
};

struct EvalResult {
  std::array<GroupRates, kGenderCount> per_group{};  // means over repetitions
  double igarbe_mean = 0.0;
  double igarbe_std = 0.0;
  double fnmr_total_mean = 0.0;
  double threshold_mean = 0.0;
  std::uint64_t retained_genuine = 0;  // post-filter, pre-sampling, both genders
  int repetitions = 0;
};

// Smallest observed score t such that |{s >= t}| / n <= fmr_target. A step
// function over the observed scores, no interpolation. If no observed score
// qualifies (ties at the maximum), returns max + eps so that FMR is 0.
double threshold_at_fmr(std::span<const double> impostor_scores, double fmr_target);

// Accept rule is score >= threshold: fmr = share of impostors at or above,
// fnmr = share of genuines below.
std::pair<double, double> error_rates(std::span<const double> genuine_scores,
                                      std::span<const double> impostor_scores,
                                      double threshold);

// Sample-size corrected Gini over n >= 2 values. All-zero input is treated as
// perfectly equal and yields 0.
double gini(std::span<const double> values);

double garbe(std::span<const GroupRates> rates, double alpha);
double igarbe(std::span<const GroupRates> rates, double alpha);

// Per-gender score sets, one genuine and one impostor list per repetition.
struct GenderScores {
  std::vector<std::vector<double>> genuine;
  std::vector<std::vector<double>> impostor;
};

// Per repetition: one shared threshold from the pooled male+female impostors,
// per-gender rates at that threshold, total FNMR over the pooled genuines,
// and the fairness score from the per-gender rates. Means and standard
// deviations are taken across repetitions. retained_genuine is left 0 for the
// caller to fill.
EvalResult evaluate_groups(const GenderScores& male, const GenderScores& female,
                           const OperatingPoint& op);

}  // namespace fairprobe
