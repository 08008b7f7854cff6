#include "fairprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairprobe/stats.hpp"

namespace fairprobe {

double threshold_at_fmr(std::span<const double> impostor_scores, double fmr_target) {
  if (impostor_scores.empty()) {
    throw ValidationError("threshold_at_fmr: empty impostor score list");
  }
  if (!(fmr_target > 0.0) || !(fmr_target < 1.0)) {
    throw ValidationError("threshold_at_fmr: fmr_target must be in (0,1)");
  }

  std::vector<double> sorted(impostor_scores.begin(), impostor_scores.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const std::size_t n = sorted.size();

  // Runs of equal values, smallest first. For a candidate t equal to the run
  // value, the accept count is the index one past the run's end. The count is
  // non-increasing in t, so the first qualifying run is the smallest t.
  std::size_t i = n;
  while (i > 0) {
    const double v = sorted[i - 1];
    std::size_t first = i - 1;
    while (first > 0 && sorted[first - 1] == v) --first;
    if (double(i) / double(n) <= fmr_target) return v;
    i = first;
  }

  // Even the maximum accepts too many (all values tied above target).
  const double m = sorted.front();
  static const double kEps = 0x1.0p-52;
  return m + (kEps * std::fabs(m) + kEps);
}

std::pair<double, double> error_rates(std::span<const double> genuine_scores,
                                      std::span<const double> impostor_scores,
                                      double threshold) {
  if (genuine_scores.empty()) {
    throw ValidationError("error_rates: FNMR undefined for empty genuine scores");
  }
  if (std::isnan(threshold)) {
    throw ValidationError("error_rates: threshold is NaN");
  }
  std::size_t false_matches = 0;
  for (double s : impostor_scores) false_matches += (s >= threshold) ? 1 : 0;
  std::size_t false_non_matches = 0;
  for (double s : genuine_scores) false_non_matches += (s < threshold) ? 1 : 0;
  const double fmr =
      impostor_scores.empty() ? 0.0 : double(false_matches) / double(impostor_scores.size());
  const double fnmr = double(false_non_matches) / double(genuine_scores.size());
  return {fmr, fnmr};
}

double gini(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw ValidationError("gini: sample-size corrected Gini undefined for n < 2");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / double(n);
  if (mean == 0.0) return 0.0;

  double abs_diff_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      abs_diff_sum += std::fabs(values[i] - values[j]);
    }
  }
  return (double(n) / double(n - 1)) * (abs_diff_sum / (2.0 * double(n) * double(n) * mean));
}

double garbe(std::span<const GroupRates> rates, double alpha) {
  if (rates.size() < 2) throw ValidationError("garbe: need at least 2 groups");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("garbe: alpha must be in [0,1]");
  }
  std::vector<double> fmrs, fnmrs;
  fmrs.reserve(rates.size());
  fnmrs.reserve(rates.size());
  for (const auto& r : rates) {
    fmrs.push_back(r.fmr);
    fnmrs.push_back(r.fnmr);
  }
  return alpha * gini(fmrs) + (1.0 - alpha) * gini(fnmrs);
}

double igarbe(std::span<const GroupRates> rates, double alpha) {
  return 1.0 - garbe(rates, alpha);
}

EvalResult evaluate_groups(const GenderScores& male, const GenderScores& female,
                           const OperatingPoint& op) {
  const std::size_t reps = male.genuine.size();
  if (reps == 0 || male.impostor.size() != reps || female.genuine.size() != reps ||
      female.impostor.size() != reps) {
    throw ValidationError("evaluate_groups: repetition counts disagree");
  }

  std::vector<double> igarbes(reps), fnmr_totals(reps), thresholds(reps);
  std::array<double, kGenderCount> fmr_acc{}, fnmr_acc{};

  for (std::size_t r = 0; r < reps; ++r) {
    const auto check = [&](const std::vector<double>& v, Gender g, const char* what) {
      if (v.empty()) {
        throw ValidationError(std::string("evaluate_groups: empty ") + what + " set for " +
                              gender_name(g) + " in repetition " + std::to_string(r));
      }
    };
    check(male.genuine[r], Gender::Male, "genuine");
    check(male.impostor[r], Gender::Male, "impostor");
    check(female.genuine[r], Gender::Female, "genuine");
    check(female.impostor[r], Gender::Female, "impostor");

    std::vector<double> pooled_impostors;
    pooled_impostors.reserve(male.impostor[r].size() + female.impostor[r].size());
    pooled_impostors.insert(pooled_impostors.end(), male.impostor[r].begin(),
                            male.impostor[r].end());
    pooled_impostors.insert(pooled_impostors.end(), female.impostor[r].begin(),
                            female.impostor[r].end());
    const double tau = threshold_at_fmr(pooled_impostors, op.fmr_target);
    thresholds[r] = tau;

    const auto [fmr_m, fnmr_m] = error_rates(male.genuine[r], male.impostor[r], tau);
    const auto [fmr_f, fnmr_f] = error_rates(female.genuine[r], female.impostor[r], tau);
    fmr_acc[0] += fmr_m;
    fnmr_acc[0] += fnmr_m;
    fmr_acc[1] += fmr_f;
    fnmr_acc[1] += fnmr_f;

    const double n_mg = double(male.genuine[r].size());
    const double n_fg = double(female.genuine[r].size());
    fnmr_totals[r] = (fnmr_m * n_mg + fnmr_f * n_fg) / (n_mg + n_fg);

    const std::array<GroupRates, 2> rates{GroupRates{Gender::Male, fmr_m, fnmr_m},
                                          GroupRates{Gender::Female, fmr_f, fnmr_f}};
    igarbes[r] = igarbe(rates, op.alpha);
  }

  EvalResult res;
  res.repetitions = int(reps);
  res.igarbe_mean = mean(igarbes);
  res.igarbe_std = sample_stddev(igarbes);
  res.fnmr_total_mean = mean(fnmr_totals);
  res.threshold_mean = mean(thresholds);
  for (std::size_t g = 0; g < kGenderCount; ++g) {
    res.per_group[g] = GroupRates{Gender(g), fmr_acc[g] / double(reps),
                                  fnmr_acc[g] / double(reps)};
  }
  return res;
}

}  // namespace fairprobe
