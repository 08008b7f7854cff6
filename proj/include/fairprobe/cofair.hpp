#pragma once

#include <span>
#include <utility>
#include <vector>

namespace fairprobe {

// System-specific distribution of fairness scores, estimated with a Gaussian
// KDE. Immutable once fitted.
struct FairnessDistribution {
  std::vector<double> samples;
  double bandwidth = 0.0;
};

// Fits the distribution from single-assignment audit rows (score,
// total FNMR). Rows whose FNMR is more than 10% worse than the baseline are
// dropped; the bandwidth is 0.5 x Scott's rule over the survivors.
FairnessDistribution fit_distribution(
    std::span<const std::pair<double, double>> audit_results, double baseline_fnmr);

// Cumulative probability of a score below s under the fitted distribution:
// the exact CDF of the Gaussian mixture, mean of per-sample normal CDFs.
double cofair(const FairnessDistribution& dist, double s);

double kde_density(const FairnessDistribution& dist, double s);

}  // namespace fairprobe
