#include "fairprobe/cofair.hpp"

#include <cmath>
#include <limits>

#include "fairprobe/stats.hpp"
#include "fairprobe/types.hpp"

namespace fairprobe {

FairnessDistribution fit_distribution(
    std::span<const std::pair<double, double>> audit_results, double baseline_fnmr) {
  FairnessDistribution dist;
  const double cutoff = 1.1 * baseline_fnmr;
  for (const auto& [score, fnmr_total] : audit_results) {
    if (fnmr_total <= cutoff) dist.samples.push_back(score);
  }
  if (dist.samples.size() < 2) {
    throw ValidationError(
        "fit_distribution: fewer than 2 results survive the FNMR filter (" +
        std::to_string(dist.samples.size()) + " of " +
        std::to_string(audit_results.size()) + ")");
  }
  const double sd = sample_stddev(dist.samples);
  if (sd == 0.0) {
    throw ValidationError("fit_distribution: retained scores are all equal, KDE degenerate");
  }
  const double n = double(dist.samples.size());
  dist.bandwidth = 0.5 * sd * std::pow(n, -0.2);
  return dist;
}

double cofair(const FairnessDistribution& dist, double s) {
  if (dist.samples.empty() || !(dist.bandwidth > 0.0)) {
    throw ValidationError("cofair: distribution not fitted");
  }
  double acc = 0.0;
  for (double x : dist.samples) acc += norm_cdf((s - x) / dist.bandwidth);
  const double p = acc / double(dist.samples.size());
  // The mixture CDF is strictly inside (0,1); keep it there when the normal
  // tails round to 0 or 1 in double precision.
  return std::min(std::max(p, std::numeric_limits<double>::denorm_min()),
                  1.0 - std::numeric_limits<double>::epsilon() / 2);
}

double kde_density(const FairnessDistribution& dist, double s) {
  if (dist.samples.empty() || !(dist.bandwidth > 0.0)) {
    throw ValidationError("kde_density: distribution not fitted");
  }
  double acc = 0.0;
  for (double x : dist.samples) acc += norm_pdf((s - x) / dist.bandwidth);
  return acc / (double(dist.samples.size()) * dist.bandwidth);
}

}  // namespace fairprobe
