#pragma once

#include <cstdint>

namespace fairprobe {

struct RankingParams {
  double mu = 1.3865;
  double lambda = 4.0;
  double omega = 4.0;
  double fmr = 1e-3;
};

struct RankScore {
  double r_total = 0.0;
  double r_s = 0.0;  // genuine sample retention
  double r_p = 0.0;  // verification error against baseline
  double r_f = 0.0;  // fairness against baseline
};

// Relevance of a candidate assignment: equal-weight mean of the retention,
// error and fairness sigmoids. Anchored so that retaining exactly 1/FMR
// genuine samples scores 0.2 and matching the baselines scores 0.5.
RankScore rank(double retained_genuine, double fnmr_i, double fnmr_0, double fairness_i,
               double fairness_0, const RankingParams& params);

}  // namespace fairprobe
