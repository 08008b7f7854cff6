#include "fairprobe/ranking.hpp"

#include <cmath>
#include <limits>

namespace fairprobe {
namespace {

inline double sigmoid(double x) {
  const double v = 1.0 / (1.0 + std::exp(-x));
  // strictly inside (0,1) even when exp underflows
  return std::min(std::max(v, std::numeric_limits<double>::denorm_min()),
                  1.0 - std::numeric_limits<double>::epsilon() / 2);
}

}  // namespace

RankScore rank(double retained_genuine, double fnmr_i, double fnmr_0, double fairness_i,
               double fairness_0, const RankingParams& params) {
  RankScore s;
  // ln(4) at full precision: the (ln 4 - mu) gap is ~ -2.06e-4 and the sign
  // matters for the retention slope.
  const double ln4 = std::log(4.0);
  s.r_s = sigmoid(-(params.fmr * retained_genuine * (ln4 - params.mu)) - params.mu);
  s.r_p = sigmoid(params.lambda * (fnmr_0 - fnmr_i));
  s.r_f = sigmoid(params.omega * (fairness_i - fairness_0));
  s.r_total = (s.r_s + s.r_p + s.r_f) / 3.0;
  return s;
}

}  // namespace fairprobe
