#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace fairprobe {

inline double norm_pdf(double z) {
  static const double kInvSqrt2Pi = 0.3989422804014326779;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Standard normal CDF via erfc; relative error is at the level of the libm
// erfc implementation (well below 1e-12 over the useful range).
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

// Inverse standard normal CDF, Wichura's AS 241 (PPND16). Accurate to about
// 1e-15 for p in (0,1).
double norm_ppf(double p);

double mean(std::span<const double> xs);

// Unbiased (n-1) standard deviation; returns 0 for n < 2.
double sample_stddev(std::span<const double> xs);

}  // namespace fairprobe
