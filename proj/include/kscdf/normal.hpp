#pragma once

namespace kscdf {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kSqrt2 = 1.41421356237309504880168872421;

double normal_pdf(double x);
double normal_cdf(double x);

// Standard normal quantile, Wichura's AS 241 (PPND16) rational
// approximation; relative accuracy about 1e-16 over (0, 1).
double normal_quantile(double p);

}  // namespace kscdf
