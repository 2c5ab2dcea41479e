#pragma once

#include <cmath>
#include <limits>

namespace lamperti::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln(e^a + e^b)
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// ln( (e^{b u} - 1) / b ), i.e. the log of int_0^u e^{b r} dr; ln u when b == 0.
inline double log_exp_integral(double b, double u) {
  if (!(u > 0.0)) return kNegInf;
  if (b == 0.0) return std::log(u);
  const double x = b * u;
  if (b > 0.0) return x + std::log(-std::expm1(-x)) - std::log(b);
  return std::log(-std::expm1(x)) - std::log(-b);
}

/// Inverse of the map u -> int_0^u e^{b r} dr evaluated at y = e^{log_y}.
inline double inverse_exp_integral_log(double b, double log_y) {
  if (log_y == kNegInf) return 0.0;
  if (b == 0.0) return std::exp(log_y);
  const double z = std::log(std::abs(b)) + log_y;  // ln |b y|
  if (b > 0.0) return (z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) / b;
  if (z >= 0.0) return std::numeric_limits<double>::infinity();
  return std::log1p(-std::exp(z)) / b;
}

}  // namespace lamperti::detail

namespace lamperti::detail {

/// ln(e^t - 1) for t > 0.
inline double log_expm1(double t) { return t > 30.0 ? t + std::log1p(-std::exp(-t)) : std::log(std::expm1(t)); }

}  // namespace lamperti::detail
