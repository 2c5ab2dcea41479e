#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lamperti/levy_model.hpp"
#include "lamperti/path.hpp"
#include "lamperti/random.hpp"

namespace lamperti {

/// E[hat I^n] = n! / prod_{k=1..n} phi(k). Unavailable without a Laplace exponent.
double moment_oracle(const LevyModel& model, int n);

/// E[1/hat I] = E[xi_1] for integrable xi_1, +inf otherwise (the total mass of nu).
double mean_inverse_hat_I(const LevyModel& model);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// <nu, f> = E[(1/hat I) f(1/hat I)] estimated by Monte Carlo over hat I draws.
struct NuFunctional {
  LevyModel model;
  HatIOptions hat_opts;
};

/// Draw i uses stream (seed, i), so the estimate is independent of `threads`.
Estimate nu_integral(const NuFunctional& nu, const std::function<double(double)>& f, std::size_t n_draws,
                     std::uint64_t seed, unsigned threads = 1);

/// Moments of the Mittag-Leffler law of sigma^{-alpha}: n! / Gamma(1 + n alpha).
double ml_moment(double alpha, int n);

/// One Mittag-Leffler(alpha) draw, sigma^{-alpha} with sigma positive stable.
double ml_sample(double alpha, RandomStream& rng);

/// Power-law normalizers a(t) = t^alpha and b(t) = t^{1/alpha}. With a stable
/// driver of scale c, T(t)/a(t) converges to sigma^{-alpha} / c.
struct Normalizers {
  double alpha = 0.5;
  double scale = 1.0;

  double a(double t) const { return std::pow(t, alpha); }
  double b(double t) const { return std::pow(t, 1.0 / alpha); }
  double limit_scale() const { return 1.0 / scale; }
};

/// Rows "model,n,value" for n = 1..n_max, then "model,mean_inverse_hat_I,value"
/// where value is "infinite" for infinite-mean drivers.
void write_oracle_csv(std::ostream& os, const LevyModel& model, int n_max);

}  // namespace lamperti
