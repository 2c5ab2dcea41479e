#include "lamperti/oracles.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "lamperti/error.hpp"
#include "lamperti/stats.hpp"

namespace lamperti {

double moment_oracle(const LevyModel& model, int n) {
  if (n < 1 || n > 20) throw Error(ErrorKind::InvalidArgument, "moment order must lie in 1..20");
  validate(model);
  double m = 1.0;
  for (int k = 1; k <= n; ++k) {
    const auto phi = laplace_exponent(model, static_cast<double>(k));
    if (!phi) throw Error(ErrorKind::Unavailable, "no Laplace exponent for " + model.id());
    m *= static_cast<double>(k) / *phi;
  }
  return m;
}

double mean_inverse_hat_I(const LevyModel& model) {
  if (validate(model) == MeanClass::InfiniteMean) return std::numeric_limits<double>::infinity();
  return mean_increment(model);
}

Estimate nu_integral(const NuFunctional& nu, const std::function<double(double)>& f, std::size_t n_draws,
                     std::uint64_t seed, unsigned threads) {
  validate(nu.model);
  std::vector<double> terms(n_draws);
  parallel_for(n_draws, threads, [&](std::size_t i) {
    RandomStream rng(seed, i);
    const double x = 1.0 / sample_hat_I(nu.model, nu.hat_opts, rng);
    terms[i] = x * f(x);
  });
  const SampleSummary s = summarize(terms);
  return Estimate{s.mean, s.std_error};
}

double ml_moment(double alpha, int n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "Mittag-Leffler index must lie in (0,1)");
  if (n < 0 || n > 10) throw Error(ErrorKind::InvalidArgument, "Mittag-Leffler moment order must lie in 0..10");
  if (n == 0) return 1.0;
  return std::tgamma(n + 1.0) / std::tgamma(1.0 + n * alpha);
}

double ml_sample(double alpha, RandomStream& rng) {
  return std::pow(sample_positive_stable(alpha, rng), -alpha);
}

void write_oracle_csv(std::ostream& os, const LevyModel& model, int n_max) {
  const std::string id = '"' + model.id() + '"';
  os << "model,n,value\n";
  const auto old = os.precision(17);
  for (int n = 1; n <= n_max; ++n) os << id << ',' << n << ',' << moment_oracle(model, n) << '\n';
  const double inv = mean_inverse_hat_I(model);
  os << id << ",mean_inverse_hat_I,";
  if (std::isinf(inv)) os << "infinite";
  else os << inv;
  os << '\n';
  os.precision(old);
}

}  // namespace lamperti
