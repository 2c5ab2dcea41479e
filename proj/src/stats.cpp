#include "lamperti/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lamperti/error.hpp"

namespace lamperti {

SampleSummary summarize(std::span<const double> sample) {
  SampleSummary s;
  s.n = sample.size();
  if (s.n == 0) return s;
  s.sorted.assign(sample.begin(), sample.end());
  std::sort(s.sorted.begin(), s.sorted.end());
  s.min = s.sorted.front();
  s.max = s.sorted.back();
  // Welford over the sorted sample
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : s.sorted) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  s.mean = mean;
  s.variance = s.n > 1 ? m2 / static_cast<double>(s.n - 1) : 0.0;
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.n));
  return s;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double rel_tie) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InvalidArgument, "KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  auto is_nan = [](double v) { return std::isnan(v); };
  if (std::any_of(x.begin(), x.end(), is_nan) || std::any_of(y.begin(), y.end(), is_nan))
    throw Error(ErrorKind::InvalidArgument, "KS test sample contains NaN");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v0 = std::min(x[i], y[j]);
    const double v = std::isfinite(v0) ? v0 + rel_tie * std::abs(v0) : v0;
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = std::sqrt(n * m / (n + m));
  return KsResult{d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

CovarianceEstimate covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "covariance needs paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  // Cov = mean of centered products; its SE is the SE of that mean.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = (x[i] - mx) * (y[i] - my);
    const double d = p - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (p - mean);
  }
  const double cov = mean * n / (n - 1.0);
  return CovarianceEstimate{cov, std::sqrt(m2 / (n - 1.0) / n)};
}

}  // namespace lamperti
