#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lamperti {

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> sorted;
};

/// Summary of a sample. Accumulates in sorted order, so the result does not
/// depend on the order in which replicates were produced.
SampleSummary summarize(std::span<const double> sample);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test: sup |F_a - F_b| and the asymptotic
/// Kolmogorov p-value with the usual small-sample correction
/// lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) D, ne = nm/(n+m).
/// Values within a relative distance rel_tie of each other count as ties.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double rel_tie = 0.0);

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

/// Sample covariance of paired observations with the standard error of the
/// mean-of-products estimator.
struct CovarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
};
CovarianceEstimate covariance(std::span<const double> x, std::span<const double> y);

}  // namespace lamperti
