#include <doctest.h>

#include <cmath>

#include "lamperti/random.hpp"
#include "lamperti/stats.hpp"

using namespace lamperti;

TEST_CASE("summary fields are consistent") {
  const std::vector<double> xs{3.0, 1.0, 2.0, 6.0};
  const SampleSummary s = summarize(xs);
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.variance == doctest::Approx(14.0 / 3.0));
  CHECK(s.std_error == doctest::Approx(std::sqrt(14.0 / 3.0 / 4.0)));
  CHECK(s.min == 1.0);
  CHECK(s.max == 6.0);
  CHECK(s.sorted == std::vector<double>{1.0, 2.0, 3.0, 6.0});
  const std::vector<double> shuffled{6.0, 2.0, 3.0, 1.0};
  CHECK(summarize(shuffled).mean == s.mean);
}

TEST_CASE("Kolmogorov survival function") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967).epsilon(1e-6));
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0494).epsilon(2e-3));
  CHECK(kolmogorov_q(1.95) == doctest::Approx(0.001).epsilon(0.05));
}

TEST_CASE("KS on identical samples") {
  const std::vector<double> xs{0.3, 0.1, 0.7, 0.7};
  const KsResult r = ks_two_sample(xs, xs);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("KS statistic by hand") {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{2.5, 3.5};
  // F_a(2) = 2/3, F_b(2) = 0
  CHECK(ks_two_sample(a, b).statistic == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("KS calibration on uniforms") {
  int accepted = 0;
  const int reps = 200;
  for (int k = 0; k < reps; ++k) {
    RandomStream r1(100, k), r2(200, k);
    std::vector<double> a(10000), b(10000);
    for (auto& v : a) v = r1.uniform();
    for (auto& v : b) v = r2.uniform();
    if (ks_two_sample(a, b).p_value > 1e-3) ++accepted;
  }
  CHECK(accepted >= 0.99 * reps);
}

TEST_CASE("KS detects a shift") {
  RandomStream r1(1), r2(2);
  std::vector<double> a(10000), b(10000);
  for (auto& v : a) v = r1.uniform();
  for (auto& v : b) v = 0.5 + r2.uniform();
  CHECK(ks_two_sample(a, b).p_value < 1e-6);
}

TEST_CASE("relative ties") {
  const std::vector<double> a{1.0, 2.0}, b{1.0 + 1e-15, 2.0 - 1e-15};
  CHECK(ks_two_sample(a, b).statistic > 0.0);
  CHECK(ks_two_sample(a, b, 1e-12).statistic == 0.0);
}

TEST_CASE("covariance") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0}, y{2.0, 4.0, 6.0, 8.0}, c{5.0, 5.0, 5.0, 5.0};
  CHECK(covariance(x, y).value == doctest::Approx(2.0 * 5.0 / 3.0));
  CHECK(covariance(x, c).value == 0.0);
  CHECK(covariance(x, c).std_error == 0.0);
}

TEST_CASE("KS handles infinite values and rejects NaN") {
  const std::vector<double> a{1.0, INFINITY, 2.0}, b{INFINITY, 1.5, 3.0};
  CHECK(ks_two_sample(a, b).statistic == doctest::Approx(1.0 / 3.0));
  CHECK(ks_two_sample(a, b, 1e-12).statistic == doctest::Approx(1.0 / 3.0));
  const std::vector<double> c{1.0, std::nan("")};
  CHECK_THROWS(ks_two_sample(a, c));
}
