#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lamperti/error.hpp"
#include "lamperti/levy_model.hpp"
#include "lamperti/stats.hpp"

using namespace lamperti;

namespace {

bool rejects(const LevyModel& m) {
  try {
    validate(m);
  } catch (const Error& e) {
    return e.kind() == ErrorKind::RejectsModel;
  }
  return false;
}

std::vector<LevyModel> subordinators() {
  return {LevyModel::deterministic(2.0),
          LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0)),
          LevyModel::compound_poisson(2.0, JumpLaw::exponential(1.5), 0.3),
          LevyModel::stable(0.3),
          LevyModel::stable(0.5),
          LevyModel::stable(0.7),
          LevyModel::stable_with_drift(0.5, 1.0, 0.5)};
}

}  // namespace

TEST_CASE("validate classifies integrability") {
  CHECK(validate(LevyModel::deterministic(1.0)) == MeanClass::FiniteMeanPositive);
  CHECK(validate(LevyModel::stable(0.5)) == MeanClass::InfiniteMean);
  CHECK(validate(LevyModel::stable_with_drift(0.5, 1.0, 1.0)) == MeanClass::InfiniteMean);
  CHECK(validate(LevyModel::compound_poisson(1.0, JumpLaw::pareto(0.8))) == MeanClass::InfiniteMean);
  CHECK(validate(LevyModel::compound_poisson(1.0, JumpLaw::pareto(2.5))) == MeanClass::FiniteMeanPositive);
  CHECK(validate(LevyModel::brownian(1.0, 0.7)) == MeanClass::FiniteMeanPositive);
}

TEST_CASE("validate rejects models that do not drift to +infinity") {
  CHECK(rejects(LevyModel::brownian(1.0, -0.3)));
  CHECK(rejects(LevyModel::brownian(1.0, 0.0)));
  CHECK(rejects(LevyModel::deterministic(0.0)));
  CHECK(rejects(LevyModel::compound_poisson(1.0, JumpLaw::constant(-1.0), 0.5)));
  CHECK(rejects(LevyModel::compound_poisson(1.0, JumpLaw::constant(0.0), 0.0)));
  CHECK(rejects(LevyModel::stable(0.0)));
  CHECK(rejects(LevyModel::stable(1.0)));
  CHECK(rejects(LevyModel::stable(0.99)));
  CHECK(rejects(LevyModel::stable(0.5, -1.0)));
  CHECK_FALSE(rejects(LevyModel::compound_poisson(1.0, JumpLaw::constant(-1.0), 2.0)));
}

TEST_CASE("laplace exponent examples") {
  CHECK(*laplace_exponent(LevyModel::deterministic(2.0), 3.0) == doctest::Approx(6.0));
  CHECK(*laplace_exponent(LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0)), 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(*laplace_exponent(LevyModel::stable(0.5), 4.0) == doctest::Approx(2.0));
  CHECK_FALSE(laplace_exponent(LevyModel::brownian(1.0, 1.0), 1.0).has_value());
  CHECK_FALSE(laplace_exponent(LevyModel::compound_poisson(1.0, JumpLaw::constant(-1.0), 2.0), 1.0).has_value());
}

TEST_CASE("laplace exponent is zero at zero, increasing and concave") {
  for (const auto& m : subordinators()) {
    CAPTURE(m.id());
    CHECK(*laplace_exponent(m, 0.0) == doctest::Approx(0.0));
    double prev = 0.0, prev_slope = INFINITY;
    for (int i = 1; i <= 40; ++i) {
      const double q = 0.25 * i;
      const double v = *laplace_exponent(m, q);
      const double slope = (v - prev) / 0.25;
      CHECK(v > prev);
      CHECK(slope <= prev_slope * (1.0 + 1e-9));
      prev = v;
      prev_slope = slope;
    }
  }
}

TEST_CASE("Pareto jump Laplace transform against closed form for index 1") {
  // E exp(-qJ) for P(J > x) = 1/x on x >= 1 is q*Gamma(-1, q) = e^{-q} - q E1(q).
  const JumpLaw j = JumpLaw::pareto(1.0);
  const double q = 0.7;
  // E1(q) = -Ei(-q)
  const double expected = std::exp(-q) + q * std::expint(-q);
  CHECK(j.laplace(q) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("sample_increment examples") {
  RandomStream rng(3);
  CHECK(sample_increment(LevyModel::deterministic(2.0), 0.5, rng) == 1.0);
  const LevyModel cp = LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0));
  const auto s = testing::mc(100000, 5, [&](RandomStream& r) { return sample_increment(cp, 0.01, r) == 0.0 ? 1.0 : 0.0; });
  CHECK(testing::within_se(s, std::exp(-0.01)));
}

TEST_CASE("stable increments scale as dt^{1/alpha}") {
  // Same stream state gives dt^{1/alpha} times the unit draw.
  const LevyModel m = LevyModel::stable(0.5);
  RandomStream a(11), b(11);
  const double unit = sample_increment(m, 1.0, a);
  const double small = sample_increment(m, 0.25, b);
  CHECK(small == doctest::Approx(unit * 0.0625).epsilon(1e-12));
}

TEST_CASE("positive stable Laplace transform") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    for (double lambda : {0.5, 1.0, 2.0}) {
      CAPTURE(alpha);
      CAPTURE(lambda);
      const auto s = testing::mc(100000, 17, [&](RandomStream& r) {
        const double x = sample_positive_stable(alpha, r);
        REQUIRE(x > 0.0);
        return std::exp(-lambda * x);
      });
      CHECK(testing::within_se(s, std::exp(-std::pow(lambda, alpha))));
    }
  }
  const auto s2 = testing::mc(100000, 19, [](RandomStream& r) { return std::exp(-2.0 * sample_positive_stable(0.5, r)); });
  CHECK(testing::within_se(s2, 0.243117));
}

TEST_CASE("empirical Laplace transform of increments matches exp(-dt phi(q))") {
  const double dt = 0.7;
  for (const auto& m : subordinators()) {
    for (double q : {0.5, 1.0, 2.0}) {
      CAPTURE(m.id());
      CAPTURE(q);
      const auto s = testing::mc(40000, 23, [&](RandomStream& r) { return std::exp(-q * sample_increment(m, dt, r)); });
      const double target = std::exp(-dt * *laplace_exponent(m, q));
      if (s.std_error == 0.0) CHECK(s.mean == doctest::Approx(target).epsilon(1e-12));
      else CHECK(testing::within_se(s, target));
    }
  }
}

TEST_CASE("increments over dt agree in law with two half-step increments") {
  std::vector<LevyModel> models = subordinators();
  models.push_back(LevyModel::brownian(1.0, 0.5));
  models.push_back(LevyModel::compound_poisson(1.0, JumpLaw::constant(-1.0), 2.0));
  for (const auto& m : models) {
    if (m.is_pure_drift()) continue;
    CAPTURE(m.id());
    RandomStream r1(29), r2(31);
    std::vector<double> whole(10000), halves(10000);
    for (auto& w : whole) w = sample_increment(m, 1.0, r1);
    for (auto& h : halves) h = sample_increment(m, 0.5, r2) + sample_increment(m, 0.5, r2);
    // atoms (compound Poisson with no jump) are exact sums; tolerate rounding ties
    CHECK(ks_two_sample(whole, halves, 1e-12).p_value > 1e-3);
  }
}

TEST_CASE("mean increment and ids") {
  CHECK(mean_increment(LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0))) == 1.0);
  CHECK(mean_increment(LevyModel::brownian(1.0, 0.7)) == doctest::Approx(0.7));
  CHECK(std::isinf(mean_increment(LevyModel::stable(0.5))));
  CHECK(LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0)).id() == "CompoundPoissonDrift(lambda=1,jump=constant:1,b=0)");
}
