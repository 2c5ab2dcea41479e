#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "lamperti/error.hpp"
#include "lamperti/processes.hpp"
#include "lamperti/stats.hpp"

using namespace lamperti;

namespace {

const LevyModel kPoisson = LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0));
const ExpFunctional kDet(SkeletonPath{1.0, {}, {}, 50.0});

}  // namespace

TEST_CASE("closed forms on the unit drift") {
  for (double t : {0.0, 0.5, 2.0, 10.0}) {
    CHECK(eval_X(kDet, t, 1.0) == doctest::Approx(1.0 + t).epsilon(1e-13));
    CHECK(eval_U(kDet, t, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(eval_X(kDet, 0.0, 3.0) == 3.0);
  CHECK(eval_U(kDet, 0.0, 0.4) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(eval_V(kDet, 0.0, 2.5) == 2.5);
  CHECK(eval_V(kDet, 1.0, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));

  const StationaryScene sc(1.0, kDet);
  for (double t : {0.0, 1.0, 4.0}) CHECK(eval_U_stationary(sc, t) == doctest::Approx(1.0).epsilon(1e-13));
  for (double t : {1.0, 2.0, 7.5}) CHECK(eval_X_selfsimilar(sc, t) == doctest::Approx(t).epsilon(1e-12));
}

TEST_CASE("U evaluation survives large times") {
  CHECK(eval_U(kDet, 45.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("process values are positive and start where they should") {
  RandomStream rng(1);
  for (const LevyModel& m : {kPoisson, LevyModel::brownian(1.0, 0.5), LevyModel::stable(0.5)}) {
    const ExpFunctional f = [&] {
      ExpFunctional e = simulate_functional(m, 1.0, PathOptions{}, rng);
      ensure_log_range(e, m, 12.0, rng);
      return e;
    }();
    for (double t = 0.0; t < 10.0; t += 0.5) {
      CHECK(eval_X(f, t, 1.3) > 0.0);
      CHECK(eval_U(f, t, 1.3) > 0.0);
      CHECK(eval_V(f, std::min(t, f.horizon()), 0.2) > 0.0);
    }
  }
}

// Heavy-tailed jumps push U far beyond 1, where an absolute gap of 1e-9 is
// below one ulp; compare relative to the size of U there.
TEST_CASE("Patie identity on skeleton paths") {
  RandomStream rng(2);
  const std::vector<LevyModel> models{kPoisson, LevyModel::compound_poisson(2.0, JumpLaw::exponential(1.0), -0.5),
                                      LevyModel::compound_poisson(1.0, JumpLaw::constant(-1.0), 2.0),
                                      LevyModel::compound_poisson(0.5, JumpLaw::pareto(0.8), 0.1),
                                      LevyModel::deterministic(0.7)};
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const LevyModel& m = models[rep % models.size()];
    const double x0 = 0.2 + 0.1 * (rep % 17);
    ExpFunctional f = simulate_functional(m, 1.0, PathOptions{}, rng);
    ensure_log_range(f, m, std::log(std::expm1(2.0) / x0), rng);
    CHECK(patie_identity_check(f, 0.0, x0).abs_diff == 0.0);
    for (double t : {0.5, 1.0, 2.0}) {
      const PatieCheck c = patie_identity_check(f, t, x0);
      worst = std::max(worst, c.abs_diff / std::max(1.0, std::abs(c.lhs)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("Patie identity on a grid path") {
  RandomStream rng(3);
  const LevyModel m = LevyModel::brownian(1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    ExpFunctional f = simulate_functional(m, 1.0, PathOptions{}, rng);
    ensure_log_range(f, m, std::log(std::expm1(1.0)), rng);
    const double tol = 20.0 * f.grid_step() * (1.0 + f.max_abs_xi(f.horizon()));
    CHECK(patie_identity_check(f, 1.0, 1.0).abs_diff < tol);
  }
}

TEST_CASE("stationary U computed two ways") {
  RandomStream rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const double hat = sample_hat_I(kPoisson, HatIOptions{}, rng);
    StationaryScene sc(hat, simulate_functional(kPoisson, 1.0, PathOptions{}, rng));
    sc.extend_for(kPoisson, 5.0, rng);
    CHECK(eval_U_stationary(sc, 0.0) == doctest::Approx(1.0 / hat).epsilon(1e-14));
    for (double t : {0.3, 1.0, 2.5, 5.0})
      CHECK(eval_U_stationary(sc, t) == doctest::Approx(eval_U_stationary_via_V(sc, t)).epsilon(1e-9));
  }
}

TEST_CASE("self-similar X against eval_X") {
  RandomStream rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const double hat = sample_hat_I(kPoisson, HatIOptions{}, rng);
    StationaryScene sc(hat, simulate_functional(kPoisson, 1.0, PathOptions{}, rng));
    sc.extend_for(kPoisson, std::log(20.0), rng);
    CHECK(eval_X_selfsimilar(sc, 1.0) == doctest::Approx(1.0 / hat).epsilon(1e-13));
    for (double t : {1.5, 4.0, 19.0}) {
      const double x = eval_X_selfsimilar(sc, t);
      // shifted by one unit of time and started from 1/hat I
      CHECK(x == doctest::Approx(eval_X(sc.forward(), t - 1.0, 1.0 / hat)).epsilon(1e-9));
      // normalized by its value at 1: X from 1 run on the rescaled clock
      CHECK(x / eval_X_selfsimilar(sc, 1.0) == doctest::Approx(eval_X(sc.forward(), hat * (t - 1.0), 1.0)).epsilon(1e-9));
    }
  }
  const StationaryScene sc(1.0, kDet);
  CHECK_THROWS_AS(eval_X_selfsimilar(sc, 0.5), Error);
}

TEST_CASE("scaling property of X in law") {
  const double c = 2.0, t = 3.0;
  std::vector<double> a(10000), b(10000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    RandomStream r1(6, i), r2(7, i);
    ExpFunctional f1 = simulate_functional(kPoisson, 4.0, PathOptions{}, r1);
    ExpFunctional f2 = simulate_functional(kPoisson, 4.0, PathOptions{}, r2);
    a[i] = c * eval_X(f1, t / c, 1.0);
    b[i] = eval_X(f2, t, c);
  }
  CHECK(ks_two_sample(a, b, 1e-12).p_value > 1e-3);
}

TEST_CASE("X grows linearly for a stable driver") {
  // X(t)/t = U(ln(1+t)) (1+t)/t settles to a nondegenerate law: the samples at
  // t = 1e3 and t = 1e4 agree in distribution, so there is no superlinear drift.
  const LevyModel m = LevyModel::stable(0.5);
  std::vector<double> a(3000), b(3000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    RandomStream r1(8, i), r2(9, i);
    ExpFunctional f1 = simulate_functional(m, 1.0, PathOptions{}, r1);
    ExpFunctional f2 = simulate_functional(m, 1.0, PathOptions{}, r2);
    ensure_log_range(f1, m, std::log(1e3), r1);
    ensure_log_range(f2, m, std::log(1e4), r2);
    auto ratio = [](const ExpFunctional& f, double t) {
      try {
        return eval_X(f, t, 1.0) / t;
      } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::ExponentOverflow);
        return std::numeric_limits<double>::infinity();
      }
    };
    a[i] = ratio(f1, 1e3);
    b[i] = ratio(f2, 1e4);
  }
  CHECK(ks_two_sample(a, b).p_value > 1e-3);
  std::sort(a.begin(), a.end());
  CHECK(std::isfinite(a[a.size() / 2]));
}

TEST_CASE("support trichotomy") {
  const SupportInterval a = support_interval(LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0), 2.0));
  CHECK(a.tag == SupportCase::SubordinatorWithDrift);
  CHECK(a.lower == 0.0);
  CHECK(a.upper == 0.5);
  const SupportInterval b = support_interval(LevyModel::compound_poisson(1.0, JumpLaw::constant(-1.0), 2.0));
  CHECK(b.tag == SupportCase::NoPositiveJumpsWithDrift);
  CHECK(b.lower == 0.5);
  CHECK(std::isinf(b.upper));
  const SupportInterval c = support_interval(LevyModel::brownian(1.0, 1.0));
  CHECK(c.tag == SupportCase::HalfLine);
  CHECK(c.lower == 0.0);
  CHECK(std::isinf(c.upper));
  CHECK(support_interval(LevyModel::stable_with_drift(0.5, 1.0, 4.0)).upper == 0.25);
  CHECK(support_interval(LevyModel::stable(0.5)).tag == SupportCase::HalfLine);
  CHECK(support_interval(kPoisson).tag == SupportCase::HalfLine);
  try {
    support_interval(LevyModel::deterministic(1.0));
    FAIL("expected DegenerateModel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateModel);
  }
}

TEST_CASE("process realizations and trajectory export") {
  RandomStream rng(9);
  const LevyModel det = LevyModel::deterministic(1.0);
  const ProcessRealization u(ProcessKind::OuU, det, 1.0, 5.0, PathOptions{}, HatIOptions{}, rng);
  CHECK(u(0.0) == 1.0);
  CHECK(u(4.0) == doctest::Approx(1.0).epsilon(1e-12));
  std::ostringstream os;
  const std::vector<double> ts{0.0, 2.0};
  write_trajectory_csv(os, u, ts);
  CHECK(os.str() == "t,value\n0,1\n2,1\n");

  for (ProcessKind k : {ProcessKind::LampertiX, ProcessKind::OuU, ProcessKind::GouV, ProcessKind::StationaryU}) {
    const ProcessRealization p(k, kPoisson, 0.8, 20.0, PathOptions{}, HatIOptions{}, rng);
    CHECK(p(0.0) == doctest::Approx(p.start()).epsilon(1e-14));
    for (double t = 0.5; t <= 20.0; t += 0.5) CHECK(p(t) > 0.0);
  }
}
