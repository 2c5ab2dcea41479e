#include <doctest.h>

#include <cmath>

#include "lamperti/error.hpp"
#include "lamperti/experiments.hpp"

using namespace lamperti;

namespace {

const LevyModel kPoisson = LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0));
const LevyModel kStable = LevyModel::stable(0.5);
const RunContext kCtx{2024, 1};

ExperimentParams small(const char* name, std::size_t n) {
  ExperimentParams p = default_params(name);
  p.n_reps = n;
  p.n_mc = n;
  return p;
}

}  // namespace

TEST_CASE("test function parsing") {
  CHECK(TestFunction::parse("exp_neg")(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(TestFunction::parse("indicator:0.5:2")(1.0) == 1.0);
  CHECK(TestFunction::parse("indicator:0.5:2")(2.0) == 0.0);
  CHECK(TestFunction::parse("indicator_over_x:0.5:2")(1.0) == 1.0);
  CHECK(TestFunction::parse("indicator_over_x:0.5:2")(0.25) == 0.0);
  CHECK(TestFunction::parse("exp_neg_inverse_over_x")(2.0) == doctest::Approx(std::exp(-0.5) / 2.0));
  CHECK_THROWS_AS(TestFunction::parse("sin"), Error);
  CHECK_THROWS_AS(TestFunction::parse("indicator:1"), Error);
}

TEST_CASE("verdict is a pure function of gates") {
  ExperimentReport r;
  r.record("x", 1.0);
  r.finalize();
  CHECK_FALSE(r.pass);
  r.gate("y", 0.1, "<", 0.2, true);
  r.finalize();
  CHECK(r.pass);
  r.gate("z", 0.3, "<", 0.2, false);
  r.finalize();
  CHECK_FALSE(r.pass);
  CHECK(r.value("y") == 0.1);
  CHECK(r.find("missing") == nullptr);
  r.record("bad", std::nan(""));
  r.record("big", INFINITY);
  const auto j = r.to_json();
  CHECK(j["verdict"] == "fail");
  CHECK(j["stats"][3]["value"] == "nan");
  CHECK(j["stats"][4]["value"] == "inf");
  CHECK(r.to_csv_rows().find(",y,0.10000000000000001,<,0.20000000000000001,true\n") != std::string::npos);
}

TEST_CASE("deterministic drift is stationary with KS statistic 0") {
  const ExperimentReport r = exp_stationarity(LevyModel::deterministic(1.0), small("stationarity", 500), kCtx);
  CHECK(r.value("ks_statistic[t=1]") == 0.0);
  CHECK(r.value("ks_statistic[t=5]") == 0.0);
  CHECK(r.pass);
}

TEST_CASE("mixing trivial cases") {
  ExperimentParams p = small("mixing", 2000);
  p.g = "one";
  const ExperimentReport flat = exp_mixing(kPoisson, p, kCtx);
  for (double t : p.t_list) CHECK(flat.value("covariance[t=" + std::to_string(static_cast<int>(t)) + "]") == 0.0);
  p.g = "exp_neg";
  const ExperimentReport r = exp_mixing(kPoisson, p, kCtx);
  CHECK(r.value("covariance[t=0]") > 10.0 * r.value("covariance_se[t=0]"));
}

TEST_CASE("Birkhoff with f = 1 averages to one") {
  ExperimentParams p = small("birkhoff", 200);
  p.f = "one";
  p.horizon = 100.0;
  const ExperimentReport r = exp_birkhoff(kPoisson, p, kCtx);
  CHECK(r.value("time_average") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.pass);
}

TEST_CASE("Hopf ratio with f = g is one") {
  ExperimentParams p = small("hopf-ratio", 5);
  p.f = p.g = "exp_neg_inverse_over_x";
  p.horizon = 50.0;
  const ExperimentReport r = exp_hopf_ratio(kPoisson, p, kCtx);
  CHECK(r.value("ratio") == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Hopf denominator with g = 1/x is the V clock") {
  ExperimentParams p = small("hopf-ratio", 5);
  p.horizon = 50.0;
  const ExperimentReport r = exp_hopf_ratio(kPoisson, p, kCtx);
  CHECK(r.value("max_rel_gap_denominator_vs_T") < 1e-9);
}

TEST_CASE("negative control") {
  const ExperimentReport det = exp_negative_control(LevyModel::deterministic(1.0), small("negative-control", 200), kCtx);
  CHECK(det.value("variance[t=1000]") == 0.0);
  CHECK(det.value("variance_ratio") == 0.0);
  CHECK(det.value("mean[t=1000]") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(det.pass);
  const ExperimentReport st = exp_negative_control(kStable, small("negative-control", 50), kCtx);
  CHECK_FALSE(st.pass);
}

TEST_CASE("Darling-Kac and the negative control exclude each other") {
  const ExperimentReport dk_p = exp_darling_kac(kPoisson, small("darling-kac", 1000), kCtx);
  const ExperimentReport nc_p = exp_negative_control(kPoisson, small("negative-control", 1000), kCtx);
  CHECK_FALSE(dk_p.pass);
  CHECK(nc_p.pass);
  CHECK_FALSE(dk_p.notes.empty());
  const ExperimentReport dk_s = exp_darling_kac(kStable, small("darling-kac", 1000), kCtx);
  const ExperimentReport nc_s = exp_negative_control(kStable, small("negative-control", 100), kCtx);
  CHECK(dk_s.pass);
  CHECK_FALSE(nc_s.pass);
}

TEST_CASE("first-passage reference is Mittag-Leffler distributed") {
  // the coupled reference T(t) is compared with must itself be an exact ML sample
  ExperimentParams p = small("darling-kac", 4000);
  p.t_list = {30.0};
  const ExperimentReport r = exp_darling_kac(kStable, p, kCtx);
  CHECK(r.value("ks_vs_coupled_ml[t=30]") < 0.02);
  CHECK(r.value("ks_vs_ml_sample[t=30]") < 0.05);
}

TEST_CASE("recurrence preconditions") {
  ExperimentParams p = small("recurrence", 10);
  CHECK_THROWS_AS(exp_recurrence(LevyModel::deterministic(1.0), p, kCtx), Error);
  try {
    exp_recurrence(LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0), 2.0), p, kCtx);
    FAIL("expected InvalidTarget");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidTarget);
  }
  p.x = 4.0;
  CHECK(exp_recurrence(LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0), 2.0), p, kCtx).name == "recurrence");
}

TEST_CASE("recurrence fractions are nondecreasing in the horizon") {
  const ExperimentReport r = exp_recurrence(LevyModel::brownian(1.0, 1.0), small("recurrence", 200), kCtx);
  CHECK(r.value("hit_fraction[t=25]") <= r.value("hit_fraction[t=50]"));
  CHECK(r.value("hit_fraction[t=100]") <= r.value("hit_fraction[t=200]"));
  CHECK(r.value("hit_fraction[t=200]") >= 0.95);
}

TEST_CASE("reports do not depend on the thread count") {
  for (const std::string& name : {"stationarity", "moments", "hopf-ratio", "darling-kac"}) {
    CAPTURE(name);
    ExperimentParams p = small(name.c_str(), name == "hopf-ratio" ? 4 : 300);
    if (name == "hopf-ratio") p.horizon = 100.0;
    const ExperimentParams q = p;
    const LevyModel& m = name == "darling-kac" ? kStable : kPoisson;
    auto a = run_experiment(name, m, p, RunContext{5, 1}).to_json();
    auto b = run_experiment(name, m, q, RunContext{5, 3}).to_json();
    a.erase("runtime_s");
    b.erase("runtime_s");
    CHECK(a.dump() == b.dump());
  }
}

TEST_CASE("every registered experiment runs at small scale") {
  for (const std::string& name : registered_experiments()) {
    CAPTURE(name);
    ExperimentParams p = small(name.c_str(), 20);
    if (p.horizon > 100.0) p.horizon = 100.0;
    const ExperimentReport r = run_experiment(name, kPoisson, p, kCtx);
    CHECK(r.name == name);
    CHECK(r.model == kPoisson.id());
    CHECK(r.seed == kCtx.seed);
    CHECK(r.params["n_reps"] == 20);
  }
  CHECK_THROWS_AS(run_experiment("nope", kPoisson, ExperimentParams{}, kCtx), Error);
}

TEST_CASE("support checks hold for the three cases") {
  for (const LevyModel& m : {LevyModel::compound_poisson(1.0, JumpLaw::constant(1.0), 2.0),
                             LevyModel::compound_poisson(1.0, JumpLaw::constant(-1.0), 2.0),
                             LevyModel::brownian(1.0, 1.0)}) {
    CAPTURE(m.id());
    CHECK(exp_support(m, small("support", 2000), kCtx).pass);
  }
}

TEST_CASE("duality of the forward and reversed functionals") {
  CHECK(exp_duality(LevyModel::compound_poisson(2.0, JumpLaw::exponential(1.0), -0.5), small("duality", 4000), kCtx).pass);
  CHECK(exp_duality(LevyModel::brownian(1.0, 0.5), small("duality", 4000), kCtx).pass);
}
