#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "lamperti/levy_model.hpp"
#include "lamperti/path.hpp"

namespace lamperti {

/// A named test function for ergodic averages.
struct TestFunction {
  std::string name;
  std::function<double(double)> fn;

  double operator()(double x) const { return fn(x); }

  static TestFunction one();
  static TestFunction zero();
  static TestFunction exp_neg();                       // e^{-x}
  static TestFunction indicator(double lo, double hi);  // 1{lo < x < hi}
  static TestFunction inverse();                       // 1/x
  static TestFunction exp_neg_inverse_over_x();        // e^{-1/x}/x
  static TestFunction indicator_over_x(double lo, double hi);

  /// Parses "one", "zero", "exp_neg", "inverse", "exp_neg_inverse_over_x",
  /// "indicator:lo:hi", "indicator_over_x:lo:hi".
  static TestFunction parse(std::string_view spec);
};

struct Stat {
  std::string name;
  double value = 0.0;
  bool gating = false;
  std::string rule;  // e.g. "<=", ">", "monotone"
  double threshold = std::numeric_limits<double>::quiet_NaN();
  bool ok = true;
};

struct ExperimentReport {
  std::string name;
  std::string model;
  nlohmann::json params = nlohmann::json::object();
  std::vector<Stat> stats;
  std::vector<std::string> notes;
  bool pass = false;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;

  void record(std::string stat_name, double value);
  /// Adds a gating statistic; ok must be the outcome of comparing value to threshold.
  void gate(std::string stat_name, double value, std::string rule, double threshold, bool ok);
  const Stat* find(std::string_view stat_name) const;
  double value(std::string_view stat_name) const;
  /// pass = at least one gate and every gate ok.
  void finalize();

  nlohmann::json to_json() const;
  /// Rows "experiment,model,stat,value,rule,threshold,ok" without header.
  std::string to_csv_rows() const;
};

inline constexpr const char* kReportCsvHeader = "experiment,model,stat,value,rule,threshold,ok\n";

/// Every field has an experiment-specific default from default_params().
struct ExperimentParams {
  std::vector<double> t_list;
  std::size_t n_reps = 10000;
  std::size_t n_mc = 10000;  // independent hat I draws for oracle estimates
  double horizon = 0.0;
  std::vector<double> horizons;  // recurrence reporting horizons
  double step = 0.01;
  double rel_tol = 1e-6;
  std::string f = "exp_neg";
  std::string g = "exp_neg";
  double start = 1.0;
  double x = 1.0;
  double epsilon = 0.25;
  double alpha = 0.5;  // normalizer index when the driver is not stable
  double ks_alpha = 1e-3;
  double tolerance = 0.05;
  double mean_tol = 0.10;
  double second_tol = 0.15;
  double var_ratio_max = 0.2;
  double min_fraction = 0.95;

  nlohmann::json to_json() const;
};

struct RunContext {
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

ExperimentParams default_params(std::string_view experiment);

/// Names accepted by run_experiment.
const std::vector<std::string>& registered_experiments();

ExperimentReport run_experiment(std::string_view name, const LevyModel& model, const ExperimentParams& params,
                                const RunContext& ctx);

// Stationarity of V started from hat I: KS of V(t) against fresh hat I draws.
ExperimentReport exp_stationarity(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Cov(f(V(0)), g(V(t))) for the stationary V; gate on the largest t.
ExperimentReport exp_mixing(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Time average of f(V) along one long scene vs Monte Carlo <mu, f>.
ExperimentReport exp_birkhoff(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Ratio of occupation integrals of U from an arbitrary start vs <nu,f>/<nu,g>.
ExperimentReport exp_hopf_ratio(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// T(t)/t^alpha against Mittag-Leffler moments and samples.
ExperimentReport exp_darling_kac(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Var(T(t)/t) shrinking for finite-mean drivers.
ExperimentReport exp_negative_control(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Fraction of U paths entering (x - eps, x + eps) before each horizon.
ExperimentReport exp_recurrence(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Monte Carlo E[1/hat I] against E[xi_1].
ExperimentReport exp_invariant_mass(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Monte Carlo E[hat I^n], n = 1, 2 against the moment recursion.
ExperimentReport exp_moments(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// <nu, 1/x> = 1.
ExperimentReport exp_nu_identity(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Empirical range of stationary V against the support interval.
ExperimentReport exp_support(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Pathwise U(t) = 1/V(T_V(t)) over many paths.
ExperimentReport exp_patie(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Quadrature of int ds/V against ln tilde I(t) - ln tilde I(0).
ExperimentReport exp_additive_functional(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);
// Law of I(t) against the time-reversed integral exp(xi_t) int_0^t exp(-xi_u) du.
ExperimentReport exp_duality(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx);

}  // namespace lamperti
