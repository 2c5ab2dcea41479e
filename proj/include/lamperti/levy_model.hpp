#pragma once

#include <optional>
#include <string>

#include "lamperti/random.hpp"

namespace lamperti {

enum class Family {
  DeterministicDrift,
  CompoundPoissonDrift,
  BrownianDrift,
  StableSubordinator,
  StableSubordinatorDrift,
};

enum class MeanClass { FiniteMeanPositive, InfiniteMean };

enum class JumpKind { Constant, Exponential, Pareto };

/// Jump-size law of a compound Poisson driver.
///   Constant(v):     J == v (any nonzero sign)
///   Exponential(r):  J ~ Exp(rate r)
///   Pareto(k):       P(J > x) = x^{-k} for x >= 1; infinite mean when k <= 1
struct JumpLaw {
  JumpKind kind = JumpKind::Constant;
  double param = 1.0;

  static JumpLaw constant(double v) { return {JumpKind::Constant, v}; }
  static JumpLaw exponential(double rate) { return {JumpKind::Exponential, rate}; }
  static JumpLaw pareto(double index) { return {JumpKind::Pareto, index}; }

  bool nonnegative() const { return kind != JumpKind::Constant || param >= 0.0; }
  bool nonpositive() const { return kind == JumpKind::Constant && param <= 0.0; }
  bool finite_mean() const { return kind != JumpKind::Pareto || param > 1.0; }
  /// E[J]; +inf for heavy-tailed Pareto.
  double mean() const;
  /// E[exp(-q J)] for q >= 0.
  double laplace(double q) const;
  double sample(RandomStream& rng) const;
};

/// Parametric Lévy process that drifts to +infinity. Immutable value type;
/// build through the named constructors and call validate() before use.
struct LevyModel {
  Family family = Family::DeterministicDrift;
  double drift = 0.0;   // b
  double rate = 0.0;    // lambda (compound Poisson)
  JumpLaw jumps;        // compound Poisson jump law
  double sigma = 0.0;   // Brownian volatility
  double alpha = 0.5;   // stable index
  double scale = 1.0;   // stable scale c: E exp(-q S_1) = exp(-c q^alpha)

  static LevyModel deterministic(double b);
  static LevyModel compound_poisson(double lambda, JumpLaw jumps, double b = 0.0);
  static LevyModel brownian(double sigma, double b);
  static LevyModel stable(double alpha, double c = 1.0);
  static LevyModel stable_with_drift(double alpha, double c, double b);

  bool finite_activity() const {
    return family == Family::DeterministicDrift || family == Family::CompoundPoissonDrift;
  }
  bool is_stable() const {
    return family == Family::StableSubordinator || family == Family::StableSubordinatorDrift;
  }
  bool is_subordinator() const;
  bool is_pure_drift() const { return family == Family::DeterministicDrift; }

  /// Effective linear drift per unit time (0 for the driftless stable family).
  double linear_drift() const;

  /// Short human-readable id, e.g. "CompoundPoissonDrift(lambda=1,jump=constant:1,b=0)".
  std::string id() const;
};

const char* to_string(Family f) noexcept;
const char* to_string(MeanClass m) noexcept;
const char* to_string(JumpKind k) noexcept;

/// Checks that the model drifts to +infinity; throws Error(RejectsModel)
/// with the reason otherwise. Returns the integrability class of xi_1.
MeanClass validate(const LevyModel& model);

MeanClass mean_class(const LevyModel& model);

/// E[xi_1]; +inf for infinite-mean models.
double mean_increment(const LevyModel& model);

/// phi(q) with E[exp(-q xi_t)] = exp(-t phi(q)); nullopt for non-subordinators.
std::optional<double> laplace_exponent(const LevyModel& model, double q);

/// One exact draw of xi_{t+dt} - xi_t.
double sample_increment(const LevyModel& model, double dt, RandomStream& rng);

/// Positive alpha-stable draw with E exp(-l S) = exp(-l^alpha), by Kanter's
/// representation S = (A(U)/E)^{(1-alpha)/alpha}.
double sample_positive_stable(double alpha, RandomStream& rng);

inline constexpr double kMinStableIndex = 0.05;
inline constexpr double kMaxStableIndex = 0.95;

}  // namespace lamperti
