#include "lamperti/levy_model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lamperti/error.hpp"

namespace lamperti {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void reject(const std::string& why) { throw Error(ErrorKind::RejectsModel, why); }

void check_stable_index(double alpha) {
  if (!(alpha >= kMinStableIndex && alpha <= kMaxStableIndex)) {
    std::ostringstream os;
    os << "stable index alpha=" << alpha << " outside [" << kMinStableIndex << ", "
       << kMaxStableIndex << "]";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

}  // namespace

double JumpLaw::mean() const {
  switch (kind) {
    case JumpKind::Constant: return param;
    case JumpKind::Exponential: return 1.0 / param;
    case JumpKind::Pareto: return param > 1.0 ? param / (param - 1.0) : kInf;
  }
  return kInf;
}

double JumpLaw::laplace(double q) const {
  switch (kind) {
    case JumpKind::Constant: return std::exp(-q * param);
    case JumpKind::Exponential: return param / (param + q);
    case JumpKind::Pareto: {
      if (q == 0.0) return 1.0;
      // J = U^{-1/k}; integrate over the uniform variable.
      const double k = param;
      auto integrand = [q, k](double u) { return u <= 0.0 ? 0.0 : std::exp(-q * std::pow(u, -1.0 / k)); };
      return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 15, 1e-13);
    }
  }
  return 0.0;
}

double JumpLaw::sample(RandomStream& rng) const {
  switch (kind) {
    case JumpKind::Constant: return param;
    case JumpKind::Exponential: return rng.exponential() / param;
    case JumpKind::Pareto: return std::pow(rng.uniform(), -1.0 / param);
  }
  return 0.0;
}

LevyModel LevyModel::deterministic(double b) {
  LevyModel m;
  m.family = Family::DeterministicDrift;
  m.drift = b;
  return m;
}

LevyModel LevyModel::compound_poisson(double lambda, JumpLaw jumps, double b) {
  LevyModel m;
  m.family = Family::CompoundPoissonDrift;
  m.rate = lambda;
  m.jumps = jumps;
  m.drift = b;
  return m;
}

LevyModel LevyModel::brownian(double sigma, double b) {
  LevyModel m;
  m.family = Family::BrownianDrift;
  m.sigma = sigma;
  m.drift = b;
  return m;
}

LevyModel LevyModel::stable(double alpha, double c) {
  LevyModel m;
  m.family = Family::StableSubordinator;
  m.alpha = alpha;
  m.scale = c;
  return m;
}

LevyModel LevyModel::stable_with_drift(double alpha, double c, double b) {
  LevyModel m = stable(alpha, c);
  m.family = Family::StableSubordinatorDrift;
  m.drift = b;
  return m;
}

bool LevyModel::is_subordinator() const {
  switch (family) {
    case Family::DeterministicDrift: return drift > 0.0;
    case Family::CompoundPoissonDrift: return drift >= 0.0 && jumps.nonnegative();
    case Family::BrownianDrift: return false;
    case Family::StableSubordinator:
    case Family::StableSubordinatorDrift: return drift >= 0.0;
  }
  return false;
}

double LevyModel::linear_drift() const {
  return family == Family::StableSubordinator ? 0.0 : drift;
}

const char* to_string(Family f) noexcept {
  switch (f) {
    case Family::DeterministicDrift: return "DeterministicDrift";
    case Family::CompoundPoissonDrift: return "CompoundPoissonDrift";
    case Family::BrownianDrift: return "BrownianDrift";
    case Family::StableSubordinator: return "StableSubordinator";
    case Family::StableSubordinatorDrift: return "StableSubordinatorDrift";
  }
  return "?";
}

const char* to_string(MeanClass m) noexcept {
  return m == MeanClass::FiniteMeanPositive ? "FiniteMeanPositive" : "InfiniteMean";
}

const char* to_string(JumpKind k) noexcept {
  switch (k) {
    case JumpKind::Constant: return "constant";
    case JumpKind::Exponential: return "exponential";
    case JumpKind::Pareto: return "pareto";
  }
  return "?";
}

std::string LevyModel::id() const {
  std::ostringstream os;
  os.precision(10);
  os << to_string(family) << '(';
  switch (family) {
    case Family::DeterministicDrift: os << "b=" << drift; break;
    case Family::CompoundPoissonDrift:
      os << "lambda=" << rate << ",jump=" << to_string(jumps.kind) << ':' << jumps.param << ",b=" << drift;
      break;
    case Family::BrownianDrift: os << "sigma=" << sigma << ",b=" << drift; break;
    case Family::StableSubordinator: os << "alpha=" << alpha << ",c=" << scale; break;
    case Family::StableSubordinatorDrift: os << "alpha=" << alpha << ",c=" << scale << ",b=" << drift; break;
  }
  os << ')';
  return os.str();
}

MeanClass mean_class(const LevyModel& model) {
  if (model.is_stable()) return MeanClass::InfiniteMean;
  if (model.family == Family::CompoundPoissonDrift && !model.jumps.finite_mean()) return MeanClass::InfiniteMean;
  return MeanClass::FiniteMeanPositive;
}

MeanClass validate(const LevyModel& m) {
  auto finite = [](double v) { return std::isfinite(v); };
  switch (m.family) {
    case Family::DeterministicDrift:
      if (!(m.drift > 0.0)) reject("deterministic drift must be positive, got b=" + std::to_string(m.drift));
      break;
    case Family::CompoundPoissonDrift: {
      if (!finite(m.drift)) reject("drift must be finite");
      if (!(m.rate > 0.0) || !finite(m.rate)) reject("jump rate lambda must be positive");
      const JumpLaw& j = m.jumps;
      switch (j.kind) {
        case JumpKind::Constant:
          if (j.param == 0.0 || !finite(j.param)) reject("constant jump size must be finite and nonzero");
          break;
        case JumpKind::Exponential:
          if (!(j.param > 0.0) || !finite(j.param)) reject("exponential jump rate must be positive");
          break;
        case JumpKind::Pareto:
          if (!(j.param > 0.0) || !finite(j.param)) reject("Pareto index must be positive");
          break;
      }
      // Heavy-tailed jumps are positive (Pareto), so xi drifts to +inf for any drift.
      if (j.finite_mean()) {
        const double mean = m.drift + m.rate * j.mean();
        if (!(mean > 0.0)) {
          std::ostringstream os;
          os << "compound Poisson mean b + lambda*E[J] = " << mean << " is not positive; process does not drift to +inf";
          reject(os.str());
        }
      }
      break;
    }
    case Family::BrownianDrift:
      if (!(m.sigma > 0.0) || !finite(m.sigma)) reject("Brownian volatility must be positive");
      if (!(m.drift > 0.0)) reject("Brownian drift must be positive to drift to +inf, got b=" + std::to_string(m.drift));
      break;
    case Family::StableSubordinatorDrift:
      if (!(m.drift > 0.0) || !finite(m.drift)) reject("stable subordinator drift must be positive");
      [[fallthrough]];
    case Family::StableSubordinator:
      if (!(m.alpha >= kMinStableIndex && m.alpha <= kMaxStableIndex)) {
        std::ostringstream os;
        os << "stable index alpha=" << m.alpha << " outside [" << kMinStableIndex << ", " << kMaxStableIndex << "]";
        reject(os.str());
      }
      if (!(m.scale > 0.0) || !finite(m.scale)) reject("stable scale c must be positive");
      break;
  }
  return mean_class(m);
}

double mean_increment(const LevyModel& m) {
  switch (m.family) {
    case Family::DeterministicDrift:
    case Family::BrownianDrift: return m.drift;
    case Family::CompoundPoissonDrift: return m.drift + m.rate * m.jumps.mean();
    case Family::StableSubordinator:
    case Family::StableSubordinatorDrift: return kInf;
  }
  return kInf;
}

std::optional<double> laplace_exponent(const LevyModel& m, double q) {
  if (!(q >= 0.0)) throw Error(ErrorKind::InvalidArgument, "laplace exponent needs q >= 0");
  if (!m.is_subordinator()) return std::nullopt;
  switch (m.family) {
    case Family::DeterministicDrift: return m.drift * q;
    case Family::CompoundPoissonDrift: return m.drift * q + m.rate * (1.0 - m.jumps.laplace(q));
    case Family::StableSubordinator: return m.scale * std::pow(q, m.alpha);
    case Family::StableSubordinatorDrift: return m.drift * q + m.scale * std::pow(q, m.alpha);
    case Family::BrownianDrift: break;
  }
  return std::nullopt;
}

double sample_positive_stable(double alpha, RandomStream& rng) {
  check_stable_index(alpha);
  const double u = rng.uniform();
  const double e = rng.exponential();
  const double pi = std::numbers::pi;
  // Zolotarev's function A(u) = sin(a pi u)^{a/(1-a)} sin((1-a) pi u) / sin(pi u)^{1/(1-a)}
  const double log_a = alpha / (1.0 - alpha) * std::log(std::sin(alpha * pi * u)) +
                       std::log(std::sin((1.0 - alpha) * pi * u)) -
                       std::log(std::sin(pi * u)) / (1.0 - alpha);
  return std::exp((1.0 - alpha) / alpha * (log_a - std::log(e)));
}

double sample_increment(const LevyModel& m, double dt, RandomStream& rng) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "increment length dt must be positive");
  switch (m.family) {
    case Family::DeterministicDrift: return m.drift * dt;
    case Family::CompoundPoissonDrift: {
      double x = m.drift * dt;
      double clock = rng.exponential() / m.rate;
      while (clock < dt) {
        x += m.jumps.sample(rng);
        clock += rng.exponential() / m.rate;
      }
      return x;
    }
    case Family::BrownianDrift: return m.drift * dt + m.sigma * std::sqrt(dt) * rng.normal();
    case Family::StableSubordinator:
    case Family::StableSubordinatorDrift: {
      const double s = sample_positive_stable(m.alpha, rng);
      return m.linear_drift() * dt + std::pow(m.scale * dt, 1.0 / m.alpha) * s;
    }
  }
  return 0.0;
}

}  // namespace lamperti
