#include "lamperti/processes.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <vector>
#include <ostream>

#include "lamperti/detail/logmath.hpp"
#include "lamperti/error.hpp"

namespace lamperti {

using detail::kNegInf;
using detail::log_add_exp;
using detail::log_expm1;

namespace {

double checked_exp(double x, const char* what) {
  if (x > kExponentCap) throw Error(ErrorKind::ExponentOverflow, what);
  return std::exp(x);
}

void check_start(double x0) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw Error(ErrorKind::InvalidArgument, "starting point must be positive");
}

void check_t(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "time must be finite and nonnegative");
}

// ln of the I-level needed to evaluate U up to time t from u0.
double u_log_level(double t, double u0) { return log_expm1(t) - std::log(u0); }

}  // namespace

double eval_X(const ExpFunctional& expf, double t, double x0) {
  check_start(x0);
  check_t(t);
  if (t == 0.0) return x0;
  const double s = expf.tau_log(std::log(t) - std::log(x0));
  return checked_exp(std::log(x0) + expf.xi(s), "X(t) exceeds double range");
}

double eval_U(const ExpFunctional& expf, double t, double u0) {
  check_start(u0);
  check_t(t);
  if (t == 0.0) return u0;
  const double s = expf.tau_log(u_log_level(t, u0));
  return checked_exp(std::log(u0) - t + expf.xi(s), "U(t) exceeds double range");
}

double eval_V(const ExpFunctional& expf, double t, double v0) {
  if (!(v0 >= 0.0)) throw Error(ErrorKind::InvalidArgument, "V(0) must be nonnegative");
  check_t(t);
  const double log_v0 = v0 > 0.0 ? std::log(v0) : kNegInf;
  return checked_exp(log_add_exp(log_v0, expf.log_I(t)) - expf.xi(t), "V(t) exceeds double range");
}

double eval_U_stationary(const StationaryScene& scene, double t) {
  check_t(t);
  const double s = scene.T(t);
  return checked_exp(scene.forward().xi(s) - scene.log_hat_I() - t, "tilde U(t) exceeds double range");
}

double eval_U_stationary_via_V(const StationaryScene& scene, double t) {
  return 1.0 / eval_V(scene.forward(), scene.T(t), scene.hat_I());
}

PatieCheck patie_identity_check(const ExpFunctional& expf, double t, double x0) {
  check_start(x0);
  check_t(t);
  const double lhs = eval_U(expf, t, x0);

  const double log_v0 = -std::log(x0);
  auto inv_v = [&](std::size_t k, double u) {
    const Segment s = expf.segment(k);
    return std::exp(s.xi0 + s.slope * u - log_add_exp(log_v0, expf.log_I_in_segment(k, u)));
  };
  auto integrate = [&](std::size_t k, double a, double b) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        [&](double u) { return inv_v(k, u); }, a, b, 10, 1e-13);
  };
  // T_V is kept as (segment, offset): after a large jump the offset can be far
  // below the resolution of the absolute time t0 + u.
  std::size_t seg_v = 0;
  double off_v = 0.0;
  if (t > 0.0) {
    double acc = 0.0;
    bool found = false;
    for (std::size_t k = 0; k < expf.segment_count() && !found; ++k) {
      const std::vector<double> pts = segment_breakpoints(expf, k, log_v0, expf.segment(k).t1 - expf.segment(k).t0);
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double g = integrate(k, pts[i], pts[i + 1]);
        if (acc + g < t) {
          acc += g;
          continue;
        }
        auto residual = [&](double u) { return acc + integrate(k, pts[i], u) - t; };
        std::uintmax_t iters = 200;
        const auto bracket = boost::math::tools::toms748_solve(residual, pts[i], pts[i + 1], residual(pts[i]),
                                                               residual(pts[i + 1]),
                                                               boost::math::tools::eps_tolerance<double>(52), iters);
        seg_v = k;
        off_v = 0.5 * (bracket.first + bracket.second);
        found = true;
        break;
      }
    }
    if (!found) throw Error(ErrorKind::OutOfRange, "path too short for the requested U time");
  }
  const Segment sv = expf.segment(seg_v);
  const double rhs = std::exp(sv.xi0 + sv.slope * off_v - log_add_exp(log_v0, expf.log_I_in_segment(seg_v, off_v)));
  return PatieCheck{lhs, rhs, std::abs(lhs - rhs)};
}

double eval_X_selfsimilar(const StationaryScene& scene, double t) {
  if (!(t >= 1.0)) throw Error(ErrorKind::DomainRestricted, "self-similar X is only available for t >= 1");
  return t * eval_U_stationary(scene, std::log(t));
}

const char* to_string(SupportCase c) noexcept {
  switch (c) {
    case SupportCase::SubordinatorWithDrift: return "SubordinatorWithDrift";
    case SupportCase::NoPositiveJumpsWithDrift: return "NoPositiveJumpsWithDrift";
    case SupportCase::HalfLine: return "HalfLine";
  }
  return "?";
}

SupportInterval support_interval(const LevyModel& model) {
  validate(model);
  if (model.is_pure_drift())
    throw Error(ErrorKind::DegenerateModel, "support trichotomy excludes the pure-drift case");
  const double b = model.linear_drift();
  SupportInterval out;
  if (model.is_subordinator() && b > 0.0) {
    out.upper = 1.0 / b;
    out.tag = SupportCase::SubordinatorWithDrift;
  } else if (model.family == Family::CompoundPoissonDrift && model.jumps.nonpositive() && b > 0.0) {
    out.lower = 1.0 / b;
    out.tag = SupportCase::NoPositiveJumpsWithDrift;
  }
  return out;
}

const char* to_string(ProcessKind k) noexcept {
  switch (k) {
    case ProcessKind::LampertiX: return "X";
    case ProcessKind::OuU: return "U";
    case ProcessKind::GouV: return "V";
    case ProcessKind::StationaryU: return "U-stationary";
  }
  return "?";
}

namespace {

std::variant<ExpFunctional, StationaryScene> build_backing(ProcessKind kind, const LevyModel& model, double start,
                                                           double t_max, const PathOptions& po,
                                                           const HatIOptions& ho, RandomStream& rng) {
  validate(model);
  check_t(t_max);
  if (kind == ProcessKind::StationaryU) {
    RandomStream hat_rng = rng.split(0);
    RandomStream path_rng = rng.split(1);
    const double hat = sample_hat_I(model, ho, hat_rng);
    StationaryScene scene(hat, simulate_functional(model, 1.0, po, path_rng));
    scene.extend_for(model, t_max, path_rng, 64, po.max_points);
    return scene;
  }
  if (kind == ProcessKind::GouV) {
    if (!(start >= 0.0)) throw Error(ErrorKind::InvalidArgument, "V(0) must be nonnegative");
  } else {
    check_start(start);
  }
  ExpFunctional f = simulate_functional(model, kind == ProcessKind::GouV ? t_max : 1.0, po, rng);
  if (kind == ProcessKind::LampertiX && t_max > 0.0)
    ensure_log_range(f, model, std::log(t_max) - std::log(start), rng, 64, po.max_points);
  if (kind == ProcessKind::OuU && t_max > 0.0)
    ensure_log_range(f, model, u_log_level(t_max, start), rng, 64, po.max_points);
  return f;
}

}  // namespace

ProcessRealization::ProcessRealization(ProcessKind kind, const LevyModel& model, double start, double t_max,
                                       const PathOptions& path_opts, const HatIOptions& hat_opts, RandomStream& rng)
    : kind_(kind), start_(start), t_max_(t_max),
      backing_(build_backing(kind, model, start, t_max, path_opts, hat_opts, rng)) {
  if (kind_ == ProcessKind::StationaryU) start_ = 1.0 / std::get<StationaryScene>(backing_).hat_I();
}

const ExpFunctional& ProcessRealization::forward() const {
  if (const auto* s = std::get_if<StationaryScene>(&backing_)) return s->forward();
  return std::get<ExpFunctional>(backing_);
}

double ProcessRealization::operator()(double t) const {
  switch (kind_) {
    case ProcessKind::LampertiX: return eval_X(std::get<ExpFunctional>(backing_), t, start_);
    case ProcessKind::OuU: return eval_U(std::get<ExpFunctional>(backing_), t, start_);
    case ProcessKind::GouV: return eval_V(std::get<ExpFunctional>(backing_), t, start_);
    case ProcessKind::StationaryU: return eval_U_stationary(std::get<StationaryScene>(backing_), t);
  }
  return 0.0;
}

void write_trajectory_csv(std::ostream& os, const ProcessRealization& process, std::span<const double> times) {
  os << "t,value\n";
  const auto old = os.precision(17);
  for (double t : times) os << t << ',' << process(t) << '\n';
  os.precision(old);
}

}  // namespace lamperti
