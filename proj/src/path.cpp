#include "lamperti/path.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "lamperti/detail/logmath.hpp"
#include "lamperti/error.hpp"

namespace lamperti {

using detail::inverse_exp_integral_log;
using detail::kNegInf;
using detail::log_add_exp;
using detail::log_exp_integral;
using detail::log_expm1;

namespace {

constexpr double kGridSnap = 1e-9;

void check_horizon(double horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw Error(ErrorKind::InvalidArgument, "horizon must be finite and nonnegative");
}

// Appends exponential inter-arrival jumps in (from, to).
void append_jumps(SkeletonPath& path, const LevyModel& model, double from, double to, RandomStream& rng) {
  if (model.family != Family::CompoundPoissonDrift) return;
  double clock = from + rng.exponential() / model.rate;
  while (clock < to) {
    path.jump_times.push_back(clock);
    path.jump_sizes.push_back(model.jumps.sample(rng));
    clock += rng.exponential() / model.rate;
  }
}

std::size_t grid_cells(double horizon, double step) {
  return static_cast<std::size_t>(std::ceil(horizon / step - kGridSnap));
}

}  // namespace

double SkeletonPath::value(double t) const {
  const auto end = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  double x = drift * t;
  for (auto it = jump_times.begin(); it != end; ++it) x += jump_sizes[static_cast<std::size_t>(it - jump_times.begin())];
  return x;
}

double GridPath::value(double t) const {
  if (t <= 0.0) return values.front();
  const auto k = static_cast<std::size_t>(std::floor(t / step + kGridSnap));
  return values[std::min(k, values.size() - 1)];
}

SkeletonPath simulate_skeleton(const LevyModel& model, double horizon, RandomStream& rng) {
  if (!model.finite_activity())
    throw Error(ErrorKind::WrongFamily, std::string("skeleton paths need a finite-activity model, got ") + to_string(model.family));
  check_horizon(horizon);
  SkeletonPath path;
  path.drift = model.drift;
  path.horizon = horizon;
  append_jumps(path, model, 0.0, horizon, rng);
  return path;
}

void extend_path(SkeletonPath& path, const LevyModel& model, double new_horizon, RandomStream& rng) {
  check_horizon(new_horizon);
  if (new_horizon <= path.horizon) return;
  append_jumps(path, model, path.horizon, new_horizon, rng);
  path.horizon = new_horizon;
}

GridPath simulate_grid(const LevyModel& model, double horizon, double step, RandomStream& rng,
                       std::size_t max_points) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorKind::InvalidArgument, "grid step must be positive");
  check_horizon(horizon);
  GridPath path;
  path.step = step;
  extend_path(path, model, horizon, rng, max_points);
  return path;
}

void extend_path(GridPath& path, const LevyModel& model, double new_horizon, RandomStream& rng,
                 std::size_t max_points) {
  check_horizon(new_horizon);
  const std::size_t cells = grid_cells(new_horizon, path.step);
  if (cells + 1 > max_points) {
    std::ostringstream os;
    os << "grid of " << cells + 1 << " points exceeds the limit " << max_points;
    throw Error(ErrorKind::TableTooLarge, os.str());
  }
  if (cells + 1 <= path.values.size()) return;
  path.values.reserve(cells + 1);
  double x = path.values.back();
  while (path.values.size() < cells + 1) {
    x += sample_increment(model, path.step, rng);
    path.values.push_back(x);
  }
}

ExpFunctional::ExpFunctional(SkeletonPath path) : path_(std::move(path)) { rebuild(); }
ExpFunctional::ExpFunctional(GridPath path) : path_(std::move(path)) { rebuild(); }

ExpFunctional exp_functional(SkeletonPath path) { return ExpFunctional(std::move(path)); }
ExpFunctional exp_functional(GridPath path) { return ExpFunctional(std::move(path)); }

void ExpFunctional::rebuild() {
  knots_.clear();
  xi_.clear();
  log_cum_.clear();
  if (const auto* sk = std::get_if<SkeletonPath>(&path_)) {
    slope_ = sk->drift;
    grid_step_ = 0.0;
    const double horizon = sk->horizon;
    knots_.push_back(0.0);
    std::size_t j = 0;
    for (; j < sk->jump_times.size() && sk->jump_times[j] < horizon; ++j) {
      if (sk->jump_times[j] > knots_.back()) knots_.push_back(sk->jump_times[j]);
    }
    if (horizon > knots_.back()) knots_.push_back(horizon);

    double x = 0.0;
    double lc = kNegInf;
    std::size_t next_jump = 0;
    // jumps at time 0 belong to the first segment's starting value
    while (next_jump < sk->jump_times.size() && sk->jump_times[next_jump] <= 0.0) x += sk->jump_sizes[next_jump++];
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
      const double len = knots_[k + 1] - knots_[k];
      xi_.push_back(x);
      log_cum_.push_back(lc);
      lc = log_add_exp(lc, x + log_exp_integral(slope_, len));
      x += slope_ * len;
      while (next_jump < sk->jump_times.size() && sk->jump_times[next_jump] <= knots_[k + 1])
        x += sk->jump_sizes[next_jump++];
    }
    xi_.push_back(x);
    log_cum_.push_back(lc);
  } else {
    const auto& g = std::get<GridPath>(path_);
    slope_ = 0.0;
    grid_step_ = g.step;
    const double log_step = std::log(g.step);
    knots_.resize(g.values.size());
    xi_ = g.values;
    log_cum_.resize(g.values.size());
    double lc = kNegInf;
    for (std::size_t k = 0; k < g.values.size(); ++k) {
      knots_[k] = static_cast<double>(k) * g.step;
      log_cum_[k] = lc;
      lc = log_add_exp(lc, g.values[k] + log_step);
    }
  }
}

void ExpFunctional::extend(const LevyModel& model, double new_horizon, RandomStream& rng, std::size_t max_points) {
  if (new_horizon <= horizon()) return;
  std::visit(
      [&](auto& p) {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, GridPath>)
          extend_path(p, model, new_horizon, rng, max_points);
        else
          extend_path(p, model, new_horizon, rng);
      },
      path_);
  rebuild();
}

Segment ExpFunctional::segment(std::size_t k) const {
  return Segment{knots_[k], knots_[k + 1], xi_[k], slope_, log_cum_[k]};
}

double ExpFunctional::log_I_in_segment(std::size_t k, double u) const {
  return log_add_exp(log_cum_[k], xi_[k] + log_exp_integral(slope_, u));
}

double ExpFunctional::check_time(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "time must be nonnegative");
  const double h = horizon();
  if (t > h) {
    if (t <= h * (1.0 + 1e-12) + 1e-12) return h;
    std::ostringstream os;
    os << "time " << t << " beyond path horizon " << h;
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  return t;
}

std::size_t ExpFunctional::segment_index(double t) const {
  const std::size_t m = segment_count();
  if (m == 0) throw Error(ErrorKind::OutOfRange, "empty path");
  std::size_t k;
  if (grid_step_ > 0.0) {
    k = static_cast<std::size_t>(std::floor(t / grid_step_ + kGridSnap));
  } else {
    k = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin());
    k = k == 0 ? 0 : k - 1;
  }
  return std::min(k, m - 1);
}

double ExpFunctional::xi(double t) const {
  t = check_time(t);
  if (segment_count() == 0 || t >= horizon()) return xi_.back();
  const std::size_t k = segment_index(t);
  return xi_[k] + slope_ * std::max(0.0, t - knots_[k]);
}

double ExpFunctional::max_abs_xi(double t) const {
  t = check_time(t);
  double best = std::abs(xi_.front());
  for (std::size_t k = 0; k + 1 < knots_.size() && knots_[k] <= t; ++k) {
    const double end = std::min(t, knots_[k + 1]);
    best = std::max({best, std::abs(xi_[k]), std::abs(xi_[k] + slope_ * (end - knots_[k]))});
  }
  if (t >= horizon()) best = std::max(best, std::abs(xi_.back()));
  return best;
}

double ExpFunctional::log_I(double t) const {
  t = check_time(t);
  if (t == 0.0 || segment_count() == 0) return kNegInf;
  if (t >= horizon()) return log_cum_.back();
  const std::size_t k = segment_index(t);
  return log_I_in_segment(k, std::max(0.0, t - knots_[k]));
}

double ExpFunctional::I(double t) const {
  const double l = log_I(t);
  if (l > kExponentCap) throw Error(ErrorKind::ExponentOverflow, "I(t) exceeds double range; use log_I");
  return std::exp(l);
}

double ExpFunctional::log_I_shifted(double t, double log_shift) const {
  return log_add_exp(log_shift, log_I(t));
}

double ExpFunctional::tau_log(double log_s) const {
  if (log_s == kNegInf) return 0.0;
  return tau_shifted(log_s, kNegInf);
}

double ExpFunctional::tau_shifted(double log_target, double log_shift) const {
  if (std::isnan(log_target)) throw Error(ErrorKind::InvalidArgument, "tau target is NaN");
  if (log_target <= log_shift) {
    if (log_target >= log_shift - 1e-13 * std::max(1.0, std::abs(log_shift))) return 0.0;
    throw Error(ErrorKind::InvalidArgument, "tau target below the starting value");
  }
  const std::size_t m = segment_count();
  auto level = [&](std::size_t k) { return log_add_exp(log_shift, log_cum_[k]); };
  if (m == 0 || log_target > level(m)) {
    std::ostringstream os;
    os << "tau target beyond the functional's range at horizon " << horizon();
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  // largest k < m with level(k) <= target
  std::size_t lo = 0, hi = m;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (level(mid) <= log_target) lo = mid;
    else hi = mid;
  }
  const double len = knots_[lo + 1] - knots_[lo];
  // int over [knot, knot + u] of e^{xi} must equal e^{target} - e^{level}
  const double log_y = log_target - xi_[lo] + std::log(-std::expm1(level(lo) - log_target));
  const double u = inverse_exp_integral_log(slope_, log_y);
  return knots_[lo] + std::clamp(u, 0.0, len);
}

double tau(const ExpFunctional& expf, double s) {
  if (!(s >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau needs s >= 0");
  return s == 0.0 ? 0.0 : expf.tau_log(std::log(s));
}

ExpFunctional simulate_functional(const LevyModel& model, double horizon, const PathOptions& opts, RandomStream& rng) {
  if (model.finite_activity()) return ExpFunctional(simulate_skeleton(model, horizon, rng));
  return ExpFunctional(simulate_grid(model, horizon, opts.step, rng, opts.max_points));
}

void ensure_log_range(ExpFunctional& expf, const LevyModel& model, double log_target, RandomStream& rng,
                      int max_doublings, std::size_t max_points) {
  for (int i = 0; expf.log_I(expf.horizon()) < log_target; ++i) {
    if (i >= max_doublings) throw Error(ErrorKind::OutOfRange, "path extension budget exhausted");
    expf.extend(model, std::max(2.0 * expf.horizon(), 1.0), rng, max_points);
  }
}

double sample_hat_I(const LevyModel& model, const HatIOptions& opts, RandomStream& rng) {
  if (!(opts.rel_tol > 0.0 && opts.rel_tol <= 0.1))
    throw Error(ErrorKind::InvalidArgument, "rel_tol must lie in (0, 0.1]");
  const double log_inv_tol = -std::log(opts.rel_tol);
  double xi = 0.0;
  double integral = 0.0;  // int_0^S exp(-xi_s) ds
  auto done = [&] { return xi >= log_inv_tol + std::log1p(integral); };
  std::size_t count = 0;
  auto tick = [&] {
    if (++count > opts.max_points) {
      std::ostringstream os;
      os << "hat I did not converge within " << opts.max_points << " steps for " << model.id();
      throw Error(ErrorKind::NoConvergence, os.str());
    }
  };

  // Pure drift: hat I = 1/b in closed form.
  if (model.is_pure_drift()) {
    validate(model);
    return 1.0 / model.drift;
  }

  if (model.finite_activity()) {
    const double b = model.drift;
    const bool jumps = model.family == Family::CompoundPoissonDrift;
    double to_jump = jumps ? rng.exponential() / model.rate : std::numeric_limits<double>::infinity();
    // With positive drift the criterion is also checked every 1/b time units.
    const double chunk = b > 0.0 ? 1.0 / b : std::numeric_limits<double>::infinity();
    while (!done()) {
      tick();
      const double len = std::min(to_jump, chunk);
      integral += std::exp(-xi + log_exp_integral(-b, len));
      xi += b * len;
      to_jump -= len;
      if (jumps && to_jump <= 0.0) {
        xi += model.jumps.sample(rng);
        to_jump = rng.exponential() / model.rate;
      }
    }
    return integral;
  }

  if (!(opts.step > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid step must be positive");
  while (!done()) {
    tick();
    integral += opts.step * std::exp(-xi);
    xi += sample_increment(model, opts.step, rng);
  }
  return integral;
}

StationaryScene::StationaryScene(double hat_I, ExpFunctional forward)
    : hat_I_(hat_I), log_hat_I_(std::log(hat_I)), forward_(std::move(forward)) {
  if (!(hat_I > 0.0) || !std::isfinite(hat_I)) throw Error(ErrorKind::InvalidArgument, "hat I must be positive and finite");
}

double StationaryScene::tilde_I(double t) const {
  const double l = log_tilde_I(t);
  if (l > kExponentCap) throw Error(ErrorKind::ExponentOverflow, "tilde I(t) exceeds double range");
  return std::exp(l);
}

double StationaryScene::tilde_V(double t) const { return std::exp(log_tilde_I(t) - forward_.xi(t)); }

double StationaryScene::T(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "T is only provided for t >= 0");
  if (t == 0.0) return 0.0;
  return forward_.tau_shifted(log_hat_I_ + t, log_hat_I_);
}

void StationaryScene::extend_for(const LevyModel& model, double a_max, RandomStream& rng, int max_doublings,
                                 std::size_t max_points) {
  for (int i = 0; max_A() < a_max; ++i) {
    if (i >= max_doublings) throw Error(ErrorKind::OutOfRange, "scene extension budget exhausted");
    forward_.extend(model, std::max(2.0 * horizon(), 1.0), rng, max_points);
  }
}

void StationaryScene::extend_to(const LevyModel& model, double h, RandomStream& rng, std::size_t max_points) {
  forward_.extend(model, h, rng, max_points);
}

StationaryScene make_scene(const LevyModel& model, double hat_I_draw, ExpFunctional forward_path) {
  if (forward_path.exact() != model.finite_activity())
    throw Error(ErrorKind::WrongFamily, "forward path representation does not match the model");
  return StationaryScene(hat_I_draw, std::move(forward_path));
}

double A_functional(const StationaryScene& scene, double t) { return scene.A(t); }
double T_change(const StationaryScene& scene, double t) { return scene.T(t); }

std::vector<double> segment_breakpoints(const ExpFunctional& f, std::size_t k, double log_v0, double len) {
  const Segment s = f.segment(k);
  std::vector<double> pts{0.0};
  const double log_c = log_add_exp(log_v0, s.log_I0) - s.xi0;
  if (log_c < std::log(len))
    for (double x = std::max(std::exp(log_c), std::numeric_limits<double>::min()); x < len; x *= 2.0) pts.push_back(x);
  pts.push_back(len);
  return pts;
}

namespace {

// int_0^len e^{xi0 + b u} / (S0 + e^{xi0} (e^{b u} - 1) / b) du, S0 = exp(log_s0).
// With c = S0 e^{-xi0} and u = c (e^w - 1) the integrand is 1 on flat
// segments and O(1) otherwise, however small c is after a jump.
double integrate_inv_v(const Segment& s, double log_s0, double len) {
  const double log_c = log_s0 - s.xi0;
  const double r = std::log(len) - log_c;
  const double w_max = r > 30.0 ? r + std::log1p(std::exp(-r)) : std::log1p(std::exp(r));
  auto f = [&](double w) {
    if (w <= 0.0) return 1.0;
    const double log_u = log_c + log_expm1(w);
    const double bu = s.slope * std::exp(log_u);
    const double log_phi = bu == 0.0 ? 0.0 : std::log(std::expm1(bu) / bu);
    const double log_den = log_add_exp(log_s0, s.xi0 + log_u + log_phi);
    return std::exp(s.xi0 + bu - log_den + log_c + w);
  };
  // rescaled to [0, 1]: the error estimate has an absolute floor
  return w_max * boost::math::quadrature::gauss_kronrod<double, 21>::integrate([&](double z) { return f(w_max * z); }, 0.0,
                                                                               1.0, 8, 1e-12);
}

}  // namespace

double additive_functional_quadrature(const StationaryScene& scene, double t) {
  const ExpFunctional& f = scene.forward();
  if (!(t >= 0.0) || t > f.horizon()) throw Error(ErrorKind::OutOfRange, "quadrature window outside the path");
  const double log_hat = scene.log_hat_I();
  double total = 0.0;
  for (std::size_t k = 0; k < f.segment_count(); ++k) {
    const Segment s = f.segment(k);
    if (s.t0 >= t) break;
    const double len = std::min(s.t1, t) - s.t0;
    if (len <= 0.0) continue;
    total += integrate_inv_v(s, log_add_exp(log_hat, s.log_I0), len);
  }
  return total;
}

double integrate_along_V(const ExpFunctional& f, double log_v0, double s_end, const std::function<double(double)>& h) {
  if (!(s_end >= 0.0) || s_end > f.horizon() * (1.0 + 1e-12)) throw Error(ErrorKind::OutOfRange, "integration window outside the path");
  double total = 0.0;
  for (std::size_t k = 0; k < f.segment_count(); ++k) {
    const Segment s = f.segment(k);
    if (s.t0 >= s_end) break;
    const double len = std::min(s.t1, s_end) - s.t0;
    if (len <= 0.0) continue;
    auto v_at = [&](double u) { return std::exp(log_add_exp(log_v0, f.log_I_in_segment(k, u)) - (s.xi0 + s.slope * u)); };
    if (f.exact()) {
      total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate([&](double u) { return h(v_at(u)); }, 0.0,
                                                                              len, 8, 1e-12);
    } else {
      total += 0.5 * len * (h(v_at(0.0)) + h(v_at(len)));
    }
  }
  return total;
}

double grid_additive_tolerance(const StationaryScene& scene, double t) {
  const ExpFunctional& f = scene.forward();
  return 20.0 * f.grid_step() * (1.0 + f.max_abs_xi(t));
}

void write_path_csv(std::ostream& os, const ExpFunctional& expf, double v0, std::span<const double> times) {
  const double log_v0 = v0 > 0.0 ? std::log(v0) : kNegInf;
  os << "t,xi,I,V\n";
  const auto old = os.precision(17);
  for (double t : times) {
    const double xi = expf.xi(t);
    const double log_i = expf.log_I(t);
    os << t << ',' << xi << ',' << std::exp(log_i) << ',' << std::exp(log_add_exp(log_v0, log_i) - xi) << '\n';
  }
  os.precision(old);
}

}  // namespace lamperti
