#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "lamperti/levy_model.hpp"
#include "lamperti/random.hpp"

namespace lamperti {

/// Arguments of exp() beyond this magnitude are not materialized in linear
/// space; the log-space accessors stay valid past it.
inline constexpr double kExponentCap = 700.0;
inline constexpr std::size_t kDefaultMaxGridPoints = std::size_t{1} << 24;

/// Exact finite-activity path: xi_t = drift*t + sum of jumps at times <= t.
struct SkeletonPath {
  double drift = 0.0;
  std::vector<double> jump_times;
  std::vector<double> jump_sizes;
  double horizon = 0.0;

  /// Cadlag evaluation; the jump at a jump time is included.
  double value(double t) const;
};

/// Uniform-grid path: values[k] is xi at k*step, built from exact increments.
struct GridPath {
  double step = 0.01;
  std::vector<double> values{0.0};

  double horizon() const { return step * static_cast<double>(values.size() - 1); }
  /// Piecewise-constant (left grid point) evaluation.
  double value(double t) const;
};

SkeletonPath simulate_skeleton(const LevyModel& model, double horizon, RandomStream& rng);
GridPath simulate_grid(const LevyModel& model, double horizon, double step, RandomStream& rng,
                       std::size_t max_points = kDefaultMaxGridPoints);

/// Continue a path to a longer horizon with fresh independent randomness.
void extend_path(SkeletonPath& path, const LevyModel& model, double new_horizon, RandomStream& rng);
void extend_path(GridPath& path, const LevyModel& model, double new_horizon, RandomStream& rng,
                 std::size_t max_points = kDefaultMaxGridPoints);

/// One piece of a path on which xi is affine: xi(t0 + u) = xi0 + slope*u.
struct Segment {
  double t0;
  double t1;
  double xi0;
  double slope;
  double log_I0;  // ln I(t0)
};

/// Cumulative table of I(t) = int_0^t exp(xi_s) ds over a backing path,
/// kept in log space so that paths with very large xi remain representable.
/// Skeleton paths integrate each drift segment in closed form; grid paths use
/// the left-endpoint rule, i.e. xi is treated as constant on each cell.
class ExpFunctional {
 public:
  explicit ExpFunctional(SkeletonPath path);
  explicit ExpFunctional(GridPath path);

  bool exact() const { return std::holds_alternative<SkeletonPath>(path_); }
  double horizon() const { return knots_.back(); }
  double slope() const { return slope_; }
  double grid_step() const { return grid_step_; }
  const std::variant<SkeletonPath, GridPath>& path() const { return path_; }

  std::size_t segment_count() const { return knots_.size() - 1; }
  Segment segment(std::size_t k) const;
  /// ln I(t0 + u) for 0 <= u <= t1 - t0 inside segment k.
  double log_I_in_segment(std::size_t k, double u) const;
  /// Index of the segment containing t (t in [t0, t1)); the last segment for t == horizon.
  std::size_t segment_index(double t) const;

  double xi(double t) const;
  double max_abs_xi(double t) const;
  double log_I(double t) const;
  /// I(t); throws ExponentOverflow past kExponentCap.
  double I(double t) const;
  /// ln(exp(log_shift) + I(t)).
  double log_I_shifted(double t, double log_shift) const;

  /// Inverse of I: returns u with I(u) = exp(log_s). OutOfRange past I(horizon).
  double tau_log(double log_s) const;
  /// Solves ln(exp(log_shift) + I(u)) = log_target for u.
  double tau_shifted(double log_target, double log_shift) const;

  /// Construction-time only: grow the backing path to new_horizon and rebuild.
  void extend(const LevyModel& model, double new_horizon, RandomStream& rng,
              std::size_t max_points = kDefaultMaxGridPoints);

 private:
  void rebuild();
  double check_time(double t) const;

  std::variant<SkeletonPath, GridPath> path_;
  std::vector<double> knots_;
  std::vector<double> xi_;       // xi at knot k (right limit); last entry is xi(horizon)
  std::vector<double> log_cum_;  // ln I(knot k)
  double slope_ = 0.0;
  double grid_step_ = 0.0;
};

ExpFunctional exp_functional(SkeletonPath path);
ExpFunctional exp_functional(GridPath path);

/// tau(s) = I^{-1}(s).
double tau(const ExpFunctional& expf, double s);

struct PathOptions {
  double step = 0.01;
  std::size_t max_points = kDefaultMaxGridPoints;
};

/// Skeleton for finite-activity models, grid otherwise.
ExpFunctional simulate_functional(const LevyModel& model, double horizon, const PathOptions& opts,
                                  RandomStream& rng);

/// Doubles the horizon until ln I(horizon) >= log_target; OutOfRange after
/// max_doublings attempts.
void ensure_log_range(ExpFunctional& expf, const LevyModel& model, double log_target, RandomStream& rng,
                      int max_doublings = 64, std::size_t max_points = kDefaultMaxGridPoints);

struct HatIOptions {
  double rel_tol = 1e-6;
  double step = 0.01;
  std::size_t max_points = std::size_t{1} << 20;
};

/// One draw of hat I = int_0^inf exp(-xi_s) ds, integrating forward until
/// xi_S >= ln(1/rel_tol) + ln(1 + I_S). NoConvergence past max_points steps.
double sample_hat_I(const LevyModel& model, const HatIOptions& opts, RandomStream& rng);

/// Realization of the two-sided stationary construction restricted to t >= 0:
/// tilde I(t) = hat I + I(t), tilde V(t) = exp(-xi_t) tilde I(t),
/// A(t) = ln tilde I(t) - ln hat I and T = A^{-1}.
class StationaryScene {
 public:
  StationaryScene(double hat_I, ExpFunctional forward);

  double hat_I() const { return hat_I_; }
  double log_hat_I() const { return log_hat_I_; }
  const ExpFunctional& forward() const { return forward_; }
  double horizon() const { return forward_.horizon(); }

  double log_tilde_I(double t) const { return forward_.log_I_shifted(t, log_hat_I_); }
  double tilde_I(double t) const;
  double tilde_V(double t) const;
  double A(double t) const { return log_tilde_I(t) - log_hat_I_; }
  /// Largest t for which T(t) is representable on the current path.
  double max_A() const { return A(horizon()); }
  double T(double t) const;

  /// Construction-time only: extend the forward path until max_A() >= a_max.
  void extend_for(const LevyModel& model, double a_max, RandomStream& rng, int max_doublings = 64,
                  std::size_t max_points = kDefaultMaxGridPoints);
  void extend_to(const LevyModel& model, double horizon, RandomStream& rng,
                 std::size_t max_points = kDefaultMaxGridPoints);

 private:
  double hat_I_;
  double log_hat_I_;
  ExpFunctional forward_;
};

StationaryScene make_scene(const LevyModel& model, double hat_I_draw, ExpFunctional forward_path);

double A_functional(const StationaryScene& scene, double t);
double T_change(const StationaryScene& scene, double t);

/// Split points 0 < c < 2c < 4c < ... < len for integrating 1/V over the first
/// len of segment k, c = V at the segment start. 1/V decays like 1/(c + u)
/// there, and after a large jump c is tiny.
std::vector<double> segment_breakpoints(const ExpFunctional& expf, std::size_t k, double log_v0, double len);

/// Numerical int_0^t ds / tilde V(s): Gauss-Kronrod on each segment after a
/// logarithmic change of variable at the segment start. Independent of the
/// closed form A.
double additive_functional_quadrature(const StationaryScene& scene, double t);

/// Error bound used for the grid version of the A identity:
/// 20 * step * (1 + max |xi| on [0, t]).
double grid_additive_tolerance(const StationaryScene& scene, double t);

/// int_0^{s_end} h(V(s)) ds with V(s) = exp(-xi_s)(v0 + I(s)), v0 = exp(log_v0).
/// Gauss-Kronrod per drift segment on skeletons; on grids V is affine inside a
/// cell and the cell trapezoid uses the left limit at the cell's right end.
double integrate_along_V(const ExpFunctional& expf, double log_v0, double s_end,
                         const std::function<double(double)>& h);

/// CSV with columns t,xi,I,V where V(t) = exp(-xi_t)(I(t) + v0).
void write_path_csv(std::ostream& os, const ExpFunctional& expf, double v0, std::span<const double> times);

}  // namespace lamperti
