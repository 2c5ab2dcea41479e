#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <variant>

#include "lamperti/levy_model.hpp"
#include "lamperti/path.hpp"

namespace lamperti {

/// Lamperti process X(t) = x0 * exp(xi_{tau(t/x0)}), started from x0.
double eval_X(const ExpFunctional& expf, double t, double x0);

/// OU-type process U(t) = e^{-t} X(e^t - 1), started from u0. Evaluated in log
/// space so that t may be large.
double eval_U(const ExpFunctional& expf, double t, double u0);

/// Generalized OU process V(t) = exp(-xi_t) (I(t) + v0).
double eval_V(const ExpFunctional& expf, double t, double v0);

/// Stationary version tilde U(t) = exp(xi_{T(t)}) / (hat I e^t).
double eval_U_stationary(const StationaryScene& scene, double t);

/// The same quantity composed as 1 / V(T(t)) with V started at hat I.
double eval_U_stationary_via_V(const StationaryScene& scene, double t);

struct PatieCheck {
  double lhs;
  double rhs;
  double abs_diff;
};

/// Compares U(t) from x0 (through tau) with 1/V(T_V(t)) where V(0) = 1/x0 and
/// T_V inverts s -> int_0^s du/V(u). The right side integrates 1/V numerically
/// and root-finds T_V, sharing no closed form with the left side.
PatieCheck patie_identity_check(const ExpFunctional& expf, double t, double x0);

/// tilde X(t) = t * tilde U(ln t). Only t >= 1 is representable (DomainRestricted otherwise).
double eval_X_selfsimilar(const StationaryScene& scene, double t);

enum class SupportCase {
  SubordinatorWithDrift,     // [0, 1/b]
  NoPositiveJumpsWithDrift,  // [1/b, inf)
  HalfLine,                  // [0, inf)
};

const char* to_string(SupportCase c) noexcept;

/// Support interval of the law of hat I.
struct SupportInterval {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  SupportCase tag = SupportCase::HalfLine;

  bool in_interior(double x) const { return x > lower && x < upper; }
  /// Membership in the interval widened by a relative margin at each finite end.
  bool contains_inflated(double x, double rel) const {
    return x >= lower * (1.0 - rel) && x <= upper * (1.0 + rel);
  }
};

/// DegenerateModel for a pure drift.
SupportInterval support_interval(const LevyModel& model);

enum class ProcessKind { LampertiX, OuU, GouV, StationaryU };

const char* to_string(ProcessKind k) noexcept;

/// A process realization over an immutable backing path. The path is
/// extended once at construction so that every t in [0, t_max] can be
/// evaluated; after that the object may be shared between threads.
class ProcessRealization {
 public:
  ProcessRealization(ProcessKind kind, const LevyModel& model, double start, double t_max,
                     const PathOptions& path_opts, const HatIOptions& hat_opts, RandomStream& rng);

  ProcessKind kind() const { return kind_; }
  /// Value at t = 0; for StationaryU this is 1/hat I.
  double start() const { return start_; }
  double t_max() const { return t_max_; }
  double operator()(double t) const;

  const ExpFunctional& forward() const;

 private:
  ProcessKind kind_;
  double start_;
  double t_max_;
  std::variant<ExpFunctional, StationaryScene> backing_;
};

/// CSV with columns t,value.
void write_trajectory_csv(std::ostream& os, const ProcessRealization& process, std::span<const double> times);

}  // namespace lamperti
