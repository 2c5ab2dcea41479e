#include "lamperti/experiments.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <chrono>
#include <cmath>
#include <sstream>

#include "lamperti/detail/logmath.hpp"
#include "lamperti/error.hpp"
#include "lamperti/oracles.hpp"
#include "lamperti/processes.hpp"
#include "lamperti/stats.hpp"

namespace lamperti {

using detail::kNegInf;
using detail::log_add_exp;
using detail::log_expm1;

// ---------------------------------------------------------------------------
// Test functions

TestFunction TestFunction::one() { return {"one", [](double) { return 1.0; }}; }
TestFunction TestFunction::zero() { return {"zero", [](double) { return 0.0; }}; }
TestFunction TestFunction::exp_neg() { return {"exp_neg", [](double x) { return std::exp(-x); }}; }
TestFunction TestFunction::indicator(double lo, double hi) {
  std::ostringstream os;
  os << "indicator:" << lo << ':' << hi;
  return {os.str(), [lo, hi](double x) { return x > lo && x < hi ? 1.0 : 0.0; }};
}
TestFunction TestFunction::inverse() { return {"inverse", [](double x) { return 1.0 / x; }}; }
TestFunction TestFunction::exp_neg_inverse_over_x() {
  return {"exp_neg_inverse_over_x", [](double x) { return std::exp(-1.0 / x) / x; }};
}
TestFunction TestFunction::indicator_over_x(double lo, double hi) {
  std::ostringstream os;
  os << "indicator_over_x:" << lo << ':' << hi;
  return {os.str(), [lo, hi](double x) { return x > lo && x < hi ? 1.0 / x : 0.0; }};
}

TestFunction TestFunction::parse(std::string_view spec) {
  auto window = [&](std::string_view rest) {
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw Error(ErrorKind::ConfigError, "window function needs lo:hi");
    try {
      return std::pair{std::stod(std::string(rest.substr(0, colon))), std::stod(std::string(rest.substr(colon + 1)))};
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "bad window bounds in '" + std::string(spec) + "'");
    }
  };
  if (spec == "one") return one();
  if (spec == "zero") return zero();
  if (spec == "exp_neg") return exp_neg();
  if (spec == "inverse") return inverse();
  if (spec == "exp_neg_inverse_over_x") return exp_neg_inverse_over_x();
  if (spec.starts_with("indicator_over_x:")) {
    const auto [lo, hi] = window(spec.substr(17));
    return indicator_over_x(lo, hi);
  }
  if (spec.starts_with("indicator:")) {
    const auto [lo, hi] = window(spec.substr(10));
    return indicator(lo, hi);
  }
  throw Error(ErrorKind::ConfigError, "unknown test function '" + std::string(spec) + "'");
}

// ---------------------------------------------------------------------------
// Reports

namespace {

nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void ExperimentReport::record(std::string stat_name, double v) {
  stats.push_back(Stat{std::move(stat_name), v, false, "", std::numeric_limits<double>::quiet_NaN(), true});
}

void ExperimentReport::gate(std::string stat_name, double v, std::string rule, double threshold, bool ok) {
  stats.push_back(Stat{std::move(stat_name), v, true, std::move(rule), threshold, ok});
}

const Stat* ExperimentReport::find(std::string_view stat_name) const {
  for (const auto& s : stats)
    if (s.name == stat_name) return &s;
  return nullptr;
}

double ExperimentReport::value(std::string_view stat_name) const {
  const Stat* s = find(stat_name);
  if (!s) throw Error(ErrorKind::InvalidArgument, "no statistic named " + std::string(stat_name));
  return s->value;
}

void ExperimentReport::finalize() {
  bool any = false, all = true;
  for (const auto& s : stats) {
    if (!s.gating) continue;
    any = true;
    all = all && s.ok;
  }
  pass = any && all;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["model"] = model;
  j["params"] = params;
  auto arr = nlohmann::json::array();
  for (const auto& s : stats) {
    nlohmann::json e;
    e["name"] = s.name;
    e["value"] = number(s.value);
    if (s.gating) {
      e["rule"] = s.rule;
      e["threshold"] = number(s.threshold);
      e["ok"] = s.ok;
    }
    arr.push_back(std::move(e));
  }
  j["stats"] = std::move(arr);
  j["notes"] = notes;
  j["verdict"] = pass ? "pass" : "fail";
  j["seed"] = seed;
  j["runtime_s"] = runtime_s;
  return j;
}

std::string ExperimentReport::to_csv_rows() const {
  std::ostringstream os;
  for (const auto& s : stats) {
    os << name << ",\"" << model << "\"," << s.name << ',' << csv_number(s.value) << ',' << s.rule << ','
       << (s.gating ? csv_number(s.threshold) : std::string()) << ',' << (s.gating ? (s.ok ? "true" : "false") : "")
       << '\n';
  }
  return os.str();
}

nlohmann::json ExperimentParams::to_json() const {
  nlohmann::json j;
  j["t_list"] = t_list;
  j["n_reps"] = n_reps;
  j["n_mc"] = n_mc;
  j["horizon"] = horizon;
  j["horizons"] = horizons;
  j["step"] = step;
  j["rel_tol"] = rel_tol;
  j["f"] = f;
  j["g"] = g;
  j["start"] = start;
  j["x"] = x;
  j["epsilon"] = epsilon;
  j["alpha"] = alpha;
  j["ks_alpha"] = ks_alpha;
  j["tolerance"] = tolerance;
  j["mean_tol"] = mean_tol;
  j["second_tol"] = second_tol;
  j["var_ratio_max"] = var_ratio_max;
  j["min_fraction"] = min_fraction;
  return j;
}

// ---------------------------------------------------------------------------
// Defaults and dispatch

ExperimentParams default_params(std::string_view e) {
  ExperimentParams p;
  if (e == "stationarity") {
    p.t_list = {1.0, 5.0};
  } else if (e == "mixing") {
    p.t_list = {0.0, 1.0, 5.0, 20.0};
  } else if (e == "birkhoff") {
    p.horizon = 1e4;
    p.tolerance = 0.05;
  } else if (e == "hopf-ratio") {
    p.horizon = 1e3;
    p.n_reps = 20;
    p.f = "exp_neg_inverse_over_x";
    p.g = "inverse";
    p.tolerance = 0.10;
  } else if (e == "darling-kac") {
    p.t_list = {10.0, 100.0, 1000.0};
  } else if (e == "negative-control") {
    p.t_list = {10.0, 100.0, 1000.0};
  } else if (e == "recurrence") {
    p.horizon = 200.0;
    p.horizons = {25.0, 50.0, 100.0, 200.0};
    p.n_reps = 1000;
    p.start = 4.0;  // outside the default window around x = 1
  } else if (e == "invariant-mass" || e == "moments" || e == "support") {
    p.n_reps = 100000;
    p.t_list = {1.0};
  } else if (e == "nu-identity") {
    p.n_reps = 10000;
  } else if (e == "patie") {
    p.n_reps = 1000;
    p.t_list = {0.5, 1.0, 2.0};
  } else if (e == "additive-functional") {
    p.n_reps = 200;
    p.t_list = {0.5, 1.0, 2.0, 5.0};
  } else if (e == "duality") {
    p.t_list = {2.0};
  }
  return p;
}

const std::vector<std::string>& registered_experiments() {
  static const std::vector<std::string> names{
      "stationarity", "mixing",  "birkhoff",    "hopf-ratio", "darling-kac", "negative-control",   "recurrence",
      "invariant-mass", "moments", "nu-identity", "support",    "patie",       "additive-functional", "duality"};
  return names;
}

ExperimentReport run_experiment(std::string_view name, const LevyModel& model, const ExperimentParams& p,
                                const RunContext& ctx) {
  using Fn = ExperimentReport (*)(const LevyModel&, const ExperimentParams&, const RunContext&);
  static const std::vector<std::pair<std::string_view, Fn>> table{
      {"stationarity", exp_stationarity},
      {"mixing", exp_mixing},
      {"birkhoff", exp_birkhoff},
      {"hopf-ratio", exp_hopf_ratio},
      {"darling-kac", exp_darling_kac},
      {"negative-control", exp_negative_control},
      {"recurrence", exp_recurrence},
      {"invariant-mass", exp_invariant_mass},
      {"moments", exp_moments},
      {"nu-identity", exp_nu_identity},
      {"support", exp_support},
      {"patie", exp_patie},
      {"additive-functional", exp_additive_functional},
      {"duality", exp_duality},
  };
  for (const auto& [n, fn] : table)
    if (n == name) return fn(model, p, ctx);
  throw Error(ErrorKind::ConfigError, "unknown experiment '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Shared machinery

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ExperimentReport begin(std::string name, const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  validate(model);
  ExperimentReport r;
  r.name = std::move(name);
  r.model = model.id();
  r.params = p.to_json();
  r.seed = ctx.seed;
  return r;
}

ExperimentReport finish(ExperimentReport r, const Timer& timer) {
  r.finalize();
  r.runtime_s = timer.seconds();
  return r;
}

HatIOptions hat_options(const ExperimentParams& p) { return HatIOptions{p.rel_tol, p.step, std::size_t{1} << 20}; }
PathOptions path_options(const ExperimentParams& p) { return PathOptions{p.step, kDefaultMaxGridPoints}; }

double max_of(const std::vector<double>& v) {
  if (v.empty()) throw Error(ErrorKind::ConfigError, "t_list must not be empty");
  return *std::max_element(v.begin(), v.end());
}

std::string label(const char* base, double t) {
  std::ostringstream os;
  os << base << "[t=" << t << ']';
  return os.str();
}

// Per-replicate streams: child 0 draws hat I, child 1 drives the forward path,
// child 2 and up are experiment specific.
struct ReplicateStreams {
  RandomStream hat;
  RandomStream path;
  RandomStream extra;
  ReplicateStreams(std::uint64_t seed, std::size_t i)
      : hat(RandomStream(seed, i).split(0)), path(RandomStream(seed, i).split(1)), extra(RandomStream(seed, i).split(2)) {}
};

bool within_moment_band(double estimate, double oracle, double se) {
  return std::abs(estimate - oracle) <= std::max(0.01 * std::abs(oracle), 3.0 * se);
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentReport exp_stationarity(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("stationarity", model, p, ctx);
  const double t_max = max_of(p.t_list);
  const auto ho = hat_options(p);
  const auto po = path_options(p);
  std::vector<std::vector<double>> v(p.t_list.size(), std::vector<double>(p.n_reps));
  std::vector<double> fresh(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    const double hat0 = sample_hat_I(model, ho, s.hat);
    const ExpFunctional f = simulate_functional(model, t_max, po, s.path);
    for (std::size_t j = 0; j < p.t_list.size(); ++j) v[j][i] = eval_V(f, p.t_list[j], hat0);
    fresh[i] = sample_hat_I(model, ho, s.extra);
  });
  for (std::size_t j = 0; j < p.t_list.size(); ++j) {
    const KsResult ks = ks_two_sample(v[j], fresh, 1e-12);
    r.record(label("ks_statistic", p.t_list[j]), ks.statistic);
    r.gate(label("ks_p_value", p.t_list[j]), ks.p_value, ">", p.ks_alpha, ks.p_value > p.ks_alpha);
  }
  return finish(std::move(r), timer);
}

ExperimentReport exp_mixing(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("mixing", model, p, ctx);
  const TestFunction f = TestFunction::parse(p.f);
  const TestFunction g = TestFunction::parse(p.g);
  const double t_max = max_of(p.t_list);
  const auto ho = hat_options(p);
  const auto po = path_options(p);
  std::vector<double> x(p.n_reps);
  std::vector<std::vector<double>> y(p.t_list.size(), std::vector<double>(p.n_reps));
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    const double hat0 = sample_hat_I(model, ho, s.hat);
    const ExpFunctional path = simulate_functional(model, t_max, po, s.path);
    x[i] = f(hat0);
    for (std::size_t j = 0; j < p.t_list.size(); ++j) y[j][i] = g(eval_V(path, p.t_list[j], hat0));
  });
  std::size_t last = 0;
  for (std::size_t j = 0; j < p.t_list.size(); ++j) {
    if (p.t_list[j] > p.t_list[last]) last = j;
  }
  for (std::size_t j = 0; j < p.t_list.size(); ++j) {
    const CovarianceEstimate c = covariance(x, y[j]);
    r.record(label("covariance", p.t_list[j]), c.value);
    if (j == last) {
      r.record(label("covariance_se", p.t_list[j]), c.std_error);
      r.gate(label("abs_covariance_over_3se", p.t_list[j]), c.std_error > 0.0 ? std::abs(c.value) / (3.0 * c.std_error) : 0.0,
             "<=", 1.0, std::abs(c.value) <= 3.0 * c.std_error);
    } else {
      r.record(label("covariance_se", p.t_list[j]), c.std_error);
    }
  }
  return finish(std::move(r), timer);
}

ExperimentReport exp_birkhoff(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("birkhoff", model, p, ctx);
  const TestFunction f = TestFunction::parse(p.f);
  const auto ho = hat_options(p);
  ReplicateStreams s(ctx.seed, 0);
  const double hat0 = sample_hat_I(model, ho, s.hat);
  const ExpFunctional path = simulate_functional(model, p.horizon, path_options(p), s.path);
  const double average = integrate_along_V(path, std::log(hat0), p.horizon, f.fn) / p.horizon;

  std::vector<double> draws(p.n_mc);
  parallel_for(p.n_mc, ctx.threads, [&](std::size_t i) {
    RandomStream rng(ctx.seed, i + 1);
    draws[i] = f(sample_hat_I(model, ho, rng));
  });
  const SampleSummary mc = summarize(draws);
  r.record("time_average", average);
  r.record("mc_mean", mc.mean);
  r.record("mc_std_error", mc.std_error);
  const double rel = mc.mean != 0.0 ? std::abs(average - mc.mean) / std::abs(mc.mean) : std::abs(average);
  r.gate("relative_error", rel, "<=", p.tolerance, rel <= p.tolerance);
  return finish(std::move(r), timer);
}

ExperimentReport exp_hopf_ratio(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("hopf-ratio", model, p, ctx);
  const TestFunction f = TestFunction::parse(p.f);
  const TestFunction g = TestFunction::parse(p.g);
  if (!(p.start > 0.0)) throw Error(ErrorKind::ConfigError, "start must be positive");
  const auto po = path_options(p);
  const double log_v0 = -std::log(p.start);
  // U(r) = 1/V(s) with dr = ds/V(s), so int f(U) dr = int f(1/V)/V ds.
  auto weight = [](const TestFunction& fn) { return [&fn](double v) { return fn(1.0 / v) / v; }; };
  std::vector<double> num(p.n_reps), den(p.n_reps), t_time(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    ExpFunctional path = simulate_functional(model, 1.0, po, s.path);
    ensure_log_range(path, model, log_v0 + log_expm1(p.horizon), s.path, 64, po.max_points);
    const double s_end = path.tau_shifted(log_v0 + p.horizon, log_v0);
    num[i] = integrate_along_V(path, log_v0, s_end, weight(f));
    den[i] = integrate_along_V(path, log_v0, s_end, weight(g));
    t_time[i] = s_end;
  });
  double sn = 0.0, sd = 0.0, worst_t_gap = 0.0;
  for (std::size_t i = 0; i < p.n_reps; ++i) {
    sn += num[i];
    sd += den[i];
    worst_t_gap = std::max(worst_t_gap, std::abs(den[i] - t_time[i]) / std::max(1.0, t_time[i]));
  }
  const double ratio = sn / sd;

  NuFunctional nu{model, hat_options(p)};
  const Estimate nf = nu_integral(nu, f.fn, p.n_mc, ctx.seed ^ 0x9e3779b97f4a7c15ull, ctx.threads);
  const Estimate ng = nu_integral(nu, g.fn, p.n_mc, ctx.seed ^ 0x9e3779b97f4a7c15ull, ctx.threads);
  const double oracle = nf.value / ng.value;
  r.record("ratio", ratio);
  r.record("nu_f", nf.value);
  r.record("nu_f_se", nf.std_error);
  r.record("nu_g", ng.value);
  r.record("nu_g_se", ng.std_error);
  r.record("oracle_ratio", oracle);
  if (g.name == "inverse") r.record("max_rel_gap_denominator_vs_T", worst_t_gap);
  const double rel = std::abs(ratio - oracle) / std::abs(oracle);
  r.gate("relative_error", rel, "<=", p.tolerance, rel <= p.tolerance);
  return finish(std::move(r), timer);
}

namespace {

struct TimeChangeSample {
  std::vector<std::vector<double>> normalized;  // [t index][replicate]
  std::vector<std::vector<double>> coupled;     // first-passage reference, stable drivers only
};

// Samples T(t) / norm(t) over scenes; for stable drivers also the first passage
// time of xi over level t, normalized the same way.
TimeChangeSample sample_time_change(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx,
                                    const std::function<double(double)>& norm, bool with_first_passage) {
  const double t_max = max_of(p.t_list);
  const auto ho = hat_options(p);
  const auto po = path_options(p);
  TimeChangeSample out;
  out.normalized.assign(p.t_list.size(), std::vector<double>(p.n_reps));
  if (with_first_passage) out.coupled.assign(p.t_list.size(), std::vector<double>(p.n_reps));
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    const double hat0 = sample_hat_I(model, ho, s.hat);
    StationaryScene scene(hat0, simulate_functional(model, 1.0, po, s.path));
    scene.extend_for(model, t_max, s.path, 64, po.max_points);
    if (with_first_passage) {
      for (int k = 0; scene.forward().xi(scene.horizon()) < t_max; ++k) {
        if (k > 64) throw Error(ErrorKind::OutOfRange, "first-passage extension budget exhausted");
        scene.extend_to(model, 2.0 * scene.horizon(), s.path, po.max_points);
      }
    }
    for (std::size_t j = 0; j < p.t_list.size(); ++j) {
      const double t = p.t_list[j];
      out.normalized[j][i] = scene.T(t) / norm(t);
      if (with_first_passage) {
        // first knot at which the nondecreasing path reaches level t
        const ExpFunctional& f = scene.forward();
        std::size_t lo = 0, hi = f.segment_count();
        while (hi - lo > 1) {
          const std::size_t mid = lo + (hi - lo) / 2;
          if (f.segment(mid).xi0 >= t) hi = mid;
          else lo = mid;
        }
        double passage = f.segment(lo).xi0 >= t ? f.segment(lo).t0 : f.horizon();
        if (hi < f.segment_count()) passage = f.segment(hi).t0;
        const Segment seg = f.segment(lo);
        if (seg.slope > 0.0 && seg.xi0 < t && seg.xi0 + seg.slope * (seg.t1 - seg.t0) >= t)
          passage = seg.t0 + (t - seg.xi0) / seg.slope;
        out.coupled[j][i] = passage / norm(t);
      }
    }
  });
  return out;
}

}  // namespace

ExperimentReport exp_darling_kac(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("darling-kac", model, p, ctx);
  const bool stable = model.is_stable();
  const Normalizers norm{stable ? model.alpha : p.alpha, stable ? model.scale : 1.0};
  if (!stable) r.notes.push_back("driver is not stable: no alpha-stable limit, moments are expected to diverge");
  if (model.family == Family::StableSubordinatorDrift)
    r.notes.push_back("linear drift is negligible against t^{1/alpha}; limit law unchanged");

  const TimeChangeSample sample =
      sample_time_change(model, p, ctx, [&](double t) { return norm.a(t); }, stable);

  std::vector<double> reference(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    RandomStream rng = RandomStream(ctx.seed, i).split(3);
    reference[i] = norm.limit_scale() * ml_sample(norm.alpha, rng);
  });

  const double m1 = norm.limit_scale() * ml_moment(norm.alpha, 1);
  const double m2 = norm.limit_scale() * norm.limit_scale() * ml_moment(norm.alpha, 2);
  r.record("ml_moment_1", m1);
  r.record("ml_moment_2", m2);
  std::size_t last = 0;
  for (std::size_t j = 0; j < p.t_list.size(); ++j)
    if (p.t_list[j] > p.t_list[last]) last = j;

  double prev_ks = std::numeric_limits<double>::infinity();
  bool ks_monotone = true;
  for (std::size_t j = 0; j < p.t_list.size(); ++j) {
    const double t = p.t_list[j];
    const auto& y = sample.normalized[j];
    double e1 = 0.0, e2 = 0.0;
    for (double v : y) {
      e1 += v;
      e2 += v * v;
    }
    e1 /= static_cast<double>(y.size());
    e2 /= static_cast<double>(y.size());
    r.record(label("mean", t), e1);
    r.record(label("second_moment", t), e2);
    const KsResult ks = ks_two_sample(y, reference);
    r.record(label("ks_vs_ml_sample", t), ks.statistic);
    if (stable) {
      const KsResult kc = ks_two_sample(y, sample.coupled[j]);
      r.record(label("ks_vs_coupled_ml", t), kc.statistic);
      ks_monotone = ks_monotone && kc.statistic < prev_ks;
      prev_ks = kc.statistic;
    }
    if (j == last) {
      const double rel1 = std::abs(e1 - m1) / m1;
      const double rel2 = std::abs(e2 - m2) / m2;
      r.gate(label("mean_rel_error", t), rel1, "<=", p.mean_tol, rel1 <= p.mean_tol);
      r.gate(label("second_moment_rel_error", t), rel2, "<=", p.second_tol, rel2 <= p.second_tol);
    }
  }
  if (stable) r.record("ks_coupled_monotone_decreasing", ks_monotone ? 1.0 : 0.0);
  return finish(std::move(r), timer);
}

ExperimentReport exp_negative_control(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("negative-control", model, p, ctx);
  if (mean_class(model) != MeanClass::FiniteMeanPositive) {
    r.notes.push_back("not applicable: xi_1 is not integrable, T(t)/t has no constant limit");
    r.gate("finite_mean_precondition", 0.0, "==", 1.0, false);
    return finish(std::move(r), timer);
  }
  const TimeChangeSample sample = sample_time_change(model, p, ctx, [](double t) { return t; }, false);
  std::size_t first = 0, last = 0;
  for (std::size_t j = 0; j < p.t_list.size(); ++j) {
    if (p.t_list[j] < p.t_list[first]) first = j;
    if (p.t_list[j] > p.t_list[last]) last = j;
  }
  std::vector<SampleSummary> sums;
  for (std::size_t j = 0; j < p.t_list.size(); ++j) {
    sums.push_back(summarize(sample.normalized[j]));
    r.record(label("mean", p.t_list[j]), sums.back().mean);
    r.record(label("variance", p.t_list[j]), sums.back().variance);
  }
  const double v0 = sums[first].variance, v1 = sums[last].variance;
  const double ratio = v0 > 0.0 ? v1 / v0 : (v1 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.gate("variance_ratio", ratio, "<", p.var_ratio_max, ratio < p.var_ratio_max);
  r.gate(label("mean_positive", p.t_list[last]), sums[last].mean, ">", 0.0, sums[last].mean > 0.0);
  return finish(std::move(r), timer);
}

namespace {

// U-time of the first entry of U into (lo, hi), or +inf. On each segment V
// solves dV = (1 - b V) ds, hence U = 1/V is monotone between knots.
double first_entry_time(const ExpFunctional& f, double log_v0, double lo, double hi, double u_horizon) {
  for (std::size_t k = 0; k < f.segment_count(); ++k) {
    const Segment s = f.segment(k);
    const double len = s.t1 - s.t0;
    auto log_level = [&](double u) { return log_add_exp(log_v0, f.log_I_in_segment(k, u)); };
    auto u_at = [&](double u) { return std::exp(s.xi0 + s.slope * u - log_level(u)); };
    if (log_level(0.0) - log_v0 > u_horizon) break;
    const double a = u_at(0.0);
    const double b = u_at(len);
    if (std::max(a, b) <= lo || std::min(a, b) >= hi) continue;
    double u_hit = 0.0;
    if (!(a > lo && a < hi)) {
      const double boundary = a <= lo ? lo : hi;
      auto gap = [&](double u) { return u_at(u) - boundary; };
      std::uintmax_t iters = 100;
      const auto br = boost::math::tools::toms748_solve(gap, 0.0, len, gap(0.0), gap(len),
                                                        boost::math::tools::eps_tolerance<double>(40), iters);
      u_hit = br.second;
    }
    const double r = log_level(u_hit) - log_v0;
    return r <= u_horizon ? r : std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

ExperimentReport exp_recurrence(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("recurrence", model, p, ctx);
  const SupportInterval support = support_interval(model);
  if (!(p.x > 0.0) || !support.in_interior(1.0 / p.x)) {
    std::ostringstream os;
    os << "1/x = " << 1.0 / p.x << " is not inside the support interval (" << support.lower << ", " << support.upper << ")";
    throw Error(ErrorKind::InvalidTarget, os.str());
  }
  if (!(p.epsilon > 0.0)) throw Error(ErrorKind::ConfigError, "epsilon must be positive");
  std::vector<double> horizons = p.horizons.empty() ? std::vector<double>{p.horizon} : p.horizons;
  std::sort(horizons.begin(), horizons.end());
  const double h_max = horizons.back();
  const auto po = path_options(p);
  const double log_v0 = -std::log(p.start);
  std::vector<double> hit(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    ExpFunctional path = simulate_functional(model, 1.0, po, s.path);
    ensure_log_range(path, model, log_v0 + log_expm1(h_max), s.path, 64, po.max_points);
    hit[i] = first_entry_time(path, log_v0, p.x - p.epsilon, p.x + p.epsilon, h_max);
  });
  double prev = 0.0;
  bool monotone = true;
  for (double h : horizons) {
    const auto count = std::count_if(hit.begin(), hit.end(), [h](double v) { return v <= h; });
    const double frac = static_cast<double>(count) / static_cast<double>(p.n_reps);
    r.record(label("hit_fraction", h), frac);
    monotone = monotone && frac >= prev;
    prev = frac;
  }
  r.gate("fraction_nondecreasing", monotone ? 1.0 : 0.0, "==", 1.0, monotone);
  r.gate(label("hit_fraction_final", h_max), prev, ">=", p.min_fraction, prev >= p.min_fraction);
  return finish(std::move(r), timer);
}

namespace {

std::vector<double> hat_I_draws(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  const auto ho = hat_options(p);
  std::vector<double> out(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    RandomStream rng(ctx.seed, i);
    out[i] = sample_hat_I(model, ho, rng);
  });
  return out;
}

}  // namespace

ExperimentReport exp_invariant_mass(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("invariant-mass", model, p, ctx);
  const double oracle = mean_inverse_hat_I(model);
  std::vector<double> inv = hat_I_draws(model, p, ctx);
  for (double& v : inv) v = 1.0 / v;
  const SampleSummary s = summarize(inv);
  r.record("mc_mean_inverse_hat_I", s.mean);
  r.record("mc_std_error", s.std_error);
  r.record("oracle_mean_xi_1", oracle);
  if (std::isinf(oracle)) {
    r.notes.push_back("xi_1 is not integrable: the invariant measure is infinite and E[1/hat I] diverges");
    r.gate("finite_mass_precondition", 0.0, "==", 1.0, false);
  } else {
    const double band = std::max(0.01 * oracle, 3.0 * s.std_error);
    r.gate("abs_error", std::abs(s.mean - oracle), "<=", band, std::abs(s.mean - oracle) <= band);
  }
  return finish(std::move(r), timer);
}

ExperimentReport exp_moments(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("moments", model, p, ctx);
  const double o1 = moment_oracle(model, 1);
  const double o2 = moment_oracle(model, 2);
  const std::vector<double> draws = hat_I_draws(model, p, ctx);
  std::vector<double> sq(draws.size());
  std::transform(draws.begin(), draws.end(), sq.begin(), [](double v) { return v * v; });
  const SampleSummary s1 = summarize(draws);
  const SampleSummary s2 = summarize(sq);
  r.record("oracle_moment_1", o1);
  r.record("oracle_moment_2", o2);
  r.record("mc_moment_1", s1.mean);
  r.record("mc_moment_1_se", s1.std_error);
  r.record("mc_moment_2", s2.mean);
  r.record("mc_moment_2_se", s2.std_error);
  const double b1 = std::max(0.01 * o1, 3.0 * s1.std_error);
  const double b2 = std::max(0.01 * o2, 3.0 * s2.std_error);
  r.gate("abs_error_moment_1", std::abs(s1.mean - o1), "<=", b1, within_moment_band(s1.mean, o1, s1.std_error));
  r.gate("abs_error_moment_2", std::abs(s2.mean - o2), "<=", b2, within_moment_band(s2.mean, o2, s2.std_error));
  return finish(std::move(r), timer);
}

ExperimentReport exp_nu_identity(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("nu-identity", model, p, ctx);
  NuFunctional nu{model, hat_options(p)};
  const Estimate e = nu_integral(nu, TestFunction::inverse().fn, p.n_reps, ctx.seed, ctx.threads);
  r.record("nu_inverse", e.value);
  r.record("nu_inverse_se", e.std_error);
  const double band = std::max(3.0 * e.std_error, 1e-12);
  r.gate("abs_error", std::abs(e.value - 1.0), "<=", band, std::abs(e.value - 1.0) <= band);
  return finish(std::move(r), timer);
}

ExperimentReport exp_support(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("support", model, p, ctx);
  const SupportInterval support = support_interval(model);
  const double t = p.t_list.empty() ? 1.0 : p.t_list.front();
  const auto ho = hat_options(p);
  const auto po = path_options(p);
  std::vector<double> v(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    const double hat0 = sample_hat_I(model, ho, s.hat);
    const ExpFunctional path = simulate_functional(model, t, po, s.path);
    v[i] = eval_V(path, t, hat0);
  });
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  r.notes.push_back(std::string("support case ") + to_string(support.tag));
  r.record("support_lower", support.lower);
  r.record("support_upper", support.upper);
  r.gate("empirical_min", *mn, ">= lower*(1-0.01)", support.lower * 0.99, support.contains_inflated(*mn, 0.01));
  r.gate("empirical_max", *mx, "<= upper*(1+0.01)", support.upper * 1.01, support.contains_inflated(*mx, 0.01));
  if (support.tag == SupportCase::SubordinatorWithDrift) {
    const double cap = support.upper * (1.0 + 1e-9);
    r.gate("empirical_max_strict", *mx, "<=", cap, *mx <= cap);
  }
  return finish(std::move(r), timer);
}

ExperimentReport exp_patie(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("patie", model, p, ctx);
  const double t_max = max_of(p.t_list);
  const auto po = path_options(p);
  const double log_level = log_expm1(t_max) - std::log(p.start);
  std::vector<double> diff(p.n_reps), scaled(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    ExpFunctional path = simulate_functional(model, 1.0, po, s.path);
    ensure_log_range(path, model, log_level, s.path, 64, po.max_points);
    double worst = 0.0;
    for (double t : p.t_list) worst = std::max(worst, patie_identity_check(path, t, p.start).abs_diff);
    diff[i] = worst;
    const double tol = path.exact() ? 1e-9 : 20.0 * p.step * (1.0 + path.max_abs_xi(path.horizon()));
    scaled[i] = worst / tol;
  });
  r.record("max_abs_diff", *std::max_element(diff.begin(), diff.end()));
  const double worst = *std::max_element(scaled.begin(), scaled.end());
  r.gate("max_diff_over_tolerance", worst, "<", 1.0, worst < 1.0);
  return finish(std::move(r), timer);
}

ExperimentReport exp_additive_functional(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("additive-functional", model, p, ctx);
  const double t_max = max_of(p.t_list);
  const auto ho = hat_options(p);
  const auto po = path_options(p);
  std::vector<double> diff(p.n_reps), scaled(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    const double hat0 = sample_hat_I(model, ho, s.hat);
    const StationaryScene scene(hat0, simulate_functional(model, t_max, po, s.path));
    double worst = 0.0, worst_scaled = 0.0;
    for (double t : p.t_list) {
      const double d = std::abs(additive_functional_quadrature(scene, t) - scene.A(t));
      const double tol = scene.forward().exact() ? 1e-9 : grid_additive_tolerance(scene, t);
      worst = std::max(worst, d);
      worst_scaled = std::max(worst_scaled, d / tol);
    }
    diff[i] = worst;
    scaled[i] = worst_scaled;
  });
  r.record("max_abs_diff", *std::max_element(diff.begin(), diff.end()));
  const double worst = *std::max_element(scaled.begin(), scaled.end());
  r.gate("max_diff_over_tolerance", worst, "<", 1.0, worst < 1.0);
  return finish(std::move(r), timer);
}

ExperimentReport exp_duality(const LevyModel& model, const ExperimentParams& p, const RunContext& ctx) {
  Timer timer;
  auto r = begin("duality", model, p, ctx);
  const double t = p.t_list.empty() ? 2.0 : p.t_list.front();
  const auto po = path_options(p);
  std::vector<double> forward(p.n_reps), reversed(p.n_reps);
  parallel_for(p.n_reps, ctx.threads, [&](std::size_t i) {
    ReplicateStreams s(ctx.seed, i);
    const ExpFunctional a = simulate_functional(model, t, po, s.path);
    forward[i] = std::exp(a.log_I(t));
    const ExpFunctional b = simulate_functional(model, t, po, s.extra);
    // exp(xi_t) * int_0^t exp(-xi_u) du; on a grid the reversed walk uses the
    // right end of each cell so that it is a random walk of the same law.
    double log_j = kNegInf;
    for (std::size_t k = 0; k < b.segment_count(); ++k) {
      const Segment seg = b.segment(k);
      if (seg.t0 >= t) break;
      const double len = std::min(seg.t1, t) - seg.t0;
      if (b.exact()) {
        log_j = log_add_exp(log_j, -seg.xi0 + detail::log_exp_integral(-seg.slope, len));
      } else {
        const double right = k + 1 < b.segment_count() ? b.segment(k + 1).xi0 : b.xi(b.horizon());
        log_j = log_add_exp(log_j, -right + std::log(len));
      }
    }
    reversed[i] = std::exp(b.xi(t) + log_j);
  });
  const KsResult ks = ks_two_sample(forward, reversed, 1e-12);
  r.record("ks_statistic", ks.statistic);
  r.gate("ks_p_value", ks.p_value, ">", p.ks_alpha, ks.p_value > p.ks_alpha);
  return finish(std::move(r), timer);
}

}  // namespace lamperti
