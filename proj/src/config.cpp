#include "lamperti/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "lamperti/error.hpp"

namespace lamperti {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    config_error("key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    config_error("key '" + key + "': expected a nonnegative integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  config_error("key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  if (out.empty()) config_error("key '" + key + "': empty list");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Family parse_family(const std::string& s) {
  for (Family f : {Family::DeterministicDrift, Family::CompoundPoissonDrift, Family::BrownianDrift,
                   Family::StableSubordinator, Family::StableSubordinatorDrift})
    if (s == to_string(f)) return f;
  config_error("key 'family': unknown family '" + s + "'");
}

class KeyReader {
 public:
  KeyReader(const KeyValues& kv, std::string section) : kv_(kv), section_(std::move(section)) {}

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return trim(it->second);
  }
  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) config_error("missing required key '" + key + "' in [" + section_ + "]");
    return *v;
  }
  double number(const std::string& key) { return parse_double(key, require(key)); }
  double number(const std::string& key, double fallback) {
    const auto v = get(key);
    return v ? parse_double(key, *v) : fallback;
  }
  void reject_unused() const {
    for (const auto& [k, v] : kv_)
      if (!used_.contains(k)) config_error("unknown key '" + k + "' in [" + section_ + "]");
  }

 private:
  const KeyValues& kv_;
  std::string section_;
  std::set<std::string> used_;
};

}  // namespace

KeyValues model_to_keys(const LevyModel& m) {
  KeyValues kv;
  kv["family"] = to_string(m.family);
  switch (m.family) {
    case Family::DeterministicDrift:
      kv["b"] = format_double(m.drift);
      break;
    case Family::CompoundPoissonDrift:
      kv["lambda"] = format_double(m.rate);
      kv["b"] = format_double(m.drift);
      switch (m.jumps.kind) {
        case JumpKind::Constant:
          kv["jump"] = "constant";
          kv["jump_size"] = format_double(m.jumps.param);
          break;
        case JumpKind::Exponential:
          kv["jump"] = "exponential";
          kv["jump_rate"] = format_double(m.jumps.param);
          break;
        case JumpKind::Pareto:
          kv["jump"] = "pareto";
          kv["jump_index"] = format_double(m.jumps.param);
          break;
      }
      break;
    case Family::BrownianDrift:
      kv["sigma"] = format_double(m.sigma);
      kv["b"] = format_double(m.drift);
      break;
    case Family::StableSubordinator:
      kv["alpha"] = format_double(m.alpha);
      kv["c"] = format_double(m.scale);
      break;
    case Family::StableSubordinatorDrift:
      kv["alpha"] = format_double(m.alpha);
      kv["c"] = format_double(m.scale);
      kv["b"] = format_double(m.drift);
      break;
  }
  return kv;
}

LevyModel model_from_keys(const KeyValues& keys) {
  KeyReader r(keys, "model");
  const Family family = parse_family(r.require("family"));
  LevyModel m;
  switch (family) {
    case Family::DeterministicDrift:
      m = LevyModel::deterministic(r.number("b"));
      break;
    case Family::CompoundPoissonDrift: {
      const double lambda = r.number("lambda");
      const double b = r.number("b", 0.0);
      const std::string jump = r.get("jump").value_or("constant");
      JumpLaw law;
      if (jump == "constant") law = JumpLaw::constant(r.number("jump_size", 1.0));
      else if (jump == "exponential") law = JumpLaw::exponential(r.number("jump_rate"));
      else if (jump == "pareto") law = JumpLaw::pareto(r.number("jump_index"));
      else config_error("key 'jump': expected constant, exponential or pareto, got '" + jump + "'");
      m = LevyModel::compound_poisson(lambda, law, b);
      break;
    }
    case Family::BrownianDrift:
      m = LevyModel::brownian(r.number("sigma"), r.number("b"));
      break;
    case Family::StableSubordinator:
      m = LevyModel::stable(r.number("alpha"), r.number("c", 1.0));
      break;
    case Family::StableSubordinatorDrift:
      m = LevyModel::stable_with_drift(r.number("alpha"), r.number("c", 1.0), r.number("b"));
      break;
  }
  r.reject_unused();
  try {
    validate(m);
  } catch (const Error& e) {
    config_error(std::string("invalid model: ") + e.what());
  }
  return m;
}

ProcessKind parse_process_kind(const std::string& s) {
  if (s == "X") return ProcessKind::LampertiX;
  if (s == "U") return ProcessKind::OuU;
  if (s == "V") return ProcessKind::GouV;
  if (s == "U-stationary") return ProcessKind::StationaryU;
  config_error("key 'kind': expected X, U, V or U-stationary, got '" + s + "'");
}

RunConfig parse_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    config_error(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    KeyValues* target = nullptr;
    if (section == "model") target = &cfg.model_keys;
    else if (section == "experiment") target = &cfg.experiment_keys;
    else config_error("unknown section '" + section + "'");
    if (!body.data().empty()) config_error("key '" + section + "' outside of a section");
    for (const auto& [k, v] : body) target->emplace(k, v.data());
  }
  if (!tree.count("model")) config_error("missing section [model]");
  cfg.model = model_from_keys(cfg.model_keys);

  KeyReader r(cfg.experiment_keys, "experiment");
  cfg.experiment = r.get("name").value_or("");
  cfg.params = default_params(cfg.experiment);
  ExperimentParams& p = cfg.params;
  if (auto v = r.get("t_list")) p.t_list = parse_list("t_list", *v);
  if (auto v = r.get("horizons")) p.horizons = parse_list("horizons", *v);
  if (auto v = r.get("n_reps")) {
    p.n_reps = parse_u64("n_reps", *v);
    cfg.n_reps_given = true;
  }
  if (auto v = r.get("n_mc")) p.n_mc = parse_u64("n_mc", *v);
  if (auto v = r.get("f")) p.f = *v;
  if (auto v = r.get("g")) p.g = *v;
  p.horizon = r.number("horizon", p.horizon);
  p.step = r.number("step", p.step);
  p.rel_tol = r.number("rel_tol", p.rel_tol);
  p.start = r.number("start", p.start);
  p.x = r.number("x", p.x);
  p.epsilon = r.number("epsilon", p.epsilon);
  p.alpha = r.number("alpha", p.alpha);
  p.ks_alpha = r.number("ks_alpha", p.ks_alpha);
  p.tolerance = r.number("tolerance", p.tolerance);
  p.mean_tol = r.number("mean_tol", p.mean_tol);
  p.second_tol = r.number("second_tol", p.second_tol);
  p.var_ratio_max = r.number("var_ratio_max", p.var_ratio_max);
  p.min_fraction = r.number("min_fraction", p.min_fraction);

  if (auto v = r.get("kind")) cfg.kind = parse_process_kind(*v);
  cfg.t_max = r.number("t_max", cfg.t_max);
  if (auto v = r.get("n_points")) cfg.n_points = parse_u64("n_points", *v);
  if (auto v = r.get("export_path")) cfg.export_path = parse_bool("export_path", *v);
  if (auto v = r.get("n_max")) cfg.n_max = static_cast<int>(parse_u64("n_max", *v));
  if (auto v = r.get("seed")) cfg.seed = parse_u64("seed", *v);
  if (auto v = r.get("out")) cfg.out = *v;
  r.reject_unused();

  if (p.n_reps == 0) config_error("key 'n_reps' must be positive");
  if (!(p.step > 0.0)) config_error("key 'step' must be positive");
  if (!(p.rel_tol > 0.0 && p.rel_tol < 1.0)) config_error("key 'rel_tol' must lie in (0, 1)");
  if (!(cfg.t_max > 0.0)) config_error("key 't_max' must be positive");
  if (cfg.n_points < 2) config_error("key 'n_points' must be at least 2");
  if (cfg.n_max < 1 || cfg.n_max > 20) config_error("key 'n_max' must lie in [1, 20]");
  for (double t : p.t_list)
    if (!(t >= 0.0)) config_error("key 't_list': times must be nonnegative");
  TestFunction::parse(p.f);
  TestFunction::parse(p.g);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) config_error("cannot open config file '" + path + "'");
  return parse_config(is);
}

}  // namespace lamperti
