#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lamperti/experiments.hpp"
#include "lamperti/levy_model.hpp"
#include "lamperti/processes.hpp"

namespace lamperti {

/// Flat key-value description of a model, as it appears in a [model] section.
using KeyValues = std::map<std::string, std::string>;

/// Inverse of model_from_keys; numbers are written with round-trip precision.
KeyValues model_to_keys(const LevyModel& model);
/// Throws Error(ConfigError) naming the offending key for missing, unknown
/// or malformed entries.
LevyModel model_from_keys(const KeyValues& keys);

struct RunConfig {
  LevyModel model;
  std::string experiment;  // required by verify only
  ExperimentParams params;
  bool n_reps_given = false;

  std::optional<ProcessKind> kind;  // simulate
  double t_max = 10.0;
  std::size_t n_points = 101;
  bool export_path = false;
  int n_max = 10;  // oracle

  std::uint64_t seed = 1;
  std::string out = "out";
  unsigned threads = 1;

  KeyValues model_keys;
  KeyValues experiment_keys;
};

/// Parses an INI document with one [model] and one [experiment] section.
/// Experiment defaults come from default_params(name) and are overridden by
/// the keys present. Unknown sections and keys are rejected.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

ProcessKind parse_process_kind(const std::string& s);

}  // namespace lamperti
