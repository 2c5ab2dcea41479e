#include "lamperti/commands.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "lamperti/oracles.hpp"
#include "lamperti/processes.hpp"

namespace lamperti {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::RejectsModel:
    case ErrorKind::Unavailable:
    case ErrorKind::DegenerateModel:
    case ErrorKind::DomainRestricted:
    case ErrorKind::InvalidTarget:
    case ErrorKind::InvalidArgument:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  os << content;
  if (!os) throw Error(ErrorKind::InvalidArgument, "failed writing " + path.string());
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::path out(cfg.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::InvalidArgument, "cannot create output directory " + out.string());
  return out;
}

nlohmann::json manifest_base(const char* command, const RunConfig& cfg) {
  nlohmann::json m;
  m["command"] = command;
  m["model"] = cfg.model.id();
  m["model_keys"] = model_to_keys(cfg.model);
  m["seed"] = cfg.seed;
  return m;
}

// Shared error boundary: maps exceptions to exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, bool quiet, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.kind) throw Error(ErrorKind::ConfigError, "missing required key 'kind' in [experiment]");
    const std::size_t n_paths = cfg.n_reps_given ? cfg.params.n_reps : 1;
    const PathOptions po{cfg.params.step, kDefaultMaxGridPoints};
    const HatIOptions ho{cfg.params.rel_tol, cfg.params.step, std::size_t{1} << 20};
    std::vector<double> times(cfg.n_points);
    for (std::size_t k = 0; k < cfg.n_points; ++k)
      times[k] = cfg.t_max * static_cast<double>(k) / static_cast<double>(cfg.n_points - 1);

    std::vector<std::string> traj(n_paths), paths(n_paths);
    std::vector<double> starts(n_paths);
    parallel_for(n_paths, cfg.threads, [&](std::size_t i) {
      RandomStream rng(cfg.seed, i);
      const ProcessRealization proc(*cfg.kind, cfg.model, cfg.params.start, cfg.t_max, po, ho, rng);
      std::ostringstream os;
      write_trajectory_csv(os, proc, times);
      traj[i] = os.str();
      starts[i] = proc.start();
      if (cfg.export_path) {
        std::ostringstream ps;
        const ExpFunctional& f = proc.forward();
        std::vector<double> pt(cfg.n_points);
        for (std::size_t k = 0; k < cfg.n_points; ++k)
          pt[k] = f.horizon() * static_cast<double>(k) / static_cast<double>(cfg.n_points - 1);
        write_path_csv(ps, f, proc.kind() == ProcessKind::StationaryU ? 1.0 / proc.start() : 1.0 / cfg.params.start, pt);
        paths[i] = ps.str();
      }
    });

    const fs::path out = prepare_out(cfg);
    nlohmann::json m = manifest_base("simulate", cfg);
    m["kind"] = cfg.kind == ProcessKind::StationaryU ? "U-stationary"
                : cfg.kind == ProcessKind::LampertiX ? "X"
                : cfg.kind == ProcessKind::OuU       ? "U"
                                                     : "V";
    m["start"] = cfg.params.start;
    m["t_max"] = cfg.t_max;
    m["n_points"] = cfg.n_points;
    m["n_paths"] = n_paths;
    m["step"] = cfg.params.step;
    auto files = nlohmann::json::array();
    for (std::size_t i = 0; i < n_paths; ++i) {
      const std::string name = "trajectory_" + std::to_string(i) + ".csv";
      write_file(out / name, traj[i]);
      nlohmann::json e{{"file", name}, {"start", starts[i]}};
      if (cfg.export_path) {
        const std::string pname = "path_" + std::to_string(i) + ".csv";
        write_file(out / pname, paths[i]);
        e["path_file"] = pname;
      }
      files.push_back(std::move(e));
    }
    m["files"] = std::move(files);
    write_file(out / "manifest.json", m.dump(2) + "\n");
    if (!quiet) log << "wrote " << n_paths << " trajectories to " << out.string() << '\n';
    return int{kExitPass};
  });
}

int cmd_oracle(const RunConfig& cfg, bool quiet, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.model.is_subordinator())
      throw Error(ErrorKind::Unavailable, "moment oracle needs a subordinator, got " + cfg.model.id());
    std::ostringstream os;
    write_oracle_csv(os, cfg.model, cfg.n_max);
    const fs::path out = prepare_out(cfg);
    write_file(out / "oracle.csv", os.str());
    nlohmann::json m = manifest_base("oracle", cfg);
    m["n_max"] = cfg.n_max;
    m["files"] = {"oracle.csv"};
    write_file(out / "manifest.json", m.dump(2) + "\n");
    if (!quiet) log << os.str();
    return int{kExitPass};
  });
}

int cmd_verify(const RunConfig& cfg, bool quiet, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.experiment.empty()) throw Error(ErrorKind::ConfigError, "missing required key 'name' in [experiment]");
    const RunContext ctx{cfg.seed, cfg.threads};
    const ExperimentReport report = run_experiment(cfg.experiment, cfg.model, cfg.params, ctx);
    const fs::path out = prepare_out(cfg);
    write_file(out / "report.json", report.to_json().dump(2) + "\n");
    write_file(out / "report.csv", std::string(kReportCsvHeader) + report.to_csv_rows());
    nlohmann::json m = manifest_base("verify", cfg);
    m["experiment"] = cfg.experiment;
    m["files"] = {"report.json", "report.csv"};
    write_file(out / "manifest.json", m.dump(2) + "\n");
    if (!quiet) {
      for (const auto& s : report.stats) {
        log << "  " << s.name << " = " << s.value;
        if (s.gating) log << "  [" << s.rule << ' ' << s.threshold << (s.ok ? " ok" : " FAIL") << ']';
        log << '\n';
      }
      for (const auto& n : report.notes) log << "  note: " << n << '\n';
      log << report.name << " on " << report.model << ": " << (report.pass ? "PASS" : "FAIL") << '\n';
    }
    return report.pass ? int{kExitPass} : int{kExitStatFail};
  });
}

}  // namespace lamperti
