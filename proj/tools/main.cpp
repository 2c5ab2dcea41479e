#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "lamperti/commands.hpp"

int main(int argc, char** argv) {
  using namespace lamperti;
  CLI::App app{"Lamperti / OU process simulator and verification harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> reps;
  unsigned threads = 1;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI config file")->required();
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--out", out, "output directory (overrides config)");
    sub->add_option("--reps", reps, "replicate count (overrides config)");
    sub->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "write trajectory CSVs");
  CLI::App* oracle = app.add_subcommand("oracle", "write the moment oracle table");
  CLI::App* verify = app.add_subcommand("verify", "run a named verification experiment");
  for (CLI::App* sub : {simulate, oracle, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  if (seed) cfg.seed = *seed;
  if (out) cfg.out = *out;
  if (reps) {
    if (*reps == 0) {
      std::cerr << "error: --reps must be positive\n";
      return kExitConfig;
    }
    cfg.params.n_reps = *reps;
    cfg.n_reps_given = true;
  }
  cfg.threads = resolve_threads(threads);

  if (simulate->parsed()) return cmd_simulate(cfg, quiet, std::cout, std::cerr);
  if (oracle->parsed()) return cmd_oracle(cfg, quiet, std::cout, std::cerr);
  return cmd_verify(cfg, quiet, std::cout, std::cerr);
}
