#pragma once

#include <iosfwd>

#include "lamperti/config.hpp"
#include "lamperti/error.hpp"

namespace lamperti {

enum ExitCode : int { kExitPass = 0, kExitStatFail = 1, kExitConfig = 2, kExitRuntime = 3 };

/// Exit code for a library error: caller mistakes map to 2, numerical or
/// simulation failures to 3.
int exit_code_for(ErrorKind kind) noexcept;

/// Each command writes its files under cfg.out, logs to `log` unless quiet,
/// and returns an exit code. Errors are reported on `err`.
int cmd_simulate(const RunConfig& cfg, bool quiet, std::ostream& log, std::ostream& err);
int cmd_oracle(const RunConfig& cfg, bool quiet, std::ostream& log, std::ostream& err);
int cmd_verify(const RunConfig& cfg, bool quiet, std::ostream& log, std::ostream& err);

}  // namespace lamperti
