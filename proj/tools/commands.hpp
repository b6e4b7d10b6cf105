#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace cdcv::cli {

// Each command reads its inputs from `config`, writes its artifacts into
// config.out and reports progress on `log`. Errors propagate as
// InputError / NumericalError.
void cmd_generate(const RunConfig& config, std::ostream& log);
void cmd_fit(const RunConfig& config, std::ostream& log);
void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_backtest(const RunConfig& config, std::ostream& log);
void cmd_sweep(const RunConfig& config, std::ostream& log);
void cmd_diagnostics(const RunConfig& config, std::ostream& log);

/// Full command-line entry point. Returns the process exit code:
/// 0 ok, 1 numerical failure, 2 input error. Failures print one JSON
/// object on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdcv::cli
