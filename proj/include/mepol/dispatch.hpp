#pragma once

#include <string>

#include <json.hpp>

#include "mepol/config.hpp"

namespace mepol {

// dispatch.hpp — command execution.  Every run writes the fully resolved
// configuration (config_echo.json) and a machine-readable summary
// (summary.json) beside the command artifacts; the exit code is 0 when all
// configured checks pass, 1 on a check failure, 2 on input errors and 3 on
// numerical failures.

struct CommandResult {
  int exit_code = 0;
  nlohmann::json summary;
};

// command is one of: validate, factorize, modes, sumrule, spectra, synth.
CommandResult dispatch(const std::string& command, const RunConfig& cfg,
                       const std::string& out_dir);

}  // namespace mepol
