#pragma once

#include <string>
#include <vector>

#include "brfw/config.hpp"
#include "brfw/report.hpp"

namespace brfw {

const std::vector<std::string>& command_names();

/// Run one command and return its sealed report. Module errors are caught and
/// recorded in the report; invariant failures are listed as violations.
RunReport run_command(const std::string& command, const RunConfig& config);

}  // namespace brfw
