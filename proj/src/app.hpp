#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace imcf {

struct ExecResult {
  int status = 0;  // 0 all asserted checks pass, 1 a check failed, 2 usage or configuration error
  std::vector<std::string> files;
  std::string message;
};

// Output directory precedence: explicit argument, config `out`, IMCF_LAB_OUT, then "imcf_out".
std::string resolve_out_dir(const RunConfig& config, const std::string& cli_out);

ExecResult execute(const RunConfig& config, const std::string& base_dir, const std::string& out_dir,
                   std::ostream& log);

int exit_status_for(ErrorCode code);

}  // namespace imcf
