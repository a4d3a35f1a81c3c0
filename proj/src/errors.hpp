#pragma once

#include <stdexcept>
#include <string>

namespace imcf {

enum class ErrorCode {
  ok = 0,
  domain,
  non_positive_warping,
  inconsistency,
  step_too_large,
  degenerate_potential,
  cfl_violation,
  non_mean_convex,
  star_shape_lost,
  unknown_scenario,
  param_out_of_range,
  parse,
  validation,
  io,
  invalid_argument,
  internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace imcf
