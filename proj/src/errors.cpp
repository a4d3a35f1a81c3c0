#include "errors.hpp"

namespace imcf {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::domain: return "DomainError";
    case ErrorCode::non_positive_warping: return "NonPositiveWarping";
    case ErrorCode::inconsistency: return "InconsistencyError";
    case ErrorCode::step_too_large: return "StepTooLarge";
    case ErrorCode::degenerate_potential: return "DegeneratePotential";
    case ErrorCode::cfl_violation: return "CFLViolation";
    case ErrorCode::non_mean_convex: return "NonMeanConvex";
    case ErrorCode::star_shape_lost: return "StarShapeLost";
    case ErrorCode::unknown_scenario: return "UnknownScenario";
    case ErrorCode::param_out_of_range: return "ParamOutOfRange";
    case ErrorCode::parse: return "ParseError";
    case ErrorCode::validation: return "ValidationError";
    case ErrorCode::io: return "IOError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::internal: return "InternalError";
  }
  return "InternalError";
}

}  // namespace imcf
