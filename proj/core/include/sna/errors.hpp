#pragma once

#include <stdexcept>
#include <string>

namespace sna {

// Typed failure signals. Numeric routines throw Error with a code instead of
// returning sentinel values; the CLI maps codes to process exit codes.
enum class ErrorCode {
  ConfigError,         // malformed config file / flag values
  DegenerateExpansion, // continued fraction hits a (near-)rational remainder
  PrecisionExhausted,  // exact integer recurrence left the safe range
  NoFit,               // no (c,d) pair on the candidate ladder
  CapExceeded,         // orbit scan hit the iteration cap
  OutOfRange,          // fibre evaluated outside [0,L]
  NotDifferentiable,   // derivative requested at a kink without a side
  NotConverged,        // boundary iteration did not meet tol by n_max
  GridTooCoarse,       // probe boxes resolve to too few grid points
  NonInvariantGraph,   // graph fails the one-step invariance defect test
  DivergentIntegral,   // quadrature refinement does not settle
  LogGNotIntegrable,   // log g tail estimate diverges
  NoContraction,       // no derivative contraction for x >= 1
  NotFound,            // parameter search exhausted its grid
  DepthInsufficient,   // coefficient rule cannot satisfy the tail condition
  LadderInconsistent,  // interval ladder fails union/disjointness checks
  VariantPrecondition, // smooth variant violates its defining clauses
};

struct Error : std::runtime_error {
  ErrorCode code;
  Error(ErrorCode c, const std::string& what) : std::runtime_error(what), code(c) {}
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DegenerateExpansion: return "DegenerateExpansion";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::NoFit: return "NoFit";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotDifferentiable: return "NotDifferentiable";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NonInvariantGraph: return "NonInvariantGraph";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::LogGNotIntegrable: return "LogGNotIntegrable";
    case ErrorCode::NoContraction: return "NoContraction";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::DepthInsufficient: return "DepthInsufficient";
    case ErrorCode::LadderInconsistent: return "LadderInconsistent";
    case ErrorCode::VariantPrecondition: return "VariantPrecondition";
  }
  return "Unknown";
}

} // namespace sna
