#include "qcanon/errors.hpp"

namespace qcanon {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain_error: return "domain_error";
    case ErrorCode::infeasible_mean: return "infeasible_mean";
    case ErrorCode::empty_window: return "empty_window";
    case ErrorCode::empty_support: return "empty_support";
    case ErrorCode::degenerate_distribution: return "degenerate_distribution";
    case ErrorCode::underdetermined_fit: return "underdetermined_fit";
    case ErrorCode::degenerate_spectrum: return "degenerate_spectrum";
    case ErrorCode::no_solution: return "no_solution";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::invariant_violation: return "invariant_violation";
  }
  return "unknown";
}

}  // namespace qcanon
