#ifndef QCANON_ERRORS_HPP
#define QCANON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qcanon {

// Machine-readable failure categories. The CLI maps these onto exit codes,
// so additions here need a corresponding entry in tools/.
enum class ErrorCode {
  domain_error,             // argument outside a function's domain
  infeasible_mean,          // target mean outside the open energy range
  empty_window,             // no replica configuration falls inside the window
  empty_support,            // q-exponential normalizer vanished everywhere
  degenerate_distribution,  // distribution has no support left to renormalize
  underdetermined_fit,      // too few informative points to fit
  degenerate_spectrum,      // all energies equal where variation is required
  no_solution,              // root bracketing failed
  parse_error,              // malformed input text
  invariant_violation,      // internal consistency check failed
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const char* code_name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace qcanon

#endif
