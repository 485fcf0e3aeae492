#pragma once

#include <stdexcept>
#include <string>

namespace scrn {

// Every failure the library can report deliberately.  The code survives into
// CLI output (one-line JSON on stderr) so scripts can branch on it without
// parsing prose.
enum class ErrorCode {
    dimension_mismatch,
    empty_set,
    empty_class,
    not_convexly_separable,
    not_pairwise_separable,
    not_disjoint,
    degenerate_gamma,
    model_does_not_separate,
    sign_constraint_violated,
    parse_error,
    io_error,
    config_error,
    generation_failed,
    descent_violation,
    non_finite,
    internal_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code),
          detail_(message) {}

    ErrorCode code() const { return code_; }
    const std::string& detail() const { return detail_; }

  private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace scrn
