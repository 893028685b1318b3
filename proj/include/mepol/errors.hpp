#pragma once

#include <stdexcept>
#include <string>

namespace mepol {

// Error taxonomy; the numeric value doubles as the CLI exit code.
enum class ErrorKind {
  check_failure = 1,   // a validated property failed at its tolerance
  invalid_input = 2,   // bad configuration, non-finite data, contract violation
  numerical = 3,       // solver non-convergence, truncation budget exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& message) {
  throw Error(ErrorKind::invalid_input, message);
}

[[noreturn]] inline void fail_numerical(const std::string& message) {
  throw Error(ErrorKind::numerical, message);
}

[[noreturn]] inline void fail_check(const std::string& message) {
  throw Error(ErrorKind::check_failure, message);
}

}  // namespace mepol
