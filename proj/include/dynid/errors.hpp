#pragma once

#include <stdexcept>
#include <string>

namespace dynid {

/// Failure category. Each maps onto one CLI exit code.
enum class ErrorKind {
  kUsage = 1,    ///< bad arguments, precondition or stage-order violations
  kSchema = 2,   ///< malformed files or inconsistent dimensions in inputs
  kNumeric = 3,  ///< rank deficiency, ill-conditioning, non-convergence
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& msg) {
  return Error(ErrorKind::kUsage, msg);
}
inline Error schema_error(const std::string& msg) {
  return Error(ErrorKind::kSchema, msg);
}
inline Error numeric_error(const std::string& msg) {
  return Error(ErrorKind::kNumeric, msg);
}

}  // namespace dynid
