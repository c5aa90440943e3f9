#pragma once

#include <stdexcept>
#include <string>

namespace empot {

enum class ErrorCode {
  invalid_argument = 1,
  domain = 2,
  io = 3,
  solver = 4,
  budget_exhausted = 5,
  check_failed = 6,
};

/// Every library failure is reported through this exception; the C API maps
/// `code()` onto its status enum.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::invalid_argument, what);
}

}  // namespace empot
