#pragma once

#include <stdexcept>
#include <string>

namespace juliatwin {

// Failure categories. Each maps to a distinct CLI exit code.
enum class ErrorKind {
  kInput = 2,       // malformed map literal, bad argument, violated precondition
  kBudget = 3,      // degree or root budget exceeded
  kRootFinder = 4,  // simultaneous root solve did not converge
  kDomain = 5,      // mathematical precondition failed (resonance, slit, ...)
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

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace juliatwin
