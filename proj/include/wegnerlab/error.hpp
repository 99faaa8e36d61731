#pragma once

#include <stdexcept>
#include <string>

namespace wl {

// Error categories map onto the CLI exit-code contract.
enum class ErrorKind {
  invalid_argument,
  config,
  resource_limit,
  numerical,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) {
  throw Error(ErrorKind::invalid_argument, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(what);
}

}  // namespace wl
