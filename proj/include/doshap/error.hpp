#ifndef DOSHAP_ERROR_HPP
#define DOSHAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace doshap {

// Error categories map 1:1 onto C API status codes and CLI exit codes.
enum class ErrorKind {
  parse = 2,        // malformed input files / JSON
  validation = 3,   // well-formed input violating a contract
  not_identifiable = 4,
  oracle = 5,       // value-function evaluation failure
  invalid_argument = 6,
  internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message) {
  throw Error(kind, std::move(message));
}

}  // namespace doshap

#endif
