#pragma once

#include <stdexcept>
#include <string>

namespace ttedepth {

enum class ErrorKind {
  kInvalidArgument,  // caller passed a value outside the operation's domain
  kData,             // input file or record content is malformed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& message) {
  throw Error(ErrorKind::kInvalidArgument, message);
}

[[noreturn]] inline void throw_data(const std::string& message) {
  throw Error(ErrorKind::kData, message);
}

}  // namespace ttedepth
