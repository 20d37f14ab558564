#pragma once

#include <stdexcept>
#include <string>

namespace srank {

enum class ErrorKind {
  NotFound,
  Parse,
  Duplicate,
  Conflict,
  Io,
  Transport,
  Unsupported,
  Credential,
  Config,
  Usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace srank
