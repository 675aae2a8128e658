#pragma once

#include <stdexcept>
#include <string>

namespace sociallearn {

// Config errors map to exit code 2 in the CLI, model errors to 3.
enum class ErrorKind { config, model };

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, ErrorKind kind);

  const std::string& code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string code_;
  ErrorKind kind_;
};

[[noreturn]] void fail_config(const std::string& code, const std::string& message);
[[noreturn]] void fail_model(const std::string& code, const std::string& message);

}  // namespace sociallearn
