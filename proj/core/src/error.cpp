#include "sociallearn/error.hpp"

#include <utility>

namespace sociallearn {

Error::Error(std::string code, const std::string& message, ErrorKind kind)
    : std::runtime_error(code + ": " + message), code_(std::move(code)), kind_(kind) {}

void fail_config(const std::string& code, const std::string& message) {
  throw Error(code, message, ErrorKind::config);
}

void fail_model(const std::string& code, const std::string& message) {
  throw Error(code, message, ErrorKind::model);
}

}  // namespace sociallearn
