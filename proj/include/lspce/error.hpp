#pragma once

#include <stdexcept>
#include <string>

namespace lspce {

/// Library exception. `code()` is a short machine-readable tag
/// (e.g. "dimension_mismatch"), `what()` the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace lspce
