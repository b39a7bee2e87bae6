#pragma once

#include <stdexcept>
#include <string>

namespace kaon {

/// Library error. `code()` is a short stable token (e.g. "invariant",
/// "infeasible") so front-ends can emit machine-parseable diagnostics.
class KaonError : public std::runtime_error {
 public:
  KaonError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace kaon
