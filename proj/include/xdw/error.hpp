#pragma once

#include <stdexcept>
#include <string>

namespace xdw {

/// Engine failure carrying a machine-readable code (e.g. "target-not-coarser"),
/// a human message and, where applicable, a source location.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string &message, std::string location = {})
      : std::runtime_error(message), code_(std::move(code)), location_(std::move(location)) {}

  const std::string &code() const noexcept { return code_; }
  const std::string &location() const noexcept { return location_; }

private:
  std::string code_;
  std::string location_;
};

} // namespace xdw
