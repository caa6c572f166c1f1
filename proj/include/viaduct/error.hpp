#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace viaduct {

enum class ErrorKind {
  invalid_fluidity,
  no_junction,
  bounds,
  shape,
  unsupported_representation,
  mode,
  budget,
  empty_input,
  not_in_kernel,
  synthesis_failure,
  parse,
  validation,
  io,
  scenario_mismatch,
  unverified,
};

std::string_view to_string(ErrorKind kind);

// Every library failure is raised as this type; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace viaduct
