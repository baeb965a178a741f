#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgraph {

enum class Errc {
  invalid_geometry,
  invalid_partition,
  unsupported_condition,
  domain_error,
  root_refinement,
  not_an_eigenvalue,
  symmetry_unavailable,
  branch_ambiguity,
  step_too_coarse,
  parse_error,
  usage_error,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_geometry: return "invalid-geometry";
    case Errc::invalid_partition: return "invalid-partition";
    case Errc::unsupported_condition: return "unsupported-condition";
    case Errc::domain_error: return "domain-error";
    case Errc::root_refinement: return "root-refinement";
    case Errc::not_an_eigenvalue: return "not-an-eigenvalue";
    case Errc::symmetry_unavailable: return "symmetry-unavailable";
    case Errc::branch_ambiguity: return "branch-ambiguity";
    case Errc::step_too_coarse: return "step-too-coarse";
    case Errc::parse_error: return "parse-error";
    case Errc::usage_error: return "usage-error";
  }
  return "unknown";
}

/// Single exception type for the library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// Parse and usage problems are the caller's fault; everything else is computational.
  bool is_input_error() const noexcept {
    return code_ == Errc::parse_error || code_ == Errc::usage_error;
  }

 private:
  Errc code_;
};

}  // namespace qgraph
