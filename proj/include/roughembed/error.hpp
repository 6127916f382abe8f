#pragma once

#include <stdexcept>
#include <string>

namespace roughembed {

/// Base of every exception thrown by the library. `kind()` names the failure
/// class so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define ROUGHEMBED_ERROR(Name, Tag)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(Tag, what) {}      \
  }

ROUGHEMBED_ERROR(DomainError, "domain error");
ROUGHEMBED_ERROR(ParameterError, "parameter error");
ROUGHEMBED_ERROR(UnsupportedRepresentation, "unsupported representation");
ROUGHEMBED_ERROR(InvalidData, "invalid data");
ROUGHEMBED_ERROR(ApproximationFailure, "approximation failure");
ROUGHEMBED_ERROR(DegenerateDomain, "degenerate domain");
ROUGHEMBED_ERROR(TopologyError, "topology error");
ROUGHEMBED_ERROR(SolverError, "solver error");
ROUGHEMBED_ERROR(SingularityError, "singularity error");
ROUGHEMBED_ERROR(CoverageError, "coverage error");
ROUGHEMBED_ERROR(DegenerateJacobian, "degenerate jacobian");
ROUGHEMBED_ERROR(ConfigError, "config error");

#undef ROUGHEMBED_ERROR

}  // namespace roughembed
