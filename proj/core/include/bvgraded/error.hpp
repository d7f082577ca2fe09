#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bvg {

enum class ErrorKind {
  UnknownGenerator,
  GradingMismatch,
  Inhomogeneous,
  JetOrderOverflow,
  NotTopForm,
  RankMismatch,
  NotLinear,
  SyntaxError,
  GradingError,
  RosterMismatch,
  UnsolvableRelation,
  IncompleteMap,
  NonTriangularElimination,
  Usage,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace bvg
