#include "bvgraded/error.hpp"

namespace bvg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownGenerator: return "UnknownGenerator";
    case ErrorKind::GradingMismatch: return "GradingMismatch";
    case ErrorKind::Inhomogeneous: return "Inhomogeneous";
    case ErrorKind::JetOrderOverflow: return "JetOrderOverflow";
    case ErrorKind::NotTopForm: return "NotTopForm";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::NotLinear: return "NotLinear";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::GradingError: return "GradingError";
    case ErrorKind::RosterMismatch: return "RosterMismatch";
    case ErrorKind::UnsolvableRelation: return "UnsolvableRelation";
    case ErrorKind::IncompleteMap: return "IncompleteMap";
    case ErrorKind::NonTriangularElimination: return "NonTriangularElimination";
    case ErrorKind::Usage: return "Usage";
  }
  return "Error";
}

}  // namespace bvg
