#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bvgraded/calculus.hpp"
#include "bvgraded/error.hpp"

namespace bvg::dsl {

struct SourcePos {
  int line = 1;
  int column = 1;
  bool operator==(const SourcePos&) const = default;
};

/// SyntaxError / GradingError carrying a source position.
class Diagnostic : public Error {
 public:
  Diagnostic(ErrorKind kind, SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  SourcePos pos_;
  std::string message_;
};

enum class NodeKind {
  Field,     // name
  Number,    // value
  Lambda,
  Sum,       // children, signs
  Product,   // children, ops ('^' or '*')
  Bracket,   // [a, b]
  Trace,     // Tr[a]
  ExtD,      // d(a)
  CovD,      // D(conn, a)
  Curvature, // F[conn]
  Iota,      // i(v, a)
  Lie,       // lie(v, conn, a)
  LieFlat,   // L(v, a)
  Top,       // top(a)
  ExpIota,   // expi(v, a) = sum_k i(v)^k a / k!
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  SourcePos pos;
  std::string name;
  Rational value{0};
  std::vector<NodePtr> children;
  std::vector<int> signs;
  std::vector<char> ops;
};

/// Structural equality, ignoring positions.
bool sameTree(const Node& a, const Node& b);

NodePtr parseExpression(const std::string& text);
std::string print(const Node& node);

/// Internal tensors of rank <= 3, or a single tangent/cotangent index.
struct Tensor {
  IndexKind kind = IndexKind::Scalar;
  int rank = 0;
  std::vector<Expression> c = std::vector<Expression>(1);

  static Tensor from(const Valued& v);
  Valued valued() const;
  bool isZero() const;
};

class Scope {
 public:
  void bindField(const std::string& name, const JetField* field);
  void bindValue(const std::string& name, Tensor value);
  const JetField* field(const std::string& name) const;
  const Tensor* value(const std::string& name) const;

 private:
  std::map<std::string, const JetField*> fields_;
  std::map<std::string, Tensor> values_;
};

Tensor elaborate(const Node& node, const Scope& scope);
/// Elaborates to a scalar Expression (rank 0).
Expression elaborateScalar(const Node& node, const Scope& scope);

struct FieldDecl {
  std::string name;
  IndexKind kind = IndexKind::Scalar;
  int form = 0;
  int ghost = 0;
  int maxJet = 4;
  SourcePos pos;
};

struct PairDecl {
  std::string field, antifield;
  SourcePos pos;
};

struct SuperfieldDecl {
  std::string name;
  int degree = 0;
  NodePtr body;
  SourcePos pos;
};

struct Assignment {
  std::string target;
  NodePtr body;
  SourcePos pos;
};

/// An alternative reading of a printed formula, kept so the checks can
/// decide between readings instead of silently picking one.
struct Reading {
  std::string label;
  std::string target;  // "action" or a field name
  NodePtr body;
  SourcePos pos;
};

struct TheoryFile {
  int version = 1;
  std::string name;
  std::vector<std::string> notes;
  std::vector<FieldDecl> fields;
  std::vector<PairDecl> pairs;
  std::vector<SuperfieldDecl> superfields;
  NodePtr action;
  std::vector<Assignment> q;
  std::vector<Reading> readings;
};

TheoryFile parseTheory(const std::string& text);
std::string print(const TheoryFile& file);
bool sameFile(const TheoryFile& a, const TheoryFile& b);

/// A printed relation lhs = rhs between fields of the two charts.
struct Rule {
  NodePtr lhs, rhs;
  SourcePos pos;
};

struct GenFunFile {
  int version = 1;
  std::string name;
  std::vector<std::string> notes;
  std::vector<std::string> uses;
  std::vector<std::string> oldVars;
  std::vector<std::string> newVars;
  /// Auxiliary probe fields (not part of either theory).
  std::vector<FieldDecl> fields;
  std::vector<Assignment> lets;
  NodePtr body;
  std::vector<Rule> rules;
  std::vector<Reading> readings;
};

GenFunFile parseGenFun(const std::string& text);
std::string print(const GenFunFile& file);
bool sameFile(const GenFunFile& a, const GenFunFile& b);

struct Violation {
  SourcePos pos;
  std::string message;
};

struct GradingReport {
  std::vector<Violation> violations;
  bool clean() const { return violations.empty(); }
};

/// Registers the declared fields and returns a scope with fields and
/// superfields bound.
Scope bindTheory(const TheoryFile& file);
GradingReport validateGrading(const TheoryFile& file);

}  // namespace bvg::dsl
