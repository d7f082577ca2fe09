#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bvgraded/expression.hpp"

namespace bvg {

/// What the non-form index of a field ranges over.
enum class IndexKind {
  Scalar,     // no index
  Internal,   // W (and ∧²W via the internal Hodge dual)
  Tangent,    // upper coordinate index (vector fields)
  Cotangent,  // lower coordinate index (duals of vector fields)
};

std::string_view to_string(IndexKind kind);
int slotCount(IndexKind kind);

/// Sorted subsets of {0,1,2} of a given size, in lexicographic order.
const std::vector<std::vector<int>>& formIndexSets(int degree);

/// Sign of dx^I dx^J relative to dx^{I∪J} in ascending order; 0 if they overlap.
int wedgeSign(const std::vector<int>& first, const std::vector<int>& second);

struct JetField {
  std::string name;
  IndexKind kind = IndexKind::Scalar;
  int formDegree = 0;
  int ghost = 0;
  int maxJetOrder = 3;
  /// components[slot * sets + set]
  std::vector<SymbolId> components;

  Grading grading() const { return {ghost, formDegree}; }
  int componentParity() const { return ((ghost % 2) + 2) % 2; }
  int slots() const { return slotCount(kind); }
  SymbolId component(int slot, int set) const;
};

/// Process-wide registry of jet fields; fields are immutable once declared.
class FieldRegistry {
 public:
  static FieldRegistry& global();

  const JetField& declare(const std::string& name, IndexKind kind, int formDegree, int ghost,
                          int maxJetOrder = 3);
  const JetField* find(const std::string& name) const;
  const JetField& at(const std::string& name) const;
  /// Field owning a component symbol (any jet order), or nullptr.
  const JetField* owner(SymbolId id) const;
  /// (slot, set) position of a base component within its field.
  std::pair<int, int> position(SymbolId base) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::unique_ptr<JetField>> fields_;
  std::map<SymbolId, std::pair<const JetField*, std::pair<int, int>>> owners_;
};

/// Field-level value: one Expression per index slot.
struct Valued {
  IndexKind kind = IndexKind::Scalar;
  std::vector<Expression> c = std::vector<Expression>(1);

  static Valued scalar(Expression e);
  static Valued zero(IndexKind kind);
  static Valued ofField(const JetField& f);

  bool isZero() const;
  bool operator==(const Valued& o) const = default;
  Valued& operator+=(const Valued& o);
  Valued& operator-=(const Valued& o);
  Valued& operator*=(Rational r);
  friend Valued operator+(Valued a, const Valued& b) { return a += b; }
  friend Valued operator-(Valued a, const Valued& b) { return a -= b; }
  friend Valued operator*(Rational r, Valued a) { return a *= r; }
  friend Valued operator-(Valued a) { return a *= Rational(-1); }
};

// Internal so(2,1) data, η = diag(-1,1,1), ε_{123} = 1.
Rational eta(int i, int j);
int epsilon(int i, int j, int k);
/// f_{ij}^k = ε_{ijl} η^{lk}
Rational structureConstant(int i, int j, int k);

/// Total derivative ∂_b on jet polynomials.
Expression totalDerivative(const Expression& expr, int b);
Expression totalDerivative(const Expression& expr, const std::vector<int>& multiIndex);

Expression exteriorD(const Expression& expr);
Valued exteriorD(const Valued& v);

/// Scalar-weighted product a ∧ b where at least one side is scalar.
Valued wedge(const Valued& a, const Valued& b);
/// [a,b]: internal bracket for W-valued inputs, graded Lie bracket of vector
/// fields for tangent inputs.
Valued bracket(const Valued& a, const Valued& b);
/// Trace pairing: η-contraction for two factors, ε-contraction for three.
Expression trace(const std::vector<Valued>& factors);

Valued covariantD(const Valued& conn, const Valued& expr);
Valued curvature(const Valued& conn);
/// ι_v = Σ_a v^a ∂/∂dx^a.
Expression iota(const Valued& v, const Expression& expr);
Valued iota(const Valued& v, const Valued& expr);
/// Index contraction v^a w_a of a tangent and a cotangent value.
Expression contract(const Valued& v, const Valued& w);
/// Graded commutator [ι_v, d_conn]; a scalar-zero connection gives L_v.
Valued lieD(const Valued& v, const std::optional<Valued>& conn, const Valued& expr);

/// Top-form projection of a mixed-degree expression.
Expression topPart(const Expression& expr);
/// Coefficient of dx^1 dx^2 dx^3; throws NotTopForm otherwise.
Expression topCoefficient(const Expression& density);

/// Base (order-0) component symbols occurring in an expression.
std::vector<SymbolId> baseComponents(const Expression& expr);

/// Variational derivative with respect to one base component symbol,
/// returned as a top-form.
Expression eulerDerivative(const Expression& density, SymbolId baseComponent);
/// One Euler derivative per component of `field`.
std::vector<Expression> eulerDerivative(const Expression& density, const JetField& field);
/// Right-handed variant (right derivatives of the coefficient density).
Expression eulerDerivativeRight(const Expression& density, SymbolId baseComponent);

struct EqualityResult {
  bool equal = true;
  std::string witness;
  explicit operator bool() const { return equal; }
};

/// Equality of integrals over a closed manifold: the difference has vanishing
/// Euler derivative with respect to every component occurring in it.
EqualityResult functionalEqual(const Expression& d1, const Expression& d2);

/// Substitutes base components and extends each rule to the jets that occur.
Expression substituteFields(const Expression& expr, const SubstitutionRules& baseRules);

// Inverse triad ẽ^a_i adjoined to the generator table for a given triad field.
struct InverseTriad {
  const JetField* triad = nullptr;
  std::array<std::array<SymbolId, kDim>, kDim> inv{};  // inv[a][i] = ẽ^a_i

  static InverseTriad adjoin(const JetField& triad);
  /// Rewrites ẽ^a_i e^i_b → δ^a_b (and e^i_a ẽ^a_j → δ^i_j when `bothSides`).
  Expression normalize(const Expression& expr, bool bothSides = true, bool leftFirst = false) const;
};

/// Solves relations R_a = Σ_i x_i C_ij e^j_a + r_a = 0 (a = 1..3) for the
/// components x_i of `unknown` (slot i of its single form component).
std::vector<Expression> solveLinearInternal(const std::vector<Expression>& relations,
                                            const JetField& unknown, const InverseTriad& inverse);

}  // namespace bvg
