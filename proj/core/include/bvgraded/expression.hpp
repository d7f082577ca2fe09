#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/rational.hpp>

#include "bvgraded/generator_table.hpp"
#include "bvgraded/grading.hpp"

namespace bvg {

using Rational = boost::rational<std::int64_t>;

// boost's mixed comparisons recurse forever under C++20 reversed candidates.
inline bool operator==(const Rational& a, int b) { return a.denominator() == 1 && a.numerator() == b; }

/// A product of generators. Non-coordinate factors are kept in ascending id
/// order; coordinate one-forms are packed into a bitmask and sit to the
/// right of every other factor in ascending coordinate order.
struct Monomial {
  std::vector<SymbolId> factors;
  std::uint8_t dx = 0;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;
};

struct Term {
  Monomial mono;
  Rational coeff;
};

class Expression {
 public:
  Expression() = default;
  explicit Expression(Rational c);
  static Expression generator(SymbolId id);
  static Expression fromTerms(std::vector<Term> terms);

  bool isZero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  /// Common grading of all terms; nullopt for zero.
  /// Throws Error(Inhomogeneous) when terms disagree.
  std::optional<Grading> totalGrading() const;
  bool isHomogeneous() const;
  /// Parity shared by all terms (0 for the zero expression).
  int parity() const;

  Expression& operator+=(const Expression& o);
  Expression& operator-=(const Expression& o);
  Expression& operator*=(Rational c);

  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  friend Expression operator-(Expression a) { return a *= Rational(-1); }
  friend Expression operator*(Expression a, Rational c) { return a *= c; }
  friend Expression operator*(Rational c, Expression a) { return a *= c; }
  friend Expression operator*(const Expression& a, const Expression& b);

  bool operator==(const Expression& o) const;

  /// Keeps only monomials for which `keep` returns true.
  template <class Pred>
  Expression filter(Pred keep) const {
    Expression out;
    for (const auto& t : terms_)
      if (keep(t)) out.terms_.push_back(t);
    return out;
  }

 private:
  std::vector<Term> terms_;
};

Expression multiply(const Expression& a, const Expression& b);

/// Graded left derivative d/ds acting from the left.
Expression leftDerivative(const Expression& expr, SymbolId s);
/// Graded right derivative acting from the right.
Expression rightDerivative(const Expression& expr, SymbolId s);

using SubstitutionRules = std::unordered_map<SymbolId, Expression>;

/// Simultaneous substitution. Each right-hand side must share the grading
/// of its key (zero is allowed).
Expression substitute(const Expression& expr, const SubstitutionRules& rules);

/// Degree (number of dx factors) filter.
Expression formPart(const Expression& expr, int degree);

/// Koszul-sorts a factor sequence in place. Returns 0 if an odd generator
/// repeats, otherwise the sign of the permutation.
int koszulSort(std::vector<SymbolId>& factors);

/// Canonical (re-sorted, merged) copy. Operation outputs are already
/// canonical, so this is idempotent on them.
Expression canonicalize(const Expression& expr);

std::string format(const Expression& expr);

bool containsSymbol(const Expression& expr, SymbolId s);

}  // namespace bvg
