#include "bvgraded/expression.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "bvgraded/error.hpp"

namespace bvg {
namespace {

const GeneratorTable& table() { return GeneratorTable::global(); }

int factorsParity(const std::vector<SymbolId>& f) {
  int p = 0;
  for (SymbolId id : f) p ^= table().parity(id);
  return p;
}

int monoParity(const Monomial& m) { return factorsParity(m.factors) ^ (std::popcount(m.dx) & 1); }

Grading monoGrading(const Monomial& m) {
  Grading g{0, std::popcount(m.dx)};
  for (SymbolId id : m.factors) g = g + table()[id].grading;
  return g;
}

// Product of two canonical monomials. Returns 0 when the product vanishes,
// otherwise the Koszul sign.
int mulMono(const Monomial& a, const Monomial& b, Monomial& out) {
  if (a.dx & b.dx) return 0;
  int sign = 1;
  out.factors.clear();
  out.factors.reserve(a.factors.size() + b.factors.size());
  if ((std::popcount(a.dx) & 1) && factorsParity(b.factors)) sign = -sign;
  int remA = factorsParity(a.factors);
  std::size_t i = 0, j = 0;
  const auto& A = a.factors;
  const auto& B = b.factors;
  while (i < A.size() && j < B.size()) {
    if (A[i] < B[j]) {
      remA ^= table().parity(A[i]);
      out.factors.push_back(A[i++]);
    } else if (B[j] < A[i]) {
      if (remA && table().parity(B[j])) sign = -sign;
      out.factors.push_back(B[j++]);
    } else {
      if (table().parity(A[i])) return 0;
      out.factors.push_back(A[i++]);
    }
  }
  while (i < A.size()) out.factors.push_back(A[i++]);
  while (j < B.size()) out.factors.push_back(B[j++]);
  for (int bit = 0; bit < kDim; ++bit) {
    if (b.dx & (1u << bit)) {
      if (std::popcount(static_cast<unsigned>(a.dx >> (bit + 1))) & 1) sign = -sign;
    }
  }
  out.dx = static_cast<std::uint8_t>(a.dx | b.dx);
  return sign;
}

std::vector<Term> mergeSorted(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.mono < y.mono; });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().mono == t.mono) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && out.back().coeff == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().coeff == 0) out.pop_back();
  return out;
}

void requireKnown(SymbolId s) {
  if (s >= table().size()) throw Error(ErrorKind::UnknownGenerator, "symbol id " + std::to_string(s));
}

}  // namespace

int koszulSort(std::vector<SymbolId>& f) {
  int sign = 1;
  for (std::size_t i = 1; i < f.size(); ++i) {
    for (std::size_t k = i; k > 0 && f[k] < f[k - 1]; --k) {
      if (table().parity(f[k]) && table().parity(f[k - 1])) sign = -sign;
      std::swap(f[k], f[k - 1]);
    }
  }
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i] == f[i - 1] && table().parity(f[i])) return 0;
  return sign;
}

Expression::Expression(Rational c) {
  if (c != 0) terms_.push_back({Monomial{}, c});
}

Expression Expression::generator(SymbolId id) {
  requireKnown(id);
  Expression e;
  Monomial m;
  if (table().isDx(id))
    m.dx = static_cast<std::uint8_t>(1u << id);
  else
    m.factors.push_back(id);
  e.terms_.push_back({std::move(m), Rational(1)});
  return e;
}

Expression Expression::fromTerms(std::vector<Term> terms) {
  Expression e;
  e.terms_ = mergeSorted(std::move(terms));
  return e;
}

std::optional<Grading> Expression::totalGrading() const {
  if (terms_.empty()) return std::nullopt;
  const Grading g = monoGrading(terms_.front().mono);
  for (const auto& t : terms_)
    if (monoGrading(t.mono) != g) throw Error(ErrorKind::Inhomogeneous, format(*this));
  return g;
}

bool Expression::isHomogeneous() const {
  try {
    (void)totalGrading();
    return true;
  } catch (const Error&) {
    return false;
  }
}

int Expression::parity() const {
  if (terms_.empty()) return 0;
  const int p = monoParity(terms_.front().mono);
  for (const auto& t : terms_)
    if (monoParity(t.mono) != p) throw Error(ErrorKind::Inhomogeneous, "mixed parity: " + format(*this));
  return p;
}

Expression& Expression::operator+=(const Expression& o) {
  if (o.terms_.empty()) return *this;
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].mono < o.terms_[j].mono)) {
      merged.push_back(std::move(terms_[i++]));
    } else if (i == terms_.size() || o.terms_[j].mono < terms_[i].mono) {
      merged.push_back(o.terms_[j++]);
    } else {
      Rational c = terms_[i].coeff + o.terms_[j].coeff;
      if (c != 0) merged.push_back({std::move(terms_[i].mono), c});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

Expression& Expression::operator-=(const Expression& o) { return *this += (o * Rational(-1)); }

Expression& Expression::operator*=(Rational c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coeff *= c;
  return *this;
}

bool Expression::operator==(const Expression& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].coeff != o.terms_[i].coeff || terms_[i].mono != o.terms_[i].mono) return false;
  return true;
}

Expression multiply(const Expression& a, const Expression& b) {
  if (a.isZero() || b.isZero()) return {};
  std::vector<Term> out;
  out.reserve(a.size() * b.size());
  Monomial m;
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms()) {
      const int s = mulMono(ta.mono, tb.mono, m);
      if (s == 0) continue;
      out.push_back({m, ta.coeff * tb.coeff * Rational(s)});
    }
  return Expression::fromTerms(std::move(out));
}

Expression operator*(const Expression& a, const Expression& b) { return multiply(a, b); }

Expression leftDerivative(const Expression& expr, SymbolId s) {
  requireKnown(s);
  std::vector<Term> out;
  if (table().isDx(s)) {
    const auto bit = static_cast<std::uint8_t>(1u << s);
    for (const auto& t : expr.terms()) {
      if (!(t.mono.dx & bit)) continue;
      int sign = factorsParity(t.mono.factors) ? -1 : 1;
      if (std::popcount(static_cast<unsigned>(t.mono.dx & (bit - 1))) & 1) sign = -sign;
      Monomial m{t.mono.factors, static_cast<std::uint8_t>(t.mono.dx & ~bit)};
      out.push_back({std::move(m), t.coeff * Rational(sign)});
    }
    return Expression::fromTerms(std::move(out));
  }
  const int ps = table().parity(s);
  for (const auto& t : expr.terms()) {
    const auto& f = t.mono.factors;
    auto it = std::lower_bound(f.begin(), f.end(), s);
    if (it == f.end() || *it != s) continue;
    const auto mult = std::count(it, f.end(), s);
    int before = 0;
    for (auto k = f.begin(); k != it; ++k) before ^= table().parity(*k);
    const int sign = (ps && before) ? -1 : 1;
    Monomial m;
    m.factors.reserve(f.size() - 1);
    m.factors.insert(m.factors.end(), f.begin(), it);
    m.factors.insert(m.factors.end(), it + 1, f.end());
    m.dx = t.mono.dx;
    out.push_back({std::move(m), t.coeff * Rational(sign * mult)});
  }
  return Expression::fromTerms(std::move(out));
}

Expression rightDerivative(const Expression& expr, SymbolId s) {
  requireKnown(s);
  std::vector<Term> out;
  if (table().isDx(s)) {
    const auto bit = static_cast<std::uint8_t>(1u << s);
    for (const auto& t : expr.terms()) {
      if (!(t.mono.dx & bit)) continue;
      const int after = std::popcount(static_cast<unsigned>(t.mono.dx >> (s + 1))) & 1;
      Monomial m{t.mono.factors, static_cast<std::uint8_t>(t.mono.dx & ~bit)};
      out.push_back({std::move(m), t.coeff * Rational(after ? -1 : 1)});
    }
    return Expression::fromTerms(std::move(out));
  }
  const int ps = table().parity(s);
  for (const auto& t : expr.terms()) {
    const auto& f = t.mono.factors;
    auto it = std::upper_bound(f.begin(), f.end(), s);
    if (it == f.begin() || *(it - 1) != s) continue;
    auto first = std::lower_bound(f.begin(), f.end(), s);
    const auto mult = it - first;
    int after = std::popcount(t.mono.dx) & 1;
    for (auto k = it; k != f.end(); ++k) after ^= table().parity(*k);
    const int sign = (ps && after) ? -1 : 1;
    Monomial m;
    m.factors.reserve(f.size() - 1);
    m.factors.insert(m.factors.end(), f.begin(), it - 1);
    m.factors.insert(m.factors.end(), it, f.end());
    m.dx = t.mono.dx;
    out.push_back({std::move(m), t.coeff * Rational(sign * static_cast<int>(mult))});
  }
  return Expression::fromTerms(std::move(out));
}

Expression substitute(const Expression& expr, const SubstitutionRules& rules) {
  for (const auto& [key, rhs] : rules) {
    requireKnown(key);
    if (table().isDx(key)) throw Error(ErrorKind::GradingMismatch, "coordinate one-forms cannot be substituted");
    if (rhs.isZero()) continue;
    const auto g = rhs.totalGrading();
    if (*g != table()[key].grading)
      throw Error(ErrorKind::GradingMismatch, "rule for " + table().label(key) + " changes the grading");
  }
  if (rules.empty()) return expr;

  std::vector<Term> out;
  // Terms are sorted, so consecutive monomials share factor prefixes.
  std::vector<Expression> prefix{Expression(Rational(1))};
  std::vector<SymbolId> prev;
  for (const auto& t : expr.terms()) {
    const auto& f = t.mono.factors;
    std::size_t common = 0;
    while (common < prev.size() && common < f.size() && prev[common] == f[common]) ++common;
    prefix.resize(common + 1);
    for (std::size_t k = common; k < f.size(); ++k) {
      auto it = rules.find(f[k]);
      const Expression next = it != rules.end() ? it->second : Expression::generator(f[k]);
      prefix.push_back(prefix.back() * next);
    }
    prev = f;
    const Expression& body = prefix.back();
    if (body.isZero()) continue;
    Monomial tail{{}, t.mono.dx};
    Monomial m;
    for (const auto& bt : body.terms()) {
      const int s = mulMono(bt.mono, tail, m);
      if (s == 0) continue;
      out.push_back({m, bt.coeff * t.coeff * Rational(s)});
    }
  }
  return Expression::fromTerms(std::move(out));
}

Expression formPart(const Expression& expr, int degree) {
  return expr.filter([degree](const Term& t) { return std::popcount(t.mono.dx) == degree; });
}

Expression canonicalize(const Expression& expr) {
  std::vector<Term> out;
  out.reserve(expr.size());
  for (const auto& t : expr.terms()) {
    Monomial m = t.mono;
    const int s = koszulSort(m.factors);
    if (s == 0) continue;
    out.push_back({std::move(m), t.coeff * Rational(s)});
  }
  return Expression::fromTerms(std::move(out));
}

bool containsSymbol(const Expression& expr, SymbolId s) {
  if (table().isDx(s)) {
    for (const auto& t : expr.terms())
      if (t.mono.dx & (1u << s)) return true;
    return false;
  }
  for (const auto& t : expr.terms())
    if (std::binary_search(t.mono.factors.begin(), t.mono.factors.end(), s)) return true;
  return false;
}

std::string format(const Expression& expr) {
  if (expr.isZero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : expr.terms()) {
    Rational c = t.coeff;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    c = boost::abs(c);
    bool needStar = false;
    const bool bare = t.mono.factors.empty() && t.mono.dx == 0;
    if (c != 1 || bare) {
      os << c.numerator();
      if (c.denominator() != 1) os << "/" << c.denominator();
      needStar = true;
    }
    for (SymbolId id : t.mono.factors) {
      if (needStar) os << "*";
      os << table().label(id);
      needStar = true;
    }
    for (int a = 0; a < kDim; ++a) {
      if (!(t.mono.dx & (1u << a))) continue;
      if (needStar) os << "*";
      os << "dx" << (a + 1);
      needStar = true;
    }
    first = false;
  }
  return os.str();
}

}  // namespace bvg
