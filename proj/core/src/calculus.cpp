#include "bvgraded/calculus.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "bvgraded/error.hpp"

namespace bvg {
namespace {

GeneratorTable& table() { return GeneratorTable::global(); }

int valuedParity(const Valued& v) {
  for (const auto& e : v.c)
    if (!e.isZero()) return e.parity();
  return 0;
}

Expression volume(Expression coeff) {
  std::vector<Term> terms(coeff.terms().begin(), coeff.terms().end());
  for (auto& t : terms) t.mono.dx = 0b111;
  return Expression::fromTerms(std::move(terms));
}

void requireKind(const Valued& v, IndexKind kind, const char* what) {
  if (v.kind != kind)
    throw Error(ErrorKind::RankMismatch, std::string(what) + " expects " + std::string(to_string(kind)) +
                                             " input, got " + std::string(to_string(v.kind)));
}

}  // namespace

std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::Scalar: return "scalar";
    case IndexKind::Internal: return "internal";
    case IndexKind::Tangent: return "vector";
    case IndexKind::Cotangent: return "covector";
  }
  return "?";
}

int slotCount(IndexKind kind) { return kind == IndexKind::Scalar ? 1 : kDim; }

const std::vector<std::vector<int>>& formIndexSets(int degree) {
  static const std::array<std::vector<std::vector<int>>, 4> sets{
      std::vector<std::vector<int>>{{}},
      std::vector<std::vector<int>>{{0}, {1}, {2}},
      std::vector<std::vector<int>>{{0, 1}, {0, 2}, {1, 2}},
      std::vector<std::vector<int>>{{0, 1, 2}},
  };
  if (degree < 0 || degree > 3) throw Error(ErrorKind::GradingMismatch, "form degree out of range");
  return sets[static_cast<std::size_t>(degree)];
}

int wedgeSign(const std::vector<int>& first, const std::vector<int>& second) {
  int sign = 1;
  for (int b : second) {
    if (std::find(first.begin(), first.end(), b) != first.end()) return 0;
    for (int a : first)
      if (a > b) sign = -sign;
  }
  return sign;
}

SymbolId JetField::component(int slot, int set) const {
  const auto sets = static_cast<int>(formIndexSets(formDegree).size());
  return components.at(static_cast<std::size_t>(slot * sets + set));
}

// ---------------------------------------------------------------------------

FieldRegistry& FieldRegistry::global() {
  static FieldRegistry registry;
  return registry;
}

const JetField& FieldRegistry::declare(const std::string& name, IndexKind kind, int formDegree, int ghost,
                                       int maxJetOrder) {
  std::lock_guard lock(mutex_);
  if (auto it = fields_.find(name); it != fields_.end()) {
    const auto& f = *it->second;
    if (f.kind != kind || f.formDegree != formDegree || f.ghost != ghost)
      throw Error(ErrorKind::GradingMismatch, "field '" + name + "' redeclared with a different signature");
    if (f.maxJetOrder < maxJetOrder)
      throw Error(ErrorKind::JetOrderOverflow, "field '" + name + "' redeclared with a deeper jet order");
    return f;
  }
  auto field = std::make_unique<JetField>();
  field->name = name;
  field->kind = kind;
  field->formDegree = formDegree;
  field->ghost = ghost;
  field->maxJetOrder = maxJetOrder;
  const auto& sets = formIndexSets(formDegree);
  for (int slot = 0; slot < slotCount(kind); ++slot) {
    for (std::size_t s = 0; s < sets.size(); ++s) {
      std::vector<int> indices;
      if (kind != IndexKind::Scalar) indices.push_back(slot);
      indices.insert(indices.end(), sets[s].begin(), sets[s].end());
      const SymbolId id = table().component(name, std::move(indices), {ghost, 0}, maxJetOrder);
      field->components.push_back(id);
      owners_[id] = {field.get(), {slot, static_cast<int>(s)}};
    }
  }
  auto& ref = *field;
  fields_.emplace(name, std::move(field));
  return ref;
}

const JetField* FieldRegistry::find(const std::string& name) const {
  std::lock_guard lock(mutex_);
  auto it = fields_.find(name);
  return it == fields_.end() ? nullptr : it->second.get();
}

const JetField& FieldRegistry::at(const std::string& name) const {
  if (const auto* f = find(name)) return *f;
  throw Error(ErrorKind::UnknownGenerator, "unknown field '" + name + "'");
}

const JetField* FieldRegistry::owner(SymbolId id) const {
  const SymbolId base = table()[id].base;
  std::lock_guard lock(mutex_);
  auto it = owners_.find(base);
  return it == owners_.end() ? nullptr : it->second.first;
}

std::pair<int, int> FieldRegistry::position(SymbolId base) const {
  std::lock_guard lock(mutex_);
  auto it = owners_.find(base);
  if (it == owners_.end()) throw Error(ErrorKind::UnknownGenerator, table().label(base));
  return it->second.second;
}

// ---------------------------------------------------------------------------

Valued Valued::scalar(Expression e) { return Valued{IndexKind::Scalar, {std::move(e)}}; }

Valued Valued::zero(IndexKind kind) {
  return Valued{kind, std::vector<Expression>(static_cast<std::size_t>(slotCount(kind)))};
}

Valued Valued::ofField(const JetField& f) {
  Valued v = zero(f.kind);
  const auto& sets = formIndexSets(f.formDegree);
  for (int slot = 0; slot < f.slots(); ++slot) {
    std::vector<Term> terms;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      Monomial m;
      m.factors.push_back(f.component(slot, static_cast<int>(s)));
      for (int a : sets[s]) m.dx = static_cast<std::uint8_t>(m.dx | (1u << a));
      terms.push_back({std::move(m), Rational(1)});
    }
    v.c[static_cast<std::size_t>(slot)] = Expression::fromTerms(std::move(terms));
  }
  return v;
}

bool Valued::isZero() const {
  return std::all_of(c.begin(), c.end(), [](const Expression& e) { return e.isZero(); });
}

Valued& Valued::operator+=(const Valued& o) {
  if (o.isZero()) return *this;
  if (isZero()) return *this = o;
  if (kind != o.kind) throw Error(ErrorKind::RankMismatch, "adding values of different index kinds");
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
  return *this;
}

Valued& Valued::operator-=(const Valued& o) { return *this += (Rational(-1) * o); }

Valued& Valued::operator*=(Rational r) {
  for (auto& e : c) e *= r;
  return *this;
}

// ---------------------------------------------------------------------------

Rational eta(int i, int j) {
  if (i != j) return 0;
  return i == 0 ? -1 : 1;
}

int epsilon(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  int inv = (i > j) + (i > k) + (j > k);
  return (inv % 2) ? -1 : 1;
}

Rational structureConstant(int i, int j, int k) {
  Rational out = 0;
  for (int l = 0; l < kDim; ++l) out += Rational(epsilon(i, j, l)) * eta(l, k);
  return out;
}

// ---------------------------------------------------------------------------

Expression totalDerivative(const Expression& expr, int b) {
  std::vector<Term> out;
  for (const auto& t : expr.terms()) {
    const auto& f = t.mono.factors;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (table()[f[k]].role != SymbolRole::Component) continue;
      Monomial m = t.mono;
      m.factors[k] = table().raise(f[k], b);
      const int s = koszulSort(m.factors);
      if (s == 0) continue;
      out.push_back({std::move(m), t.coeff * Rational(s)});
    }
  }
  return Expression::fromTerms(std::move(out));
}

Expression totalDerivative(const Expression& expr, const std::vector<int>& multiIndex) {
  Expression out = expr;
  for (int b : multiIndex) out = totalDerivative(out, b);
  return out;
}

Expression exteriorD(const Expression& expr) {
  Expression out;
  for (int b = 0; b < kDim; ++b) out += Expression::generator(table().dx(b)) * totalDerivative(expr, b);
  return out;
}

Valued exteriorD(const Valued& v) {
  Valued out = Valued::zero(v.kind);
  for (std::size_t i = 0; i < v.c.size(); ++i) out.c[i] = exteriorD(v.c[i]);
  return out;
}

Valued wedge(const Valued& a, const Valued& b) {
  if (a.kind == IndexKind::Scalar) {
    Valued out = Valued::zero(b.kind);
    for (std::size_t i = 0; i < b.c.size(); ++i) out.c[i] = a.c[0] * b.c[i];
    return out;
  }
  if (b.kind == IndexKind::Scalar) {
    Valued out = Valued::zero(a.kind);
    for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = a.c[i] * b.c[0];
    return out;
  }
  throw Error(ErrorKind::RankMismatch, "wedge of two indexed values needs a bracket or trace");
}

Valued bracket(const Valued& a, const Valued& b) {
  if (a.kind == IndexKind::Internal && b.kind == IndexKind::Internal) {
    Valued out = Valued::zero(IndexKind::Internal);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        if (i == j) continue;
        const Expression prod = a.c[static_cast<std::size_t>(i)] * b.c[static_cast<std::size_t>(j)];
        if (prod.isZero()) continue;
        for (int k = 0; k < kDim; ++k) {
          const Rational f = structureConstant(i, j, k);
          if (f != 0) out.c[static_cast<std::size_t>(k)] += prod * f;
        }
      }
    return out;
  }
  if (a.kind == IndexKind::Tangent && b.kind == IndexKind::Tangent) {
    const int sign = (valuedParity(a) && valuedParity(b)) ? -1 : 1;
    Valued out = Valued::zero(IndexKind::Tangent);
    for (int k = 0; k < kDim; ++k) {
      Expression acc;
      for (int l = 0; l < kDim; ++l) {
        acc += a.c[static_cast<std::size_t>(l)] * totalDerivative(b.c[static_cast<std::size_t>(k)], l);
        acc -= (b.c[static_cast<std::size_t>(l)] * totalDerivative(a.c[static_cast<std::size_t>(k)], l)) *
               Rational(sign);
      }
      out.c[static_cast<std::size_t>(k)] = std::move(acc);
    }
    return out;
  }
  throw Error(ErrorKind::RankMismatch, "bracket needs two internal or two vector values");
}

Expression trace(const std::vector<Valued>& factors) {
  std::vector<std::size_t> internal;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].kind == IndexKind::Internal)
      internal.push_back(k);
    else if (factors[k].kind != IndexKind::Scalar)
      throw Error(ErrorKind::RankMismatch, "trace over a coordinate-indexed value");
  }
  if (internal.size() != 0 && internal.size() != 2 && internal.size() != 3)
    throw Error(ErrorKind::RankMismatch, "trace needs total internal rank 2 or 3, got " +
                                             std::to_string(internal.size()));
  Expression out;
  std::vector<int> idx(internal.size(), 0);
  const int combos = internal.empty() ? 1 : (internal.size() == 2 ? 9 : 27);
  for (int n = 0; n < combos; ++n) {
    int rest = n;
    for (auto& i : idx) {
      i = rest % kDim;
      rest /= kDim;
    }
    Rational w = 1;
    if (idx.size() == 2) w = eta(idx[0], idx[1]);
    if (idx.size() == 3) w = epsilon(idx[0], idx[1], idx[2]);
    if (w == 0) continue;
    Expression prod(w);
    std::size_t next = 0;
    for (std::size_t k = 0; k < factors.size() && !prod.isZero(); ++k) {
      if (next < internal.size() && internal[next] == k)
        prod = prod * factors[k].c[static_cast<std::size_t>(idx[next++])];
      else
        prod = prod * factors[k].c[0];
    }
    out += prod;
  }
  return out;
}

Valued covariantD(const Valued& conn, const Valued& expr) {
  if (expr.kind == IndexKind::Scalar) return exteriorD(expr);
  requireKind(expr, IndexKind::Internal, "covariant derivative");
  requireKind(conn, IndexKind::Internal, "connection");
  return exteriorD(expr) + bracket(conn, expr);
}

Valued curvature(const Valued& conn) {
  requireKind(conn, IndexKind::Internal, "curvature");
  return exteriorD(conn) + Rational(1, 2) * bracket(conn, conn);
}

Expression iota(const Valued& v, const Expression& expr) {
  requireKind(v, IndexKind::Tangent, "contraction");
  Expression out;
  for (int a = 0; a < kDim; ++a) {
    const auto& va = v.c[static_cast<std::size_t>(a)];
    if (va.isZero()) continue;
    out += va * leftDerivative(expr, table().dx(a));
  }
  return out;
}

Valued iota(const Valued& v, const Valued& expr) {
  Valued out = Valued::zero(expr.kind);
  for (std::size_t i = 0; i < expr.c.size(); ++i) out.c[i] = iota(v, expr.c[i]);
  return out;
}

Expression contract(const Valued& v, const Valued& w) {
  requireKind(v, IndexKind::Tangent, "index contraction");
  requireKind(w, IndexKind::Cotangent, "index contraction");
  Expression out;
  for (std::size_t a = 0; a < v.c.size(); ++a) out += v.c[a] * w.c[a];
  return out;
}

Valued lieD(const Valued& v, const std::optional<Valued>& conn, const Valued& expr) {
  auto D = [&](const Valued& x) { return conn ? covariantD(*conn, x) : exteriorD(x); };
  const int iotaParity = (valuedParity(v) + 1) % 2;
  Valued out = iota(v, D(expr));
  Valued second = D(iota(v, expr));
  if (iotaParity) return out + second;
  return out - second;
}

// ---------------------------------------------------------------------------

Expression topPart(const Expression& expr) { return formPart(expr, kDim); }

Expression topCoefficient(const Expression& density) {
  std::vector<Term> terms;
  for (const auto& t : density.terms()) {
    if (t.mono.dx != 0b111) throw Error(ErrorKind::NotTopForm, format(density).substr(0, 200));
    terms.push_back({Monomial{t.mono.factors, 0}, t.coeff});
  }
  return Expression::fromTerms(std::move(terms));
}

std::vector<SymbolId> baseComponents(const Expression& expr) {
  std::set<SymbolId> bases;
  for (const auto& t : expr.terms())
    for (SymbolId id : t.mono.factors)
      if (table()[id].role == SymbolRole::Component) bases.insert(table()[id].base);
  return {bases.begin(), bases.end()};
}

namespace {

template <class Deriv>
Expression eulerImpl(const Expression& density, SymbolId base, Deriv deriv) {
  const Expression coeff = topCoefficient(density);
  std::set<SymbolId> jets;
  for (const auto& t : coeff.terms())
    for (SymbolId id : t.mono.factors)
      if (table()[id].role == SymbolRole::Component && table()[id].base == base) jets.insert(id);
  Expression out;
  for (SymbolId j : jets) {
    Expression part = totalDerivative(deriv(coeff, j), table()[j].jet);
    if (table()[j].jet.size() % 2) part *= Rational(-1);
    out += part;
  }
  return volume(std::move(out));
}

}  // namespace

Expression eulerDerivative(const Expression& density, SymbolId baseComponent) {
  return eulerImpl(density, table()[baseComponent].base,
                   [](const Expression& e, SymbolId s) { return leftDerivative(e, s); });
}

Expression eulerDerivativeRight(const Expression& density, SymbolId baseComponent) {
  return eulerImpl(density, table()[baseComponent].base,
                   [](const Expression& e, SymbolId s) { return rightDerivative(e, s); });
}

std::vector<Expression> eulerDerivative(const Expression& density, const JetField& field) {
  std::vector<Expression> out;
  out.reserve(field.components.size());
  for (SymbolId id : field.components) out.push_back(eulerDerivative(density, id));
  return out;
}

EqualityResult functionalEqual(const Expression& d1, const Expression& d2) {
  const Expression diff = d1 - d2;
  (void)topCoefficient(diff);
  for (SymbolId base : baseComponents(diff)) {
    const Expression e = eulerDerivative(diff, base);
    if (!e.isZero()) {
      std::string text = format(e);
      if (text.size() > 400) text = text.substr(0, 400) + " ...";
      return {false, "delta/delta " + table().label(base) + ": " + text};
    }
  }
  return {};
}

Expression substituteFields(const Expression& expr, const SubstitutionRules& baseRules) {
  SubstitutionRules rules;
  for (const auto& t : expr.terms())
    for (SymbolId id : t.mono.factors) {
      if (rules.count(id)) continue;
      const auto& sym = table()[id];
      auto it = baseRules.find(sym.base);
      if (it == baseRules.end() || sym.role != SymbolRole::Component) continue;
      rules.emplace(id, sym.jet.empty() ? it->second : totalDerivative(it->second, sym.jet));
    }
  for (const auto& [k, v] : baseRules)
    if (table()[k].role == SymbolRole::Parameter) rules.emplace(k, v);
  return substitute(expr, rules);
}

// ---------------------------------------------------------------------------

InverseTriad InverseTriad::adjoin(const JetField& triad) {
  if (triad.kind != IndexKind::Internal || triad.formDegree != 1)
    throw Error(ErrorKind::RankMismatch, "inverse triad needs an internal one-form");
  InverseTriad out;
  out.triad = &triad;
  for (int a = 0; a < kDim; ++a)
    for (int i = 0; i < kDim; ++i)
      out.inv[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] =
          table().component("~" + triad.name, {a, i}, {0, 0}, 0);
  return out;
}

namespace {

// One rewrite of the first redex found; returns false when none exists.
bool rewriteOnce(const Expression& expr, Expression& out, const InverseTriad& inv, bool inverseLeft) {
  const auto& e = *inv.triad;
  const int last = kDim - 1;
  for (std::size_t ti = 0; ti < expr.terms().size(); ++ti) {
    const auto& t = expr.terms()[ti];
    const auto& f = t.mono.factors;
    for (int p = 0; p < kDim; ++p)
      for (int q = 0; q < kDim; ++q) {
        // inverseLeft: ẽ^p_last e^last_q -> δ^p_q - Σ_{i<last} ẽ^p_i e^i_q
        // otherwise:   e^p_last ẽ^last_q -> δ^p_q - Σ_{a<last} e^p_a ẽ^a_q
        const SymbolId x = inverseLeft ? inv.inv[p][last] : e.component(p, last);
        const SymbolId y = inverseLeft ? e.component(last, q) : inv.inv[last][q];
        auto ix = std::find(f.begin(), f.end(), x);
        auto iy = std::find(f.begin(), f.end(), y);
        if (ix == f.end() || iy == f.end()) continue;
        std::vector<SymbolId> rest = f;
        rest.erase(std::find(rest.begin(), rest.end(), x));
        rest.erase(std::find(rest.begin(), rest.end(), y));
        Expression replacement(p == q ? Rational(1) : Rational(0));
        for (int k = 0; k < last; ++k) {
          const SymbolId u = inverseLeft ? inv.inv[p][k] : e.component(p, k);
          const SymbolId v = inverseLeft ? e.component(k, q) : inv.inv[k][q];
          replacement -= Expression::generator(u) * Expression::generator(v);
        }
        std::vector<Term> restTerm{{Monomial{rest, t.mono.dx}, t.coeff}};
        std::vector<Term> others;
        for (std::size_t k = 0; k < expr.terms().size(); ++k)
          if (k != ti) others.push_back(expr.terms()[k]);
        out = Expression::fromTerms(std::move(others)) +
              replacement * Expression::fromTerms(std::move(restTerm));
        return true;
      }
  }
  return false;
}

Expression exhaust(Expression expr, const InverseTriad& inv, bool inverseLeft) {
  Expression next;
  while (rewriteOnce(expr, next, inv, inverseLeft)) expr = std::move(next);
  return expr;
}

}  // namespace

Expression InverseTriad::normalize(const Expression& expr, bool bothSides, bool leftFirst) const {
  Expression cur = expr;
  for (int round = 0; round < 64; ++round) {
    Expression next = exhaust(cur, *this, !leftFirst);
    if (bothSides) next = exhaust(next, *this, leftFirst);
    if (next == cur) return next;
    cur = std::move(next);
  }
  return cur;
}

std::vector<Expression> solveLinearInternal(const std::vector<Expression>& relations, const JetField& unknown,
                                            const InverseTriad& inverse) {
  if (unknown.kind != IndexKind::Internal || formIndexSets(unknown.formDegree).size() != 1 ||
      relations.size() != static_cast<std::size_t>(kDim))
    throw Error(ErrorKind::RankMismatch, "solver expects three relations in a single-component internal unknown");
  const auto& e = *inverse.triad;
  std::vector<Expression> rel;
  for (const auto& r : relations) {
    bool top = !r.isZero() && r.terms().front().mono.dx == 0b111;
    rel.push_back(top ? topCoefficient(r) : r);
  }
  std::array<SymbolId, kDim> x{};
  for (int i = 0; i < kDim; ++i) x[static_cast<std::size_t>(i)] = unknown.component(i, 0);

  SubstitutionRules zero;
  for (SymbolId s : x) zero.emplace(s, Expression{});
  std::array<std::array<Rational, kDim>, kDim> C{};
  std::vector<Expression> rhs;
  for (int a = 0; a < kDim; ++a) {
    const auto& R = rel[static_cast<std::size_t>(a)];
    rhs.push_back(substituteFields(R, zero));
    for (int i = 0; i < kDim; ++i) {
      const Expression M = leftDerivative(R, x[static_cast<std::size_t>(i)]);
      for (SymbolId s : x)
        if (containsSymbol(M, s)) throw Error(ErrorKind::NotLinear, "unknown appears nonlinearly");
      Expression rebuilt;
      for (int j = 0; j < kDim; ++j) {
        const Expression cij = leftDerivative(M, e.component(j, a));
        if (!cij.isZero() && (cij.size() != 1 || !cij.terms().front().mono.factors.empty()))
          throw Error(ErrorKind::NotLinear, "coefficient matrix is not a constant multiple of the triad");
        const Rational c = cij.isZero() ? Rational(0) : cij.terms().front().coeff;
        if (a == 0)
          C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c;
        else if (C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != c)
          throw Error(ErrorKind::NotLinear, "coefficient matrix differs between relations");
        rebuilt += Expression::generator(e.component(j, a)) * c;
      }
      if (!(rebuilt == M)) throw Error(ErrorKind::NotLinear, "coefficient matrix is not a multiple of the triad");
    }
  }
  // Gauss-Jordan inverse of C.
  std::array<std::array<Rational, 2 * kDim>, kDim> aug{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      aug[i][j] = C[i][j];
      aug[i][j + kDim] = (i == j) ? 1 : 0;
    }
  for (int col = 0; col < kDim; ++col) {
    int piv = col;
    while (piv < kDim && aug[piv][col] == 0) ++piv;
    if (piv == kDim) throw Error(ErrorKind::UnsolvableRelation, "singular coefficient matrix");
    std::swap(aug[piv], aug[col]);
    const Rational p = aug[col][col];
    for (auto& v : aug[col]) v /= p;
    for (int r = 0; r < kDim; ++r) {
      if (r == col || aug[r][col] == 0) continue;
      const Rational f = aug[r][col];
      for (int k = 0; k < 2 * kDim; ++k) aug[r][k] -= f * aug[col][k];
    }
  }
  std::vector<Expression> solution(kDim);
  for (int i = 0; i < kDim; ++i) {
    Expression acc;
    for (int k = 0; k < kDim; ++k) {
      const Rational cinv = aug[k][i + kDim];
      if (cinv == 0) continue;
      for (int a = 0; a < kDim; ++a)
        acc -= rhs[static_cast<std::size_t>(a)] * Expression::generator(inverse.inv[a][k]) * cinv;
    }
    solution[static_cast<std::size_t>(i)] = std::move(acc);
  }
  return solution;
}

}  // namespace bvg
