#include "bvgraded/bv.hpp"

#include <algorithm>
#include <set>

#include "bvgraded/error.hpp"

namespace bvg {
namespace {

GeneratorTable& table() { return GeneratorTable::global(); }

int complementSet(int degree, int set) {
  const auto& mine = formIndexSets(degree)[static_cast<std::size_t>(set)];
  const auto& others = formIndexSets(kDim - degree);
  for (std::size_t k = 0; k < others.size(); ++k)
    if (wedgeSign(mine, others[k]) != 0) return static_cast<int>(k);
  throw Error(ErrorKind::RosterMismatch, "no complementary form component");
}

IndexKind dualKind(IndexKind k) {
  switch (k) {
    case IndexKind::Tangent: return IndexKind::Cotangent;
    case IndexKind::Cotangent: return IndexKind::Tangent;
    default: return k;
  }
}

Expression withVolume(const Expression& coeff) {
  std::vector<Term> terms(coeff.terms().begin(), coeff.terms().end());
  for (auto& t : terms) t.mono.dx = 0b111;
  return Expression::fromTerms(std::move(terms));
}

Expression placeForm(const Expression& coeff, const std::vector<int>& set) {
  std::vector<Term> terms(coeff.terms().begin(), coeff.terms().end());
  std::uint8_t mask = 0;
  for (int a : set) mask = static_cast<std::uint8_t>(mask | (1u << a));
  for (auto& t : terms) t.mono.dx = mask;
  return Expression::fromTerms(std::move(terms));
}

std::string clip(std::string s) {
  if (s.size() > 400) s = s.substr(0, 400) + " ...";
  return s;
}

}  // namespace

SymbolId lambdaSymbol() {
  static const SymbolId id = table().parameter("Lambda", {0, 0});
  return id;
}

const RosterEntry* Theory::entryFor(const std::string& name) const {
  for (const auto& e : roster)
    if (e.field->name == name || e.antifield->name == name) return &e;
  return nullptr;
}

std::vector<ComponentPair> Theory::pairs() const {
  std::vector<ComponentPair> out;
  for (const auto& e : roster) {
    auto p = componentPairs(e);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

bool Theory::covers(SymbolId base) const {
  const auto* owner = FieldRegistry::global().owner(base);
  return std::any_of(roster.begin(), roster.end(),
                     [&](const RosterEntry& e) { return e.field == owner || e.antifield == owner; });
}

Expression pairing(const Valued& antifield, const Valued& value) {
  switch (value.kind) {
    case IndexKind::Internal: return trace({antifield, value});
    case IndexKind::Scalar: return antifield.c[0] * value.c[0];
    case IndexKind::Tangent: return contract(value, antifield);
    case IndexKind::Cotangent: return contract(antifield, value);
  }
  return {};
}

std::vector<ComponentPair> componentPairs(const RosterEntry& entry) {
  const JetField& f = *entry.field;
  const JetField& a = *entry.antifield;
  if (a.kind != dualKind(f.kind) || a.formDegree != kDim - f.formDegree || a.ghost != -f.ghost - 1)
    throw Error(ErrorKind::RosterMismatch, "'" + a.name + "' is not the shifted dual of '" + f.name + "'");
  const JetField& probe = FieldRegistry::global().declare("?" + f.name, f.kind, f.formDegree, f.ghost + 1, 0);
  const Expression density = topCoefficient(pairing(Valued::ofField(a), Valued::ofField(probe)));
  std::vector<ComponentPair> out;
  const int sets = static_cast<int>(formIndexSets(f.formDegree).size());
  for (int slot = 0; slot < f.slots(); ++slot)
    for (int s = 0; s < sets; ++s) {
      ComponentPair p;
      p.field = f.component(slot, s);
      p.antifield = a.component(slot, complementSet(f.formDegree, s));
      p.fieldParity = f.componentParity();
      const Expression d = leftDerivative(density, p.antifield);
      const Expression x = Expression::generator(probe.component(slot, s));
      if (d == x)
        p.kappa = 1;
      else if (d == -x)
        p.kappa = -1;
      else
        throw Error(ErrorKind::RosterMismatch, "pairing of '" + f.name + "' is not diagonal");
      out.push_back(p);
    }
  return out;
}

Expression antibracketDensity(const Expression& f, const Expression& g, const std::vector<RosterEntry>& roster) {
  Theory scratch;
  scratch.roster = roster;
  auto check = [&](const Expression& d) {
    for (SymbolId base : baseComponents(d))
      if (!scratch.covers(base)) throw Error(ErrorKind::RosterMismatch, table().label(base) + " is outside the roster");
  };
  check(f);
  check(g);
  const bool same = (&f == &g) || f == g;
  Expression acc;
  for (const auto& p : scratch.pairs()) {
    const Expression rf = topCoefficient(eulerDerivativeRight(f, p.field));
    const Expression ra = topCoefficient(eulerDerivativeRight(f, p.antifield));
    const Expression lf = same && p.fieldParity == 0 ? Expression{} : topCoefficient(eulerDerivative(g, p.field));
    const Expression la = same && p.fieldParity == 0 ? Expression{} : topCoefficient(eulerDerivative(g, p.antifield));
    Expression term;
    if (same && p.fieldParity == 0) {
      // f = g: reuse right derivatives, left = ± right for homogeneous g.
      term = rf * topCoefficient(eulerDerivative(g, p.antifield)) - ra * topCoefficient(eulerDerivative(g, p.field));
    } else {
      term = rf * la - ra * lf;
    }
    const int sign = (p.fieldParity ? -1 : 1) * p.kappa;
    acc += term * Rational(sign);
  }
  return withVolume(acc);
}

QMap extractQ(const Expression& action, const std::vector<RosterEntry>& roster) {
  Theory scratch;
  scratch.roster = roster;
  for (SymbolId base : baseComponents(action))
    if (table()[base].role == SymbolRole::Component && !scratch.covers(base))
      throw Error(ErrorKind::RosterMismatch, table().label(base) + " is outside the roster");
  QMap q;
  for (const auto& p : scratch.pairs()) {
    q[p.field] = topCoefficient(eulerDerivative(action, p.antifield)) * Rational(p.kappa);
    q[p.antifield] = topCoefficient(eulerDerivative(action, p.field)) * Rational(p.kappa);
  }
  return q;
}

QMap extractQ(const Theory& theory) { return extractQ(lambdaCoefficient(theory.action, 0), theory.roster); }

Expression applyQ(const QMap& q, const Expression& expr) {
  std::set<SymbolId> jets;
  for (const auto& t : expr.terms())
    for (SymbolId id : t.mono.factors)
      if (table()[id].role == SymbolRole::Component && q.count(table()[id].base)) jets.insert(id);
  Expression out;
  for (SymbolId z : jets) {
    const auto& sym = table()[z];
    const Expression qz = totalDerivative(q.at(sym.base), sym.jet);
    if (qz.isZero()) continue;
    out += qz * leftDerivative(expr, z);
  }
  return out;
}

Valued assembleQ(const QMap& q, const JetField& field) {
  Valued out = Valued::zero(field.kind);
  const auto& sets = formIndexSets(field.formDegree);
  for (int slot = 0; slot < field.slots(); ++slot)
    for (std::size_t s = 0; s < sets.size(); ++s) {
      auto it = q.find(field.component(slot, static_cast<int>(s)));
      if (it == q.end()) throw Error(ErrorKind::RosterMismatch, "no Q for '" + field.name + "'");
      out.c[static_cast<std::size_t>(slot)] += placeForm(it->second, sets[s]);
    }
  return out;
}

Expression lambdaCoefficient(const Expression& expr, int power) {
  const SymbolId L = lambdaSymbol();
  std::vector<Term> out;
  for (const auto& t : expr.terms()) {
    const auto n = std::count(t.mono.factors.begin(), t.mono.factors.end(), L);
    if (n != power) continue;
    Monomial m = t.mono;
    m.factors.erase(std::remove(m.factors.begin(), m.factors.end(), L), m.factors.end());
    out.push_back({std::move(m), t.coeff});
  }
  return Expression::fromTerms(std::move(out));
}

int lambdaDegree(const Expression& expr) {
  const SymbolId L = lambdaSymbol();
  int deg = 0;
  for (const auto& t : expr.terms())
    deg = std::max(deg, static_cast<int>(std::count(t.mono.factors.begin(), t.mono.factors.end(), L)));
  return deg;
}

CheckOutcome checkCME(const Theory& theory, LambdaMode mode) {
  const Expression S = mode == LambdaMode::Zero ? lambdaCoefficient(theory.action, 0) : theory.action;
  const Expression bracket = antibracketDensity(S, S, theory.roster);
  const int top = lambdaDegree(bracket);
  for (int k = 0; k <= top; ++k) {
    const auto eq = functionalEqual(lambdaCoefficient(bracket, k), Expression{});
    if (!eq) return {false, "order Lambda^" + std::to_string(k) + ": " + eq.witness};
  }
  return {};
}

CheckOutcome checkQSquared(const Theory& theory, LambdaMode mode) {
  const Expression S = mode == LambdaMode::Zero ? lambdaCoefficient(theory.action, 0) : theory.action;
  const QMap q = extractQ(S, theory.roster);
  for (const auto& [z, qz] : q) {
    const Expression qq = applyQ(q, qz);
    if (!qq.isZero()) return {false, "Q^2(" + table().label(z) + ") = " + clip(format(qq))};
  }
  return {};
}

CheckOutcome checkExpectedQ(const Theory& theory) {
  const QMap q = extractQ(theory);
  for (const auto& [name, expected] : theory.expectedQ) {
    const Valued got = assembleQ(q, FieldRegistry::global().at(name));
    const Valued diff = got - expected;
    if (!diff.isZero()) {
      for (std::size_t i = 0; i < diff.c.size(); ++i)
        if (!diff.c[i].isZero())
          return {false, "Q(" + name + ")[" + std::to_string(i + 1) + "] - expected = " + clip(format(diff.c[i]))};
    }
  }
  return {};
}

OnShellReport checkOnShellCorrespondence(const JetField& b, const JetField& a, const JetField& xi) {
  const Valued B = Valued::ofField(b);
  const Valued A = Valued::ofField(a);
  const Valued X = Valued::ofField(xi);
  OnShellReport rep;

  const Valued tau = -iota(X, B);
  const Valued dAB = covariantD(A, B);
  const Valued bRes = covariantD(A, tau) - lieD(X, A, B) + iota(X, dAB);
  if (!bRes.isZero()) rep.bIdentity = {false, clip(format(bRes.c[0] + bRes.c[1] + bRes.c[2]))};

  const Valued c = -iota(X, A);
  const Valued FA = curvature(A);
  const Valued aRes = covariantD(A, c) - lieD(X, std::nullopt, A) + iota(X, FA);
  if (!aRes.isZero()) rep.aIdentity = {false, clip(format(aRes.c[0] + aRes.c[1] + aRes.c[2]))};

  // The discrepancies are multiples of d_A B and F_A, which are the
  // Euler-Lagrange expressions of Tr[B F_A].
  const Expression s0 = trace({B, FA});
  const JetField& probeB = FieldRegistry::global().declare("?" + b.name + "+", b.kind, kDim - b.formDegree, -b.ghost - 1, 0);
  const JetField& probeA = FieldRegistry::global().declare("?" + a.name + "+", a.kind, kDim - a.formDegree, -a.ghost - 1, 0);
  const QMap qb = extractQ(s0, {RosterEntry{&b, &probeB}, RosterEntry{&a, &probeA}});
  const Valued elB = assembleQ(qb, probeB);
  const Valued elA = assembleQ(qb, probeA);
  auto proportional = [](const Valued& x, const Valued& y) { return x == y || x == -y; };
  if (!proportional(elB, FA)) rep.onShell = {false, "delta S/delta B is not F_A"};
  else if (!proportional(elA, dAB)) rep.onShell = {false, "delta S/delta A is not d_A B"};
  return rep;
}

}  // namespace bvg
