#include "bvgraded/transform.hpp"

#include <algorithm>
#include <set>

#include "bvgraded/error.hpp"

namespace bvg {
namespace {

GeneratorTable& table() { return GeneratorTable::global(); }

std::string clip(std::string s) {
  if (s.size() > 400) s = s.substr(0, 400) + " ...";
  return s;
}

const RosterEntry& entryOf(const JetField* f, const std::vector<RosterEntry>& roster) {
  for (const auto& e : roster)
    if (e.field == f || e.antifield == f) return e;
  throw Error(ErrorKind::RosterMismatch, "'" + f->name + "' is not in the roster");
}

int signOf(int parity) { return parity ? -1 : 1; }

Expression variation(const Expression& density, SymbolId base) {
  return topCoefficient(eulerDerivative(density, base));
}

bool mentions(const Expression& e, const std::set<SymbolId>& bases) {
  for (const auto& t : e.terms())
    for (SymbolId id : t.mono.factors)
      if (bases.count(table()[id].base)) return true;
  return false;
}

std::set<SymbolId> symbolsOf(const std::vector<ChartVariable>& vars, bool conjugates) {
  std::set<SymbolId> out;
  for (const auto& v : vars) out.insert(conjugates ? v.conjugate : v.symbol);
  return out;
}

SubstitutionRules composeRules(const SubstitutionRules& outer, const SubstitutionRules& inner) {
  SubstitutionRules out;
  for (const auto& [k, v] : outer) out.emplace(k, substituteFields(v, inner));
  return out;
}

Expression volume(const Expression& coeff) {
  std::vector<Term> terms(coeff.terms().begin(), coeff.terms().end());
  for (auto& t : terms) t.mono.dx = 0b111;
  return Expression::fromTerms(std::move(terms));
}

CheckOutcome compareTensors(const dsl::Tensor& a, const dsl::Tensor& b, const std::string& label) {
  if (a.kind != b.kind || a.rank != b.rank) return {false, label + ": index structure differs"};
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    const Expression diff = a.c[i] - b.c[i];
    if (!diff.isZero()) return {false, label + "[" + std::to_string(i + 1) + "]: " + clip(format(diff))};
  }
  return {};
}

dsl::Tensor mapTensor(const dsl::Tensor& t, const SubstitutionRules& rules) {
  dsl::Tensor out = t;
  for (auto& c : out.c) c = substituteFields(c, rules);
  return out;
}

}  // namespace

std::vector<ChartVariable> chartVariables(const std::vector<const JetField*>& fields,
                                          const std::vector<RosterEntry>& roster, const HamiltonConvention& conv) {
  std::vector<ChartVariable> out;
  for (const JetField* f : fields) {
    const RosterEntry& e = entryOf(f, roster);
    const bool isField = e.field == f;
    const int parity = conv.totalDegree ? ((f->ghost + f->formDegree) % 2 + 2) % 2 : f->componentParity();
    for (const auto& p : componentPairs(e)) {
      ChartVariable v;
      v.symbol = isField ? p.field : p.antifield;
      v.conjugate = isField ? p.antifield : p.field;
      v.kappa = p.kappa;
      v.parity = parity;
      out.push_back(v);
    }
  }
  return out;
}

SubstitutionRules TransformationMap::all() const {
  SubstitutionRules out = pRules;
  for (const auto& [k, v] : qRules) out.emplace(k, v);
  return out;
}

TransformationMap deriveTransformation(const GeneratingFunction& g, const HamiltonConvention& conv) {
  TransformationMap map;
  map.origin = g.name;
  map.oldVars = chartVariables(g.oldFields, g.oldRoster, conv);
  map.newVars = chartVariables(g.newFields, g.newRoster, conv);
  std::set<SymbolId> chart = symbolsOf(map.oldVars, false);
  for (SymbolId s : symbolsOf(map.newVars, false)) chart.insert(s);
  for (SymbolId base : baseComponents(g.body))
    if (table()[base].role == SymbolRole::Component && !chart.count(base))
      throw Error(ErrorKind::RosterMismatch,
                  g.name + " depends on " + table().label(base) + ", which is outside its declared chart");
  if (auto gr = g.body.totalGrading(); gr && *gr != Grading{-1, kDim})
    throw Error(ErrorKind::GradingError, g.name + " is not a ghost -1 top form");
  for (const auto& v : map.oldVars)
    map.pRules[v.conjugate] = variation(g.body, v.symbol) * Rational(conv.pSign * signOf(v.parity) * v.kappa);
  for (const auto& v : map.newVars)
    map.qRules[v.conjugate] = variation(g.body, v.symbol) * Rational(conv.qSign * signOf(v.parity) * v.kappa);
  return map;
}

CheckOutcome checkHamiltonResiduals(const GeneratingFunction& g, const TransformationMap& map,
                                    const HamiltonConvention& conv) {
  // The relations p - pSign(-1)^|q| kappa dG/dq evaluated on the rules.
  const SubstitutionRules rules = map.all();
  auto residual = [&](const ChartVariable& v, int sign) -> std::optional<std::string> {
    const Expression mapped = substituteFields(Expression::generator(v.conjugate), rules);
    const Expression r = mapped - variation(g.body, v.symbol) * Rational(sign * signOf(v.parity) * v.kappa);
    if (r.isZero()) return std::nullopt;
    return table().label(v.conjugate) + ": " + clip(format(r));
  };
  for (const auto& v : map.oldVars)
    if (auto w = residual(v, conv.pSign)) return {false, *w};
  for (const auto& v : map.newVars)
    if (auto w = residual(v, conv.qSign)) return {false, *w};
  return {};
}

CheckOutcome checkRelation(const TransformationMap& map, const dsl::Tensor& lhs, const dsl::Tensor& rhs,
                           const std::string& label) {
  const SubstitutionRules rules = map.all();
  return compareTensors(mapTensor(lhs, rules), mapTensor(rhs, rules), label);
}

Expression parameterCoefficient(const Expression& expr, SymbolId parameter, int power) {
  std::vector<Term> out;
  for (const auto& t : expr.terms()) {
    const auto n = std::count(t.mono.factors.begin(), t.mono.factors.end(), parameter);
    if (n != power) continue;
    Monomial m = t.mono;
    m.factors.erase(std::remove(m.factors.begin(), m.factors.end(), parameter), m.factors.end());
    out.push_back({std::move(m), t.coeff});
  }
  return Expression::fromTerms(std::move(out));
}

int parameterDegree(const Expression& expr, SymbolId parameter) {
  int deg = 0;
  for (const auto& t : expr.terms())
    deg = std::max(deg, static_cast<int>(std::count(t.mono.factors.begin(), t.mono.factors.end(), parameter)));
  return deg;
}

std::vector<dsl::Tensor> expandExpIota(SymbolId t, const dsl::Tensor& x, const Valued& v) {
  std::vector<dsl::Tensor> parts(kDim + 1, x);
  for (int deg = 0; deg <= kDim; ++deg)
    for (std::size_t i = 0; i < x.c.size(); ++i) parts[static_cast<std::size_t>(deg)].c[i] = Expression{};
  const Expression tt = Expression::generator(t);
  for (std::size_t i = 0; i < x.c.size(); ++i) {
    Expression power = x.c[i];
    Expression tk(1);
    for (int k = 0; k <= kDim && !power.isZero(); ++k) {
      if (k) {
        power = iota(v, power) * Rational(1, k);
        tk = tk * tt;
      }
      for (int deg = 0; deg <= kDim; ++deg) {
        const Expression piece = formPart(power, deg);
        if (!piece.isZero()) parts[static_cast<std::size_t>(deg)].c[i] += tk * piece;
      }
    }
  }
  return parts;
}

SymbolId flowParameter() {
  static const SymbolId id = table().parameter("t", {0, 0});
  return id;
}

namespace {

Expression cubeTop(const dsl::Tensor& x) {
  const Valued v = x.valued();
  return topPart(trace({v, v, v}));
}

}  // namespace

PullbackReport checkCosmologicalLemma(const TransformationMap& map, const LemmaInput& lemma) {
  PullbackReport rep;
  const SubstitutionRules rules = map.all();
  const SymbolId t = flowParameter();
  std::vector<dsl::Tensor> parts = expandExpIota(t, lemma.superfield, lemma.xi);
  for (auto& p : parts) p = mapTensor(p, rules);
  auto atOne = [&](const dsl::Tensor& x) {
    dsl::Tensor out = x;
    for (auto& c : out.c) c = substituteFields(c, {{t, Expression(1)}});
    return out;
  };
  dsl::Tensor zero = lemma.superfield;
  for (auto& c : zero.c) c = Expression{};
  rep.q0Vanishes = compareTensors(atOne(parts[0]), zero, "q0");
  rep.q1IsTriad = compareTensors(atOne(parts[1]), lemma.triad, "q1 - e");
  dsl::Tensor total = parts[0];
  for (int k = 1; k <= kDim; ++k)
    for (std::size_t i = 0; i < total.c.size(); ++i) total.c[i] += parts[static_cast<std::size_t>(k)].c[i];
  const Expression L = cubeTop(total);
  for (int k = 1; k <= parameterDegree(L, t); ++k) {
    const Expression ck = parameterCoefficient(L, t, k);
    if (!ck.isZero()) {
      rep.constantL = {false, "t^" + std::to_string(k) + " coefficient of L: " + clip(format(ck))};
      break;
    }
  }
  return rep;
}

PullbackReport pullbackAction(const TransformationMap& map, const Theory& oldTheory, const Theory& newTheory,
                              LambdaMode mode, const LemmaInput* lemma) {
  PullbackReport rep;
  rep.formal = mode == LambdaMode::Formal;
  std::set<SymbolId> covered;
  for (const auto& v : map.oldVars) covered.insert({v.symbol, v.conjugate});
  for (const auto& v : map.newVars) covered.insert({v.symbol, v.conjugate});
  std::string missing;
  for (const Theory* th : {&oldTheory, &newTheory})
    for (const auto& p : th->pairs())
      for (SymbolId s : {p.field, p.antifield})
        if (!covered.count(s)) missing += " " + table().label(s);
  if (!missing.empty()) throw Error(ErrorKind::IncompleteMap, "uncovered components:" + missing);

  const Expression newPulled = substituteFields(lambdaCoefficient(newTheory.action, 0), map.qRules);
  const Expression oldPulled = substituteFields(lambdaCoefficient(oldTheory.action, 0), map.pRules);
  const auto eq = functionalEqual(newPulled, oldPulled);
  if (!eq) rep.lambda0 = {false, eq.witness};
  if (!rep.formal) return rep;

  if (!lemma) {
    // Direct substitution, coefficient by coefficient.
    const int top = std::max(lambdaDegree(newTheory.action), lambdaDegree(oldTheory.action));
    for (int k = 1; k <= top && rep.lambda1.pass; ++k) {
      const auto eqk = functionalEqual(substituteFields(lambdaCoefficient(newTheory.action, k), map.qRules),
                                       substituteFields(lambdaCoefficient(oldTheory.action, k), map.pRules));
      if (!eqk) rep.lambda1 = {false, "order Lambda^" + std::to_string(k) + ": " + eqk.witness};
    }
    return rep;
  }
  const PullbackReport l = checkCosmologicalLemma(map, *lemma);
  rep.q0Vanishes = l.q0Vanishes;
  rep.q1IsTriad = l.q1IsTriad;
  rep.constantL = l.constantL;
  // The new action's Lambda term must be L(0)/3 before the pullback, and
  // the old action's Lambda term must be Tr[e^3]/3.
  const Expression l0 = cubeTop(lemma->superfield) * Rational(1, 3);
  const Expression l1 = cubeTop(lemma->triad) * Rational(1, 3);
  if (!(lambdaCoefficient(newTheory.action, 1) - l0).isZero())
    rep.lambda1 = {false, "Lambda term of " + newTheory.name + " is not Tr[B^3]/3"};
  else if (!(lambdaCoefficient(oldTheory.action, 1) - l1).isZero())
    rep.lambda1 = {false, "Lambda term of " + oldTheory.name + " is not Tr[e^3]/3"};
  else if (!l.q0Vanishes.pass || !l.q1IsTriad.pass || !l.constantL.pass)
    rep.lambda1 = {false, "cosmological lemma fails"};
  if (lambdaDegree(newTheory.action) > 1 || lambdaDegree(oldTheory.action) > 1)
    rep.lambda1 = {false, "action is nonlinear in Lambda"};
  return rep;
}

GeneratingFunction composeGenerating(const GeneratingFunction& g1, const GeneratingFunction& g2,
                                     const HamiltonConvention& conv) {
  // g1(P1, q2) with q2 = g1.old; g2(p2, q3) with p2 = g2.new = conj(q2).
  const TransformationMap m1 = deriveTransformation(g1, conv);
  const TransformationMap m2 = deriveTransformation(g2, conv);
  std::set<SymbolId> q2, p2;
  for (const auto& v : m1.oldVars) q2.insert(v.symbol);
  for (const auto& v : m2.newVars) p2.insert(v.symbol);
  for (const auto& v : m1.oldVars)
    if (!p2.count(v.conjugate))
      throw Error(ErrorKind::RosterMismatch, "intermediate chart mismatch at " + table().label(v.symbol));
  if (q2.size() != p2.size()) throw Error(ErrorKind::RosterMismatch, "intermediate charts differ in size");

  // Pairing term sum c p2 q2, with c fixed by the identity generating function.
  Expression pairing;
  for (const auto& v : m2.newVars) {
    const int c = conv.qSign * signOf(v.parity) * v.kappa;
    pairing += Expression::generator(v.symbol) * Expression::generator(v.conjugate) * Rational(c);
  }
  const Expression tilde = g1.body + g2.body - volume(pairing);

  SubstitutionRules q2Rules, p2Rules;  // q2 from g2's Q-rules, p2 from g1's p-rules
  for (const auto& [k, v] : m2.qRules) q2Rules.emplace(k, v);
  for (const auto& [k, v] : m1.pRules) p2Rules.emplace(k, v);
  const bool q2Free = std::none_of(q2Rules.begin(), q2Rules.end(), [&](auto& r) { return mentions(r.second, p2); });
  const bool p2Free = std::none_of(p2Rules.begin(), p2Rules.end(), [&](auto& r) { return mentions(r.second, q2); });
  SubstitutionRules elim;
  if (q2Free) {
    elim = q2Rules;
    for (const auto& [k, v] : composeRules(p2Rules, q2Rules)) elim.emplace(k, v);
  } else if (p2Free) {
    elim = p2Rules;
    for (const auto& [k, v] : composeRules(q2Rules, p2Rules)) elim.emplace(k, v);
  } else {
    throw Error(ErrorKind::NonTriangularElimination, "stationarity system of " + g1.name + " and " + g2.name);
  }
  GeneratingFunction h;
  h.name = g1.name + "." + g2.name;
  h.body = substituteFields(tilde, elim);
  std::set<SymbolId> inter = q2;
  inter.insert(p2.begin(), p2.end());
  if (mentions(h.body, inter))
    throw Error(ErrorKind::NonTriangularElimination, "intermediate variables survive the elimination");
  h.oldFields = g2.oldFields;
  h.oldRoster = g2.oldRoster;
  h.newFields = g1.newFields;
  h.newRoster = g1.newRoster;
  return h;
}

CheckOutcome checkChainProperty(const GeneratingFunction& g1, const GeneratingFunction& g2,
                                const GeneratingFunction& composed, const HamiltonConvention& conv) {
  const TransformationMap m1 = deriveTransformation(g1, conv);
  const TransformationMap m2 = deriveTransformation(g2, conv);
  const TransformationMap mh = deriveTransformation(composed, conv);
  std::set<SymbolId> p2;
  for (const auto& v : m2.newVars) p2.insert(v.symbol);
  SubstitutionRules q2Rules(m2.qRules.begin(), m2.qRules.end());
  if (std::any_of(q2Rules.begin(), q2Rules.end(), [&](auto& r) { return mentions(r.second, p2); }))
    return {false, "intermediate rules are not triangular"};
  SubstitutionRules p2Rules = composeRules(m1.pRules, q2Rules);
  // Final conjugates of the new chart: g1's Q-rules after q2 -> q2(q3).
  for (const auto& [k, v] : mh.qRules) {
    auto it = m1.qRules.find(k);
    if (it == m1.qRules.end()) return {false, "no composed rule for " + table().label(k)};
    const Expression d = v - substituteFields(it->second, q2Rules);
    if (!d.isZero()) return {false, table().label(k) + ": " + clip(format(d))};
  }
  // Final conjugates of the old chart: g2's p-rules after p2 -> p2(P1, q3).
  for (const auto& [k, v] : mh.pRules) {
    auto it = m2.pRules.find(k);
    if (it == m2.pRules.end()) return {false, "no composed rule for " + table().label(k)};
    const Expression d = v - substituteFields(it->second, p2Rules);
    if (!d.isZero()) return {false, table().label(k) + ": " + clip(format(d))};
  }
  return {};
}

namespace {

struct Intertwiner {
  QMap w;
  QMap qOld, qNew;
};

Intertwiner intertwiner(const TransformationMap& map, const Theory& oldTheory, const Theory& newTheory,
                        LambdaMode mode) {
  Intertwiner it;
  auto action = [&](const Theory& t) { return mode == LambdaMode::Zero ? lambdaCoefficient(t.action, 0) : t.action; };
  it.qOld = extractQ(action(oldTheory), oldTheory.roster);
  it.qNew = extractQ(action(newTheory), newTheory.roster);
  for (const auto& v : map.oldVars) it.w[v.symbol] = substituteFields(it.qOld.at(v.symbol), map.pRules);
  for (const auto& v : map.newVars) it.w[v.symbol] = substituteFields(it.qNew.at(v.symbol), map.qRules);
  return it;
}

}  // namespace

CheckOutcome checkSymplectomorphism(const TransformationMap& map, const Theory& oldTheory, const Theory& newTheory,
                                    LambdaMode mode) {
  const Intertwiner it = intertwiner(map, oldTheory, newTheory, mode);
  auto check = [&](const SubstitutionRules& rules, const QMap& q, const SubstitutionRules& side) -> CheckOutcome {
    std::vector<SymbolId> keys;
    for (const auto& [k, v] : rules) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (SymbolId k : keys) {
      const Expression lhs = applyQ(it.w, rules.at(k));
      const Expression rhs = substituteFields(q.at(k), side);
      const Expression d = lhs - rhs;
      if (!d.isZero()) return {false, "W(" + table().label(k) + ") - Q(" + table().label(k) + "): " + clip(format(d))};
    }
    return {};
  };
  if (auto r = check(map.pRules, it.qOld, map.pRules); !r.pass) return r;
  return check(map.qRules, it.qNew, map.qRules);
}

CheckOutcome checkIntertwinedRule(const TransformationMap& map, const Theory& oldTheory, const Theory& newTheory,
                                  const JetField& field, const dsl::Tensor& rhs) {
  const Intertwiner it = intertwiner(map, oldTheory, newTheory, LambdaMode::Zero);
  const SubstitutionRules rules = map.all();
  const Valued q = assembleQ(it.qNew, field);
  const dsl::Tensor lhs = mapTensor(rhs, rules);
  dsl::Tensor wl = lhs;
  for (auto& c : wl.c) c = applyQ(it.w, c);
  // Q is odd and sits to the left of the form factors, as in assembleQ.
  return compareTensors(wl, mapTensor(dsl::Tensor::from(q), rules), "W(" + field.name + ")");
}

GeneratingFunction identityGenerating(const std::vector<const JetField*>& oldFields,
                                      const std::vector<RosterEntry>& oldRoster,
                                      const std::vector<const JetField*>& newFields,
                                      const std::vector<RosterEntry>& newRoster, const HamiltonConvention& conv) {
  const auto q = chartVariables(oldFields, oldRoster, conv);
  const auto P = chartVariables(newFields, newRoster, conv);
  if (q.size() != P.size()) throw Error(ErrorKind::RosterMismatch, "identity needs charts of equal size");
  Expression body;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const int c = conv.qSign * signOf(P[i].parity) * P[i].kappa;
    body += Expression::generator(P[i].symbol) * Expression::generator(q[i].symbol) * Rational(c);
  }
  GeneratingFunction g;
  g.name = "id";
  g.body = volume(body);
  g.oldFields = oldFields;
  g.oldRoster = oldRoster;
  g.newFields = newFields;
  g.newRoster = newRoster;
  return g;
}

}  // namespace bvg
