#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <random>

#include "bvgraded/bv.hpp"
#include "bvgraded/identities.hpp"

namespace oracle {

using namespace bvg;

namespace {

struct Factor {
  SymbolId id;
  int key0, key1;  // sort key: (0, id) for components, (1, a) for dx^a
  bool odd;
};

bool before(const Factor& a, const Factor& b) { return std::tie(a.key0, a.key1) < std::tie(b.key0, b.key1); }

std::string seqText(const std::vector<Factor>& v) {
  std::string s;
  for (const auto& f : v) s += GeneratorTable::global().label(f.id) + " ";
  return s;
}

// Independent eta / epsilon tables.
const int kEta[3] = {-1, 1, 1};

int levi(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  // even permutations of (0,1,2)
  if ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0)) return 1;
  return -1;
}

using Vec = std::array<Rational, 3>;

Vec oracleBracket(const Vec& a, const Vec& b) {
  Vec out{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[k] += Rational(levi(i, j, k) * kEta[k]) * a[i] * b[j];
  return out;
}

Rational oraclePair(const Vec& a, const Vec& b) {
  Rational s = 0;
  for (int i = 0; i < 3; ++i) s += Rational(kEta[i]) * a[i] * b[i];
  return s;
}

Rational oracleTriple(const Vec& a, const Vec& b, const Vec& c) {
  Rational s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) s += Rational(levi(i, j, k)) * a[i] * b[j] * c[k];
  return s;
}

Valued constant(const Vec& v) {
  Valued out = Valued::zero(IndexKind::Internal);
  for (int i = 0; i < 3; ++i) out.c[static_cast<std::size_t>(i)] = Expression(v[static_cast<std::size_t>(i)]);
  return out;
}

bool equalsConstant(const Expression& e, const Rational& r) {
  return (e - Expression(r)).isZero();
}

}  // namespace

SuiteResult koszulBubbleSort(std::uint64_t seed, int instances) {
  SuiteResult res;
  res.instances = instances;
  auto& reg = FieldRegistry::global();
  const JetField& even = reg.declare("kz_e", IndexKind::Internal, 0, 0, 0);
  const JetField& odd = reg.declare("kz_o", IndexKind::Internal, 0, 1, 0);
  const JetField& odd2 = reg.declare("kz_p", IndexKind::Scalar, 0, -1, 0);
  std::vector<Factor> pool;
  for (const JetField* f : {&even, &odd, &odd2})
    for (SymbolId s : f->components) pool.push_back({s, 0, static_cast<int>(s), f->componentParity() == 1});
  for (int a = 0; a < kDim; ++a) pool.push_back({GeneratorTable::global().dx(a), 1, a, true});
  std::mt19937_64 rng(seed);
  for (int n = 0; n < instances && res.pass; ++n) {
    std::vector<Factor> seq(2 + rng() % 7);
    for (auto& f : seq) f = pool[rng() % pool.size()];
    Expression product(1);
    for (const auto& f : seq) product = product * Expression::generator(f.id);
    // bubble sort
    std::vector<Factor> sorted = seq;
    int sign = 1;
    for (std::size_t i = 0; i < sorted.size(); ++i)
      for (std::size_t j = 0; j + 1 < sorted.size() - i; ++j)
        if (before(sorted[j + 1], sorted[j])) {
          if (sorted[j].odd && sorted[j + 1].odd) sign = -sign;
          std::swap(sorted[j], sorted[j + 1]);
        }
    for (std::size_t j = 0; j + 1 < sorted.size(); ++j)
      if (sorted[j].odd && sorted[j].id == sorted[j + 1].id) sign = 0;
    if (sign == 0) {
      if (!product.isZero()) res = {instances, false, "repeated odd factor survives: " + seqText(seq)};
      continue;
    }
    const auto& terms = product.terms();
    bool ok = terms.size() == 1 && terms[0].coeff == sign;
    if (ok) {
      std::vector<SymbolId> expect;
      std::uint8_t dx = 0;
      for (const auto& f : sorted)
        if (f.key0 == 0) expect.push_back(f.id);
        else dx = static_cast<std::uint8_t>(dx | (1u << f.key1));
      ok = terms[0].mono.factors == expect && terms[0].mono.dx == dx;
    }
    if (ok) {
      std::vector<SymbolId> ids;
      bool allComponents = true;
      for (const auto& f : seq) {
        ids.push_back(f.id);
        allComponents = allComponents && f.key0 == 0;
      }
      if (allComponents) ok = koszulSort(ids) == sign;
    }
    if (!ok) res = {instances, false, "sign or order mismatch for " + seqText(seq) + "-> " + format(product)};
  }
  return res;
}

SuiteResult adInvariance(std::uint64_t seed, int instances) {
  SuiteResult res;
  res.instances = instances;
  std::mt19937_64 rng(seed);
  auto num = [&] { return Rational(static_cast<std::int64_t>(rng() % 11) - 5, 1 + static_cast<std::int64_t>(rng() % 4)); };
  auto& reg = FieldRegistry::global();
  const Valued x = Valued::ofField(reg.declare("ad_x", IndexKind::Internal, 0, 0, 0));
  const Valued y = Valued::ofField(reg.declare("ad_y", IndexKind::Internal, 0, 1, 0));
  const Valued z = Valued::ofField(reg.declare("ad_z", IndexKind::Internal, 0, 0, 0));
  for (int n = 0; n < instances && res.pass; ++n) {
    Vec a, b, c;
    for (auto* v : {&a, &b, &c})
      for (auto& r : *v) r = num();
    const Valued A = constant(a), B = constant(b), C = constant(c);
    const Valued ab = bracket(A, B);
    const Vec oab = oracleBracket(a, b);
    for (int k = 0; k < 3; ++k)
      if (!equalsConstant(ab.c[static_cast<std::size_t>(k)], oab[static_cast<std::size_t>(k)]))
        return {instances, false, "bracket component " + std::to_string(k + 1) + " at instance " + std::to_string(n)};
    if (!equalsConstant(trace({A, B}), oraclePair(a, b))) return {instances, false, "pairing at instance " + std::to_string(n)};
    if (!equalsConstant(trace({A, B, C}), oracleTriple(a, b, c)))
      return {instances, false, "triple trace at instance " + std::to_string(n)};
    if (oraclePair(oracleBracket(a, b), c) != oraclePair(a, oracleBracket(b, c)))
      return {instances, false, "oracle tables are not ad-invariant"};
    if (!(trace({bracket(A, B), C}) - trace({A, bracket(B, C)})).isZero())
      return {instances, false, "Tr[[a,b]c] != Tr[a[b,c]] at instance " + std::to_string(n)};
  }
  // Symbolic: one even, one odd, one even vector.
  const Expression inv = trace({bracket(x, y), z}) - trace({x, bracket(y, z)});
  if (!inv.isZero()) return {instances, false, "symbolic ad-invariance: " + format(inv)};
  const Valued jac = bracket(x, bracket(z, x)) + bracket(z, bracket(x, x)) + bracket(x, bracket(x, z));
  if (!jac.isZero()) return {instances, false, "Jacobi fails"};
  return res;
}

SuiteResult leibniz(std::uint64_t seed, int instances) {
  SuiteResult res;
  res.instances = instances;
  RandomForms gen(seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (int n = 0; n < instances; ++n) {
    const int p = static_cast<int>(rng() % 3), q = static_cast<int>(rng() % (3 - p));
    const int px = gen.coin(), py = gen.coin();
    const Expression x = gen.scalarForm(p, px), y = gen.scalarForm(q, py);
    const int sign = ((px + p) % 2) ? -1 : 1;
    const Expression lhs = exteriorD(x * y);
    const Expression rhs = exteriorD(x) * y + Rational(sign) * (x * exteriorD(y));
    if (!(lhs - rhs).isZero()) return {instances, false, "instance " + std::to_string(n) + ": " + format(lhs - rhs)};
    if (!exteriorD(exteriorD(x)).isZero()) return {instances, false, "d^2 != 0 at instance " + std::to_string(n)};
  }
  return res;
}

SuiteResult eulerAnnihilatesExact(std::uint64_t seed, int instances) {
  SuiteResult res;
  res.instances = instances;
  RandomForms gen(seed);
  for (int n = 0; n < instances; ++n) {
    const Expression density = exteriorD(gen.scalarForm(2, gen.coin()));
    for (SymbolId base : baseComponents(density)) {
      const Expression e = eulerDerivative(density, base);
      if (!e.isZero())
        return {instances, false, "instance " + std::to_string(n) + ", delta/delta " + GeneratorTable::global().label(base)};
    }
  }
  return res;
}

SuiteResult tripleTraceDeterminant() {
  auto& reg = FieldRegistry::global();
  const JetField& e = reg.declare("det_e", IndexKind::Internal, 1, 0, 0);
  const Valued E = Valued::ofField(e);
  const Expression lhs = topCoefficient(trace({E, E, E}));
  // det(e^i_a) = sum over permutations s of sgn(s) e^0_{s0} e^1_{s1} e^2_{s2}
  Expression det;
  std::array<int, 3> perm{0, 1, 2};
  do {
    Expression m(Rational(levi(perm[0], perm[1], perm[2])));
    for (int i = 0; i < 3; ++i) m = m * Expression::generator(e.component(i, perm[static_cast<std::size_t>(i)]));
    det += m;
  } while (std::next_permutation(perm.begin(), perm.end()));
  const Expression diff = lhs - Rational(6) * det;
  if (!diff.isZero()) return {1, false, format(diff)};
  return {1, true, {}};
}

}  // namespace oracle
