#include <algorithm>
#include <functional>
#include <set>

#include "bvgraded/bv.hpp"
#include "bvgraded/dsl.hpp"

namespace bvg::dsl {
namespace {

int power3(int r) { return r == 0 ? 1 : (r == 1 ? 3 : (r == 2 ? 9 : 27)); }

Tensor scalarTensor(Expression e) {
  Tensor t;
  t.c[0] = std::move(e);
  return t;
}

bool isInternal(const Tensor& t) { return t.kind == IndexKind::Internal || t.kind == IndexKind::Scalar; }

void requireVector(const Tensor& t, const char* what) {
  if (t.kind != IndexKind::Tangent) throw Error(ErrorKind::RankMismatch, std::string(what) + " needs a vector field");
}

Tensor requireRankOne(const Tensor& t, const char* what) {
  if (t.kind != IndexKind::Internal || t.rank != 1)
    throw Error(ErrorKind::RankMismatch, std::string(what) + " needs an internal vector");
  return t;
}

Tensor add(Tensor a, const Tensor& b, int sign) {
  if (a.kind != b.kind || a.rank != b.rank)
    throw Error(ErrorKind::RankMismatch, "sum of values with different index structure");
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (sign > 0)
      a.c[i] += b.c[i];
    else
      a.c[i] -= b.c[i];
  }
  return a;
}

Tensor product(const Tensor& a, const Tensor& b) {
  if (a.kind == IndexKind::Scalar || b.kind == IndexKind::Scalar) {
    const bool left = a.kind == IndexKind::Scalar;
    Tensor out = left ? b : a;
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = left ? a.c[0] * b.c[i] : a.c[i] * b.c[0];
    return out;
  }
  if (a.kind != IndexKind::Internal || b.kind != IndexKind::Internal)
    throw Error(ErrorKind::RankMismatch, "product of coordinate-indexed values");
  if (a.rank + b.rank > 3) throw Error(ErrorKind::RankMismatch, "internal rank above 3");
  Tensor out;
  out.kind = IndexKind::Internal;
  out.rank = a.rank + b.rank;
  const int nb = power3(b.rank);
  out.c.assign(static_cast<std::size_t>(power3(out.rank)), Expression{});
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i].isZero()) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j) out.c[i * static_cast<std::size_t>(nb) + j] = a.c[i] * b.c[j];
  }
  return out;
}

Tensor traceOf(const Tensor& t) {
  if (t.kind == IndexKind::Scalar) return t;
  if (t.kind != IndexKind::Internal || t.rank < 2)
    throw Error(ErrorKind::RankMismatch, "trace needs internal rank 2 or 3");
  Expression out;
  if (t.rank == 2) {
    for (int i = 0; i < 3; ++i) out += t.c[static_cast<std::size_t>(i * 3 + i)] * eta(i, i);
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const int e = epsilon(i, j, k);
          if (e) out += t.c[static_cast<std::size_t>(i * 9 + j * 3 + k)] * Rational(e);
        }
  }
  return scalarTensor(std::move(out));
}

Tensor map(const Tensor& t, const std::function<Expression(const Expression&)>& f) {
  Tensor out = t;
  for (auto& c : out.c) c = f(c);
  return out;
}

}  // namespace

Tensor Tensor::from(const Valued& v) {
  Tensor t;
  t.kind = v.kind;
  t.rank = v.kind == IndexKind::Scalar ? 0 : 1;
  t.c = v.c;
  return t;
}

Valued Tensor::valued() const {
  if (rank > 1) throw Error(ErrorKind::RankMismatch, "value of internal rank " + std::to_string(rank));
  Valued v;
  v.kind = kind;
  v.c = c;
  return v;
}

bool Tensor::isZero() const {
  return std::all_of(c.begin(), c.end(), [](const Expression& e) { return e.isZero(); });
}

void Scope::bindField(const std::string& name, const JetField* field) { fields_[name] = field; }
void Scope::bindValue(const std::string& name, Tensor value) { values_[name] = std::move(value); }

const JetField* Scope::field(const std::string& name) const {
  auto it = fields_.find(name);
  return it == fields_.end() ? nullptr : it->second;
}

const Tensor* Scope::value(const std::string& name) const {
  auto it = values_.find(name);
  return it == values_.end() ? nullptr : &it->second;
}

Tensor elaborate(const Node& n, const Scope& scope) {
  try {
    auto sub = [&](std::size_t k) { return elaborate(*n.children[k], scope); };
    switch (n.kind) {
      case NodeKind::Field: {
        if (const JetField* f = scope.field(n.name)) return Tensor::from(Valued::ofField(*f));
        if (const Tensor* v = scope.value(n.name)) return *v;
        throw Diagnostic(ErrorKind::UnknownGenerator, n.pos, "unknown name '" + n.name + "'");
      }
      case NodeKind::Number: return scalarTensor(Expression(n.value));
      case NodeKind::Lambda: return scalarTensor(Expression::generator(lambdaSymbol()));
      case NodeKind::Sum: {
        Tensor acc = sub(0);
        if (n.signs[0] < 0)
          for (auto& c : acc.c) c *= Rational(-1);
        for (std::size_t k = 1; k < n.children.size(); ++k) acc = add(acc, sub(k), n.signs[k]);
        return acc;
      }
      case NodeKind::Product: {
        Tensor acc = sub(0);
        for (std::size_t k = 1; k < n.children.size(); ++k) acc = product(acc, sub(k));
        return acc;
      }
      case NodeKind::Bracket: {
        const Tensor a = sub(0), b = sub(1);
        if (a.rank > 1 || b.rank > 1) throw Error(ErrorKind::RankMismatch, "bracket of higher-rank values");
        return Tensor::from(bracket(a.valued(), b.valued()));
      }
      case NodeKind::Trace: return traceOf(sub(0));
      case NodeKind::ExtD: return map(sub(0), [](const Expression& e) { return exteriorD(e); });
      case NodeKind::CovD: {
        const Tensor conn = requireRankOne(sub(0), "connection");
        const Tensor x = sub(1);
        if (x.kind == IndexKind::Scalar) return map(x, [](const Expression& e) { return exteriorD(e); });
        return Tensor::from(covariantD(conn.valued(), requireRankOne(x, "covariant derivative").valued()));
      }
      case NodeKind::Curvature: return Tensor::from(curvature(requireRankOne(sub(0), "curvature").valued()));
      case NodeKind::Iota: {
        const Tensor v = sub(0);
        requireVector(v, "contraction");
        const Tensor x = sub(1);
        const Valued vv = v.valued();
        if (x.kind == IndexKind::Cotangent) return scalarTensor(contract(vv, x.valued()));
        if (!isInternal(x)) throw Error(ErrorKind::RankMismatch, "contraction into a vector-valued form");
        return map(x, [&](const Expression& e) { return iota(vv, e); });
      }
      case NodeKind::Lie:
      case NodeKind::LieFlat: {
        const Tensor v = sub(0);
        requireVector(v, "Lie derivative");
        std::optional<Valued> conn;
        if (n.kind == NodeKind::Lie) conn = requireRankOne(sub(1), "connection").valued();
        const Tensor x = sub(n.kind == NodeKind::Lie ? 2 : 1);
        if (!isInternal(x) || x.rank > 1) throw Error(ErrorKind::RankMismatch, "Lie derivative of this value");
        return Tensor::from(lieD(v.valued(), x.kind == IndexKind::Scalar ? std::nullopt : conn, x.valued()));
      }
      case NodeKind::Top: return map(sub(0), [](const Expression& e) { return topPart(e); });
      case NodeKind::ExpIota: {
        const Tensor v = sub(0);
        requireVector(v, "exponential contraction");
        const Valued vv = v.valued();
        return map(sub(1), [&](const Expression& e) {
          Expression out = e, power = e;
          for (int k = 1; k <= kDim; ++k) {
            power = iota(vv, power) * Rational(1, k);
            out += power;
          }
          return out;
        });
      }
    }
  } catch (const Diagnostic&) {
    throw;
  } catch (const Error& e) {
    throw Diagnostic(e.kind(), n.pos, e.detail() + " in '" + print(n) + "'");
  }
  throw Diagnostic(ErrorKind::SyntaxError, n.pos, "unhandled node");
}

Expression elaborateScalar(const Node& node, const Scope& scope) {
  Tensor t = elaborate(node, scope);
  if (t.kind != IndexKind::Scalar)
    throw Diagnostic(ErrorKind::RankMismatch, node.pos, "expected a scalar density, got an indexed value");
  return t.c[0];
}

Scope bindTheory(const TheoryFile& file) {
  Scope scope;
  auto& reg = FieldRegistry::global();
  for (const auto& d : file.fields) {
    try {
      scope.bindField(d.name, &reg.declare(d.name, d.kind, d.form, d.ghost, d.maxJet));
    } catch (const Error& e) {
      throw Diagnostic(e.kind(), d.pos, e.detail());
    }
  }
  for (const auto& s : file.superfields) scope.bindValue(s.name, elaborate(*s.body, scope));
  return scope;
}

namespace {

std::string describe(const Grading& g) { return "(ghost " + std::to_string(g.ghost) + ", form " + std::to_string(g.form) + ")"; }

void checkGrading(GradingReport& rep, const Node& body, const Scope& scope, std::optional<Grading> want,
                  const std::string& what) {
  try {
    const Tensor t = elaborate(body, scope);
    for (const auto& c : t.c) {
      const auto g = c.totalGrading();
      if (g && want && *g != *want) {
        rep.violations.push_back({body.pos, what + " has grading " + describe(*g) + ", expected " + describe(*want)});
        return;
      }
    }
  } catch (const Diagnostic& d) {
    rep.violations.push_back({d.pos(), what + ": " + d.message()});
  } catch (const Error& e) {
    rep.violations.push_back({body.pos, what + ": " + e.detail()});
  }
}

}  // namespace

GradingReport validateGrading(const TheoryFile& file) {
  GradingReport rep;
  std::map<std::string, const FieldDecl*> decls;
  for (const auto& d : file.fields) {
    if (!decls.emplace(d.name, &d).second) rep.violations.push_back({d.pos, "field '" + d.name + "' declared twice"});
    if (d.form < 0 || d.form > kDim) rep.violations.push_back({d.pos, "form degree out of range for '" + d.name + "'"});
  }
  std::set<std::string> paired;
  for (const auto& p : file.pairs) {
    auto f = decls.find(p.field);
    auto a = decls.find(p.antifield);
    if (f == decls.end() || a == decls.end()) {
      rep.violations.push_back({p.pos, "pair refers to an undeclared field"});
      continue;
    }
    for (const auto* name : {&p.field, &p.antifield})
      if (!paired.insert(*name).second) rep.violations.push_back({p.pos, "'" + *name + "' paired twice"});
    const FieldDecl& x = *f->second;
    const FieldDecl& y = *a->second;
    if (y.ghost != -x.ghost - 1)
      rep.violations.push_back({p.pos, "ghost(" + y.name + ") = " + std::to_string(y.ghost) + ", expected " +
                                           std::to_string(-x.ghost - 1)});
    if (y.form != kDim - x.form)
      rep.violations.push_back({p.pos, "form(" + y.name + ") = " + std::to_string(y.form) + ", expected " +
                                           std::to_string(kDim - x.form)});
    const bool kindsDual = (x.kind == IndexKind::Tangent && y.kind == IndexKind::Cotangent) ||
                           (x.kind == IndexKind::Cotangent && y.kind == IndexKind::Tangent) ||
                           (x.kind == y.kind && x.kind != IndexKind::Tangent && x.kind != IndexKind::Cotangent);
    if (!kindsDual) rep.violations.push_back({p.pos, "'" + y.name + "' does not have the dual index kind"});
  }
  for (const auto& d : file.fields)
    if (!paired.count(d.name)) rep.violations.push_back({d.pos, "'" + d.name + "' has no pair"});

  Scope scope;
  try {
    scope = bindTheory(file);
  } catch (const Diagnostic& d) {
    rep.violations.push_back({d.pos(), d.message()});
    return rep;
  }
  for (const auto& s : file.superfields) {
    std::vector<std::pair<NodePtr, int>> summands;
    if (s.body->kind == NodeKind::Sum)
      for (const auto& c : s.body->children) summands.push_back({c, 0});
    else
      summands.push_back({s.body, 0});
    for (const auto& [term, unused] : summands) {
      try {
        const Tensor t = elaborate(*term, scope);
        for (const auto& c : t.c) {
          const auto g = c.totalGrading();
          if (g && g->ghost + g->form != s.degree) {
            rep.violations.push_back({term->pos, "summand '" + print(*term) + "' of " + s.name + " has total degree " +
                                                     std::to_string(g->ghost + g->form) + ", expected " +
                                                     std::to_string(s.degree)});
            break;
          }
        }
      } catch (const Error& e) {
        rep.violations.push_back({term->pos, e.detail()});
      }
    }
  }
  checkGrading(rep, *file.action, scope, Grading{0, kDim}, "action density");
  auto fieldGrading = [&](const std::string& name, SourcePos pos) -> std::optional<Grading> {
    auto it = decls.find(name);
    if (it == decls.end()) {
      rep.violations.push_back({pos, "assignment to undeclared field '" + name + "'"});
      return std::nullopt;
    }
    return Grading{it->second->ghost + 1, it->second->form};
  };
  for (const auto& a : file.q)
    if (auto g = fieldGrading(a.target, a.pos)) checkGrading(rep, *a.body, scope, g, "Q(" + a.target + ")");
  for (const auto& r : file.readings) {
    if (r.target == "action") {
      checkGrading(rep, *r.body, scope, Grading{0, kDim}, "reading '" + r.label + "'");
    } else if (auto g = fieldGrading(r.target, r.pos)) {
      checkGrading(rep, *r.body, scope, g, "reading '" + r.label + "'");
    }
  }
  return rep;
}

}  // namespace bvg::dsl
