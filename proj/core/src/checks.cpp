#include "bvgraded/checks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "bvgraded/identities.hpp"

namespace bvg {
namespace {

constexpr std::uint64_t kIdentitySeed = 20240611;
constexpr int kIdentityInstances = 24;

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CheckOutcomeEx from(const CheckOutcome& o) { return {o.pass ? Status::Pass : Status::Fail, o.witness}; }

CheckOutcomeEx fail(const std::string& w) { return {Status::Fail, w}; }

/// A printed reading that does not hold while the corpus form does.
CheckOutcomeEx erratumUnless(const CheckOutcome& printed, const std::string& label) {
  if (printed.pass) return {};
  return {Status::Erratum, "reading '" + label + "': " + printed.witness};
}

std::vector<const dsl::Reading*> readings(const std::vector<dsl::Reading>& all, const std::string& label) {
  std::vector<const dsl::Reading*> out;
  for (const auto& r : all)
    if (r.label == label) out.push_back(&r);
  return out;
}

dsl::Tensor tensor(const BoundGenFun& g, const std::string& text) {
  return dsl::elaborate(*dsl::parseExpression(text), g.scope);
}

LemmaInput lemmaFor(const BoundGenFun& g, const std::string& xi, const std::string& triad) {
  return {tensor(g, "BB"), tensor(g, xi).valued(), tensor(g, triad)};
}

GeneratingFunction composed(CheckContext& c) { return composeGenerating(c.G.g, c.F.g); }

CheckOutcomeEx pullback(const TransformationMap& map, const Theory& oldT, const Theory& newT, bool formal,
                        const LemmaInput* lemma) {
  const PullbackReport r = pullbackAction(map, oldT, newT, formal ? LambdaMode::Formal : LambdaMode::Zero, lemma);
  if (!r.lambda0.pass) return fail("Lambda^0: " + r.lambda0.witness);
  if (formal && !r.lambda1.pass) {
    std::string w = "Lambda^1: " + r.lambda1.witness;
    for (const auto* part : {&r.q0Vanishes, &r.q1IsTriad, &r.constantL})
      if (!part->pass) w += "; " + part->witness;
    return fail(w);
  }
  return {};
}

enum class LemmaPart { Q0, Q1, DLdt };

CheckOutcomeEx lemmaPart(const TransformationMap& map, const LemmaInput& in, LemmaPart part) {
  const PullbackReport r = checkCosmologicalLemma(map, in);
  switch (part) {
    case LemmaPart::Q0: return from(r.q0Vanishes);
    case LemmaPart::Q1: return from(r.q1IsTriad);
    case LemmaPart::DLdt: return from(r.constantL);
  }
  return {};
}

CheckOutcomeEx theoryReading(const LoadedTheory& t, const std::string& label) {
  auto rs = readings(t.file.readings, label);
  if (rs.empty()) return fail("no reading '" + label + "' in " + t.path);
  std::stable_partition(rs.begin(), rs.end(), [](const dsl::Reading* r) { return r->target == "action"; });
  for (const dsl::Reading* r : rs) {
    try {
      if (r->target == "action") {
        const CheckOutcome cme = checkCME(withAction(t, *r), LambdaMode::Formal);
        if (!cme.pass) return erratumUnless(cme, label);
      } else {
        const JetField* f = t.scope.field(r->target);
        if (!f) return fail("reading '" + label + "' targets an unknown field");
        const Valued printed = dsl::elaborate(*r->body, t.scope).valued();
        const Valued extracted = assembleQ(extractQ(t.theory), *f);
        if (!(printed == extracted))
          return erratumUnless({false, "Q(" + f->name + ") differs from the value fixed by the action"}, label);
      }
    } catch (const Error& e) {
      return erratumUnless({false, e.what()}, label);
    }
  }
  return {};
}

CheckOutcomeEx tauSolve(CheckContext& c) {
  auto& reg = FieldRegistry::global();
  const JetField& v = reg.at("v");
  const JetField& tp = reg.at("tau+");
  const InverseTriad inv = InverseTriad::adjoin(reg.at("e'"));
  // The printed relation moved to one side; linear in tau+.
  const Expression rel = tensor(c.G, "i(v, xi'+) + Tr[tau+ ^ i(v, e')] + Tr[e'+ ^ i(v, omega'+)] + Tr[omega' ^ i(v, chi'+)]").c[0];
  std::vector<Expression> rels;
  for (int a = 0; a < kDim; ++a) rels.push_back(leftDerivative(rel, v.component(a, 0)));
  const std::vector<Expression> sol = solveLinearInternal(rels, tp, inv);
  SubstitutionRules back;
  for (int i = 0; i < kDim; ++i) back[tp.component(i, 0)] = sol[static_cast<std::size_t>(i)];
  for (int a = 0; a < kDim; ++a) {
    const Expression r = inv.normalize(substituteFields(rels[static_cast<std::size_t>(a)], back));
    if (!r.isZero()) return fail("back-substitution, relation " + std::to_string(a + 1) + ": " + format(r));
  }
  const TransformationMap map = deriveTransformation(c.G.g);
  for (int i = 0; i < kDim; ++i) {
    const Expression r = inv.normalize(substituteFields(sol[static_cast<std::size_t>(i)], map.pRules)) -
                         Expression::generator(tp.component(i, 0));
    if (!r.isZero()) return fail("solved tau+ disagrees with the map, slot " + std::to_string(i + 1) + ": " + format(r));
  }
  return {};
}

std::vector<CheckDef> buildChecks() {
  std::vector<CheckDef> v;
  auto add = [&](std::string id, std::string suite, std::string theory, std::function<CheckOutcomeEx(CheckContext&)> f) {
    v.push_back({std::move(id), std::move(suite), std::move(theory), std::move(f)});
  };
  auto th = [](CheckContext& c, const std::string& n) -> const LoadedTheory& {
    return n == "bf" ? c.bf : n == "gr" ? c.gr : c.pp;
  };

  for (std::string t : {"bf", "gr", "pp"}) {
    add("cme." + t, "cme", t, [t, th](CheckContext& c) { return from(checkCME(th(c, t).theory, LambdaMode::Zero)); });
    add("cme." + t + ".formal", "cme", t,
        [t, th](CheckContext& c) { return from(checkCME(th(c, t).theory, LambdaMode::Formal)); });
    add("qext." + t, "qext", t, [t, th](CheckContext& c) { return from(checkExpectedQ(th(c, t).theory)); });
    add("qsq." + t, "qsq", t,
        [t, th](CheckContext& c) { return from(checkQSquared(th(c, t).theory, LambdaMode::Formal)); });
  }

  add("reading.bf.superfield", "cme", "bf", [](CheckContext& c) -> CheckOutcomeEx {
    const auto rs = readings(c.bf.file.readings, "superfield form");
    if (rs.empty()) return fail("no superfield reading");
    const auto eq = functionalEqual(withAction(c.bf, *rs.front()).action, c.bf.theory.action);
    return eq ? CheckOutcomeEx{} : fail(eq.witness);
  });
  add("erratum.gr.q-xi", "cme", "gr", [](CheckContext& c) { return theoryReading(c.gr, "Q(xi) as full bracket"); });
  add("erratum.pp.last-term", "cme", "pp",
      [](CheckContext& c) { return theoryReading(c.pp, "ghost bracket in the last term"); });

  add("erratum.F.chart", "hamilton", "", [](CheckContext& c) -> CheckOutcomeEx {
    const auto rs = readings(c.F.source->file.readings, "printed");
    if (rs.empty()) return fail("no printed reading of F");
    try {
      deriveTransformation(withBody(c.F, *rs.front()));
    } catch (const Error& e) {
      return erratumUnless({false, e.what()}, "printed");
    }
    return {};
  });
  add("erratum.F.signs", "pullback", "gr", [](CheckContext& c) -> CheckOutcomeEx {
    const auto rs = readings(c.F.source->file.readings, "printed signs");
    if (rs.empty()) return fail("no printed-signs reading of F");
    const TransformationMap map = deriveTransformation(withBody(c.F, *rs.front()));
    const PullbackReport r = pullbackAction(map, c.gr.theory, c.pp.theory, LambdaMode::Zero);
    return erratumUnless(r.lambda0, "printed signs");
  });

  for (std::string g : {"F", "G", "H"})
    add("hamilton." + g, "hamilton", "", [g](CheckContext& c) {
      const GeneratingFunction& gf = g == "F" ? c.F.g : g == "G" ? c.G.g : c.H.g;
      return from(checkHamiltonResiduals(gf, deriveTransformation(gf), {}));
    });
  add("hamilton.G.rules", "hamilton", "", [](CheckContext& c) -> CheckOutcomeEx {
    const TransformationMap map = deriveTransformation(c.G.g);
    for (const auto& r : c.G.source->file.rules) {
      const CheckOutcome o = checkRelation(map, dsl::elaborate(*r.lhs, c.G.scope), dsl::elaborate(*r.rhs, c.G.scope),
                                           dsl::print(*r.lhs));
      if (!o.pass) return fail(o.witness);
    }
    return {};
  });
  add("hamilton.G.compact", "hamilton", "", [](CheckContext& c) -> CheckOutcomeEx {
    const auto rs = readings(c.G.source->file.readings, "compact form");
    if (rs.empty()) return fail("no compact form of G");
    const Expression d = withBody(c.G, *rs.front()).body - c.G.g.body;
    return d.isZero() ? CheckOutcomeEx{} : fail(format(d));
  });
  add("hamilton.G.tau-solve", "hamilton", "", tauSolve);

  add("pullback.bf-pp", "pullback", "pp", [](CheckContext& c) {
    return pullback(deriveTransformation(c.G.g), c.pp.theory, c.bf.theory, false, nullptr);
  });
  add("pullback.bf-pp.formal", "pullback", "pp", [](CheckContext& c) {
    const LemmaInput in = lemmaFor(c.G, "xi'", "e'");
    return pullback(deriveTransformation(c.G.g), c.pp.theory, c.bf.theory, true, &in);
  });
  add("pullback.bf-gr", "pullback", "gr", [](CheckContext& c) {
    return pullback(deriveTransformation(composed(c)), c.gr.theory, c.bf.theory, false, nullptr);
  });
  add("pullback.bf-gr.formal", "pullback", "gr", [](CheckContext& c) {
    const LemmaInput in = lemmaFor(c.H, "xi", "e");
    return pullback(deriveTransformation(composed(c)), c.gr.theory, c.bf.theory, true, &in);
  });
  add("pullback.pp-gr.formal", "pullback", "gr", [](CheckContext& c) {
    return pullback(deriveTransformation(c.F.g), c.gr.theory, c.pp.theory, true, nullptr);
  });

  add("compose.gf-h", "compose", "", [](CheckContext& c) -> CheckOutcomeEx {
    const Expression d = composed(c).body - c.H.g.body;
    if (d.isZero()) return {};
    return {Status::Erratum, "composition minus displayed H: " + format(d)};
  });
  add("compose.chain", "compose", "", [](CheckContext& c) { return from(checkChainProperty(c.G.g, c.F.g, composed(c))); });

  for (std::string side : {"gr", "pp"}) {
    for (auto [name, part] : {std::pair{"q0", LemmaPart::Q0}, {"q1", LemmaPart::Q1}, {"dldt", LemmaPart::DLdt}})
      add("cosmological." + side + "." + name, "cosmological", side, [side, part](CheckContext& c) {
        if (side == "pp") return lemmaPart(deriveTransformation(c.G.g), lemmaFor(c.G, "xi'", "e'"), part);
        return lemmaPart(deriveTransformation(composed(c)), lemmaFor(c.H, "xi", "e"), part);
      });
  }

  add("symplecto.F", "symplecto", "", [](CheckContext& c) {
    return from(checkSymplectomorphism(deriveTransformation(c.F.g), c.gr.theory, c.pp.theory, LambdaMode::Formal));
  });
  add("symplecto.G", "symplecto", "", [](CheckContext& c) {
    return from(checkSymplectomorphism(deriveTransformation(c.G.g), c.pp.theory, c.bf.theory, LambdaMode::Zero));
  });
  add("symplecto.G.c", "symplecto", "", [](CheckContext& c) -> CheckOutcomeEx {
    for (const auto& r : c.G.source->file.rules)
      if (dsl::print(*r.lhs) == "c")
        return from(checkIntertwinedRule(deriveTransformation(c.G.g), c.pp.theory, c.bf.theory,
                                         FieldRegistry::global().at("c"), dsl::elaborate(*r.rhs, c.G.scope)));
    return fail("G has no rule for c");
  });
  add("symplecto.H", "symplecto", "", [](CheckContext& c) {
    return from(checkSymplectomorphism(deriveTransformation(c.H.g), c.gr.theory, c.bf.theory, LambdaMode::Zero));
  });

  auto onshell = [](CheckContext&) {
    auto& reg = FieldRegistry::global();
    return checkOnShellCorrespondence(reg.at("B"), reg.at("A"), reg.at("xi"));
  };
  add("onshell.a", "onshell", "bf", [onshell](CheckContext& c) { return from(onshell(c).aIdentity); });
  add("onshell.b", "onshell", "bf", [onshell](CheckContext& c) { return from(onshell(c).bIdentity); });
  add("onshell.locus", "onshell", "bf", [onshell](CheckContext& c) { return from(onshell(c).onShell); });

  const char* idNames[] = {"lie", "dw", "derivation", "bracket-commutes"};
  for (int i = 0; i < 4; ++i)
    add(std::string("identities.") + idNames[i], "identities", "", [i](CheckContext&) -> CheckOutcomeEx {
      const auto r = checkTopFormIdentities(kIdentitySeed, kIdentityInstances);
      const auto& o = r[static_cast<std::size_t>(i)].outcome;
      return o.pass ? CheckOutcomeEx{} : fail(r[static_cast<std::size_t>(i)].name + ": " + o.witness);
    });

  std::sort(v.begin(), v.end(), [](const CheckDef& a, const CheckDef& b) { return a.id < b.id; });
  return v;
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Erratum: return "erratum-detected";
  }
  return "?";
}

const std::string& conventionLedger() {
  static const std::string text =
      "eta = diag(-1, 1, 1)\n"
      "epsilon_123 = 1\n"
      "f_ij^k = epsilon_ijl eta^lk\n"
      "parity = ghost + form mod 2; components carry the ghost parity, dx^a are odd\n"
      "[xi, xi]^a = 2 xi^b d_b xi^a\n"
      "L_xi = i_xi d - d i_xi for odd xi\n"
      "antibracket anchored by Q_BF(A) = +d_A c\n"
      "Hamilton rules: p = -(-1)^|q| dG/dq, Q = (-1)^|P| dG/dP, |.| = component parity\n"
      "composition pairing: - sum (-1)^|p2| kappa p2 q2\n";
  return text;
}

const std::string& conventionLedgerHash() {
  static const std::string h = [] {
    std::uint64_t x = 1469598103934665603ull;
    for (unsigned char ch : conventionLedger()) {
      x ^= ch;
      x *= 1099511628211ull;
    }
    return hex64(x);
  }();
  return h;
}

CheckContext::CheckContext(Corpus& c)
    : corpus(c), bf(c.theory("bf")), gr(c.theory("gr")), pp(c.theory("pp")),
      G(c.bindGenFun("G")), F(c.bindGenFun("F")), H(c.bindGenFun("H")) {
  // Everything below registers symbols lazily elsewhere; do it here, in a
  // fixed order.
  for (const LoadedTheory* t : {&bf, &gr, &pp})
    for (const auto& e : t->theory.roster) componentPairs(e);
  flowParameter();
  RandomForms warm(kIdentitySeed);
  auto& reg = FieldRegistry::global();
  for (const char* n : {"B", "A"}) {
    const JetField& f = reg.at(n);
    reg.declare(std::string("?") + n + "+", f.kind, kDim - f.formDegree, -f.ghost - 1, 0);
  }
  InverseTriad::adjoin(reg.at("e'"));
}

const std::vector<CheckDef>& allChecks() {
  static const std::vector<CheckDef> checks = buildChecks();
  return checks;
}

std::vector<CheckReport> runChecks(CheckContext& ctx, const std::vector<const CheckDef*>& checks, unsigned workers) {
  std::vector<CheckReport> out(checks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < checks.size();) {
      const CheckDef& def = *checks[i];
      const auto t0 = std::chrono::steady_clock::now();
      CheckOutcomeEx r;
      try {
        r = def.run(ctx);
      } catch (const std::exception& e) {
        r = fail(std::string("exception: ") + e.what());
      }
      if (r.status != Status::Pass && r.witness.empty()) r.witness = "(no witness)";
      CheckReport& rep = out[i];
      rep.checkId = def.id;
      rep.status = r.status;
      rep.witness = std::move(r.witness);
      rep.wallTimeMs = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      rep.conventionLedgerHash = conventionLedgerHash();
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(checks.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::sort(out.begin(), out.end(), [](const CheckReport& a, const CheckReport& b) { return a.checkId < b.checkId; });
  return out;
}

}  // namespace bvg
