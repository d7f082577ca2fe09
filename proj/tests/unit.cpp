#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>

#include "bvgraded/bv.hpp"
#include "bvgraded/corpus.hpp"
#include "bvgraded/identities.hpp"
#include "bvgraded/transform.hpp"
#include "oracles.hpp"

using namespace bvg;

namespace {

Expression gen(SymbolId s) { return Expression::generator(s); }

// Copy of a theory with every field renamed by a suffix.
dsl::NodePtr rename(const dsl::NodePtr& n, const std::map<std::string, std::string>& names) {
  if (!n) return n;
  auto copy = std::make_shared<dsl::Node>(*n);
  if (copy->kind == dsl::NodeKind::Field) {
    auto it = names.find(copy->name);
    if (it != names.end()) copy->name = it->second;
  }
  for (auto& c : copy->children) c = rename(c, names);
  return copy;
}

dsl::TheoryFile suffixed(dsl::TheoryFile file, const std::string& suffix) {
  std::map<std::string, std::string> names;
  auto re = [&](const std::string& s) {
    const auto plus = s.find('+');
    const std::string n = plus == std::string::npos ? s + suffix : s.substr(0, plus) + suffix + s.substr(plus);
    names[s] = n;
    return n;
  };
  file.name += suffix;
  for (auto& f : file.fields) f.name = re(f.name);
  for (auto& s : file.superfields) s.name = re(s.name);
  for (auto& p : file.pairs) {
    p.field = names.at(p.field);
    p.antifield = names.at(p.antifield);
  }
  for (auto& s : file.superfields) s.body = rename(s.body, names);
  file.action = rename(file.action, names);
  for (auto& q : file.q) {
    q.target = names.at(q.target);
    q.body = rename(q.body, names);
  }
  file.readings.clear();
  return file;
}

LoadedTheory corpusTheory(const std::string& name, const std::string& suffix = "") {
  const auto file = dsl::parseTheory(readText(std::filesystem::path(BVGRADED_CORPUS_DIR) / (name + ".bvt")));
  return buildTheory(suffix.empty() ? file : suffixed(file, suffix), name + suffix);
}

}  // namespace

TEST_CASE("expression: odd generators anticommute and square to zero") {
  auto& reg = FieldRegistry::global();
  const JetField& c = reg.declare("ut_c", IndexKind::Internal, 0, 1, 0);
  const JetField& u = reg.declare("ut_u", IndexKind::Internal, 0, 0, 0);
  const Expression x = gen(c.component(0, 0)), y = gen(c.component(1, 0)), z = gen(u.component(0, 0));
  CHECK((x * y + y * x).isZero());
  CHECK((x * x).isZero());
  CHECK((z * x - x * z).isZero());
  CHECK(((x + z) * Rational(2) - x * Rational(2) - z - z).isZero());
}

TEST_CASE("calculus: d squares to zero and dx anticommutes with odd components") {
  RandomForms forms(7);
  for (int i = 0; i < 20; ++i) {
    const Expression f = forms.scalarForm(i % 3, forms.coin());
    CHECK(exteriorD(exteriorD(f)).isZero());
  }
  const Expression dx1 = gen(GeneratorTable::global().dx(0));
  const JetField& c = FieldRegistry::global().declare("ut_g", IndexKind::Scalar, 0, 1, 0);
  const Expression g = gen(c.component(0, 0));
  CHECK((dx1 * g + g * dx1).isZero());
}

TEST_CASE("calculus: structure constants") {
  // f_{12}^3 = eps_{123} eta^{33}
  CHECK(structureConstant(0, 1, 2) == Rational(1));
  CHECK(structureConstant(1, 0, 2) == Rational(-1));
  CHECK(structureConstant(1, 2, 0) == Rational(-1));
  CHECK(structureConstant(0, 0, 1) == Rational(0));
}

TEST_CASE("dsl: syntax errors carry positions") {
  try {
    dsl::parseTheory("");
    FAIL("empty file parsed");
  } catch (const dsl::Diagnostic& d) {
    CHECK(d.kind() == ErrorKind::SyntaxError);
    CHECK(d.pos() == dsl::SourcePos{1, 1});
  }
  try {
    dsl::parseExpression("Tr[B ^ ]");
    FAIL("dangling wedge parsed");
  } catch (const dsl::Diagnostic& d) {
    CHECK(d.kind() == ErrorKind::SyntaxError);
    CHECK(d.pos().column == 8);
  }
}

TEST_CASE("dsl: expressions print to a parser fixed point") {
  for (const char* text : {"Tr[B ^ F[A]]", "1/2 * Tr[c+ ^ [c, c]]", "-i(xi, i(xi, chi+)) + d(u)",
                           "top(Tr[BB ^ BB ^ BB])", "expi(-xi', QQ)", "lie(xi, omega, e) - L(xi, f)"}) {
    const auto tree = dsl::parseExpression(text);
    const std::string printed = dsl::print(*tree);
    CHECK(printed == dsl::print(*dsl::parseExpression(printed)));
    CHECK(dsl::sameTree(*tree, *dsl::parseExpression(printed)));
  }
}

TEST_CASE("corpus: every file round-trips byte for byte") {
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(BVGRADED_CORPUS_DIR)) {
    const std::string text = readText(entry.path());
    if (entry.path().extension() == ".bvt") {
      CHECK(dsl::print(dsl::parseTheory(text)) == text);
      ++files;
    } else if (entry.path().extension() == ".bvx") {
      CHECK(dsl::print(dsl::parseGenFun(text)) == text);
      ++files;
    }
  }
  CHECK(files == 6);
}

TEST_CASE("bv: master equation and nilpotency hold for the corpus theories") {
  Corpus corpus(BVGRADED_CORPUS_DIR);
  for (const char* name : {"bf", "gr", "pp"}) {
    CAPTURE(name);
    const Theory& t = corpus.theory(name).theory;
    CHECK(checkCME(t, LambdaMode::Zero).pass);
    CHECK(checkCME(t, LambdaMode::Formal).pass);
    CHECK(checkQSquared(t).pass);
    CHECK(checkExpectedQ(t).pass);
  }
}

TEST_CASE("bv: dropping a term breaks the master equation") {
  Corpus corpus(BVGRADED_CORPUS_DIR);
  dsl::TheoryFile file = corpus.theory("bf").file;
  auto sum = std::make_shared<dsl::Node>(*file.action);
  sum->children.erase(sum->children.begin() + 2);
  sum->signs.erase(sum->signs.begin() + 2);
  file.action = sum;
  const CheckOutcome r = checkCME(buildTheory(file).theory, LambdaMode::Zero);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.witness.empty());
}

TEST_CASE("transform: the identity generating function maps a theory onto its copy") {
  const LoadedTheory a = corpusTheory("bf");
  const LoadedTheory b = corpusTheory("bf", "_copy");
  std::vector<const JetField*> q, P;
  for (const auto& e : a.theory.roster) q.push_back(e.field);
  for (const auto& e : b.theory.roster) P.push_back(e.antifield);
  const GeneratingFunction id = identityGenerating(q, a.theory.roster, P, b.theory.roster);
  const TransformationMap map = deriveTransformation(id);
  CHECK(checkHamiltonResiduals(id, map).pass);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t k = 0; k < q[i]->components.size(); ++k) {
      const auto& newField = *b.theory.roster[i].field;
      const auto& oldAnti = *a.theory.roster[i].antifield;
      const auto& newAnti = *b.theory.roster[i].antifield;
      const auto nf = map.qRules.find(newField.components[k]);
      REQUIRE(nf != map.qRules.end());
      CHECK(nf->second == gen(q[i]->components[k]));
      const auto oa = map.pRules.find(oldAnti.components[k]);
      REQUIRE(oa != map.pRules.end());
      CHECK(oa->second == gen(newAnti.components[k]));
    }
  const PullbackReport r = pullbackAction(map, a.theory, b.theory, LambdaMode::Formal, nullptr);
  CHECK(r.lambda0.pass);
  CHECK(r.lambda1.pass);
  CHECK(checkSymplectomorphism(map, a.theory, b.theory).pass);
}

TEST_CASE("transform: a generating function of the wrong degree is rejected") {
  const LoadedTheory a = corpusTheory("pp");
  const LoadedTheory b = corpusTheory("pp", "_w");
  std::vector<const JetField*> q, P;
  for (const auto& e : a.theory.roster) q.push_back(e.field);
  for (const auto& e : b.theory.roster) P.push_back(e.antifield);
  GeneratingFunction g = identityGenerating(q, a.theory.roster, P, b.theory.roster);
  const auto ghost = std::find_if(q.begin(), q.end(), [](const JetField* f) { return f->ghost != 0; });
  REQUIRE(ghost != q.end());
  g.body = g.body * gen((*ghost)->components[0]);
  CHECK_THROWS_AS(deriveTransformation(g), Error);
}

TEST_CASE("transform: corpus maps satisfy the Hamilton relations and the chain property") {
  Corpus corpus(BVGRADED_CORPUS_DIR);
  for (const char* name : {"F", "G", "H"}) {
    CAPTURE(name);
    const BoundGenFun g = corpus.bindGenFun(name);
    CHECK(checkHamiltonResiduals(g.g, deriveTransformation(g.g)).pass);
  }
  const GeneratingFunction& G = corpus.bindGenFun("G").g;
  const GeneratingFunction& F = corpus.bindGenFun("F").g;
  CHECK(checkChainProperty(G, F, composeGenerating(G, F)).pass);
}

TEST_CASE("transform: composing with an identity keeps the pullback") {
  Corpus corpus(BVGRADED_CORPUS_DIR);
  const BoundGenFun G = corpus.bindGenFun("G");
  const LoadedTheory& pp = corpus.theory("pp");
  const LoadedTheory copy = corpusTheory("pp", "_id");
  auto conjugate = [](const Theory& t, const JetField* f) {
    for (const auto& e : t.roster) {
      if (e.field == f) return e.antifield;
      if (e.antifield == f) return e.field;
    }
    return static_cast<const JetField*>(nullptr);
  };
  std::vector<const JetField*> q, P;
  for (const JetField* f : G.g.oldFields) {
    const JetField* partner = conjugate(pp.theory, f);
    REQUIRE(partner);
    P.push_back(partner);
    std::string n = f->name;
    const auto plus = n.find('+');
    n = plus == std::string::npos ? n + "_id" : n.substr(0, plus) + "_id" + n.substr(plus);
    q.push_back(&FieldRegistry::global().at(n));
  }
  const GeneratingFunction id = identityGenerating(q, copy.theory.roster, P, pp.theory.roster);
  const GeneratingFunction composed = composeGenerating(G.g, id);
  CHECK(checkChainProperty(G.g, id, composed).pass);
  const PullbackReport r = pullbackAction(deriveTransformation(composed), copy.theory, corpus.theory("bf").theory,
                                          LambdaMode::Zero);
  CHECK_MESSAGE(r.lambda0.pass, r.lambda0.witness);
}

TEST_CASE("identities: the four top-form identities on random instances") {
  for (const auto& r : checkTopFormIdentities(20240611, 24)) {
    CAPTURE(r.name);
    CHECK(r.instances >= 20);
    CHECK(r.outcome.pass);
  }
}

TEST_CASE("oracles: at least 100 instances each") {
  for (const auto& r : {oracle::koszulBubbleSort(1, 200), oracle::adInvariance(2, 120), oracle::leibniz(3, 120),
                        oracle::eulerAnnihilatesExact(4, 120)}) {
    CHECK(r.instances >= 100);
    CHECK_MESSAGE(r.pass, r.witness);
  }
  const auto det = oracle::tripleTraceDeterminant();
  CHECK_MESSAGE(det.pass, det.witness);
}
