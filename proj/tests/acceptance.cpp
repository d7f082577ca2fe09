// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include "bvgraded/checks.hpp"
#include "bvgraded/report.hpp"
#include "mutations.hpp"
#include "oracles.hpp"

using namespace bvg;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

std::map<std::string, CheckReport> g_reports;

Result requireChecks(std::initializer_list<const char*> ids, bool erratumOk = false) {
  int n = 0;
  for (const char* id : ids) {
    auto it = g_reports.find(id);
    if (it == g_reports.end()) return {false, std::string("missing check ") + id};
    const CheckReport& r = it->second;
    if (r.status == Status::Fail || (r.status == Status::Erratum && !erratumOk))
      return {false, r.checkId + " " + std::string(to_string(r.status)) + ": " + r.witness.substr(0, 300)};
    if (r.status != Status::Pass && r.witness.empty()) return {false, r.checkId + " has no witness"};
    ++n;
  }
  return {true, std::to_string(n) + " checks"};
}

Result mutations(CheckContext& ctx) {
  const auto mutants = mutation::singleSignFlips(ctx.bf.file.action);
  const TransformationMap map = deriveTransformation(ctx.G.g);
  const dsl::Tensor bb = dsl::elaborate(*dsl::parseExpression("BB"), ctx.G.scope);
  const LemmaInput lemma{bb, dsl::elaborate(*dsl::parseExpression("xi'"), ctx.G.scope).valued(),
                         dsl::elaborate(*dsl::parseExpression("e'"), ctx.G.scope)};
  int detected = 0;
  std::string missed;
  for (const auto& m : mutants) {
    dsl::TheoryFile file = ctx.bf.file;
    file.action = m.tree;
    const Theory mutated = buildTheory(file, "<mutant>").theory;
    const CheckOutcome cme = checkCME(mutated, LambdaMode::Formal);
    bool caught = !cme.pass && !cme.witness.empty();
    if (!caught) {
      const PullbackReport r = pullbackAction(map, ctx.pp.theory, mutated, LambdaMode::Formal, &lemma);
      caught = (!r.lambda0.pass && !r.lambda0.witness.empty()) || (!r.lambda1.pass && !r.lambda1.witness.empty());
    }
    if (caught)
      ++detected;
    else
      missed += " [" + m.description + "]";
  }
  const std::string detail = std::to_string(detected) + " of " + std::to_string(mutants.size()) + " sign flips caught" +
                             (missed.empty() ? "" : ", missed:" + missed);
  return {detected >= 5 && detected == static_cast<int>(mutants.size()), detail};
}

Result infrastructure(CheckContext& ctx, const std::filesystem::path& corpusDir, const std::filesystem::path& goldenDir) {
  // Parser fixed point on every corpus file.
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(corpusDir)) {
    const auto ext = entry.path().extension();
    if (ext != ".bvt" && ext != ".bvx") continue;
    const std::string text = readText(entry.path());
    const std::string printed = ext == ".bvt" ? dsl::print(dsl::parseTheory(text)) : dsl::print(dsl::parseGenFun(text));
    if (printed != text) return {false, "round trip changes " + entry.path().filename().string()};
    ++files;
  }
  // Golden report, and the same bytes on one worker and on many.
  std::vector<const CheckDef*> all;
  for (const auto& c : allChecks()) all.push_back(&c);
  const std::string one = renderText(runChecks(ctx, all, 1));
  const std::string many = renderText(runChecks(ctx, all, 8));
  if (one != many) return {false, "report depends on the worker count"};
  if (one != readText(goldenDir / "verify_all.txt")) return {false, "report differs from the golden file"};
  // Oracle suites.
  int instances = 0;
  for (const auto& r : {oracle::koszulBubbleSort(11, 200), oracle::adInvariance(12, 120), oracle::leibniz(13, 120),
                        oracle::eulerAnnihilatesExact(14, 120)}) {
    if (!r.pass) return {false, "oracle: " + r.witness};
    if (r.instances < 100) return {false, "oracle suite below 100 instances"};
    instances += r.instances;
  }
  return {true, std::to_string(files) + " files round-trip, golden stable, " + std::to_string(instances) +
                    " oracle instances"};
}

}  // namespace

int main() {
  const std::filesystem::path corpusDir = Corpus::resolveDir(BVGRADED_CORPUS_DIR);
  const std::filesystem::path goldenDir = BVGRADED_GOLDEN_DIR;
  Corpus corpus(corpusDir);
  CheckContext ctx(corpus);
  std::vector<const CheckDef*> all;
  for (const auto& c : allChecks()) all.push_back(&c);
  for (auto& r : runChecks(ctx, all, 4)) g_reports[r.checkId] = r;

  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"CME for GR, PP and BF, Lambda formal",
       [] { return requireChecks({"cme.bf", "cme.bf.formal", "cme.gr", "cme.gr.formal", "cme.pp", "cme.pp.formal"}); }},
      {"extracted Q matches the twelve listed assignments", [] { return requireChecks({"qext.bf", "qext.gr", "qext.pp"}); }},
      {"Q^2 = 0 componentwise", [] { return requireChecks({"qsq.bf", "qsq.gr", "qsq.pp"}); }},
      {"Hamilton residuals for F, G, H and the printed G rules",
       [] {
         return requireChecks({"hamilton.F", "hamilton.G", "hamilton.H", "hamilton.G.rules", "hamilton.G.compact",
                               "hamilton.G.tau-solve"});
       }},
      {"pullback of S_BF(Lambda) to S_PP(Lambda) and to S_GR(Lambda)",
       [] {
         return requireChecks({"pullback.bf-pp", "pullback.bf-pp.formal", "pullback.bf-gr", "pullback.bf-gr.formal"});
       }},
      {"composition of G and F against the displayed H",
       [] { return requireChecks({"compose.gf-h", "compose.chain"}, true); }},
      {"cosmological lemma: q0 = 0, q1 = e, dL/dt = 0",
       [] {
         return requireChecks({"cosmological.pp.q0", "cosmological.pp.q1", "cosmological.pp.dldt", "cosmological.gr.q0",
                               "cosmological.gr.q1", "cosmological.gr.dldt"});
       }},
      {"contraction identities on random top-forms",
       [] {
         return requireChecks(
             {"identities.lie", "identities.dw", "identities.derivation", "identities.bracket-commutes"});
       }},
      {"on-shell correspondence", [] { return requireChecks({"onshell.a", "onshell.b", "onshell.locus"}); }},
      {"single-sign mutations of S_BF are caught", [&] { return mutations(ctx); }},
      {"round trip, golden report, oracle suites", [&] { return infrastructure(ctx, corpusDir, goldenDir); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " (" << r.detail
              << ", " << static_cast<long>(ms) << " ms)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
