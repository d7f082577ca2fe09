#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bvgraded/corpus.hpp"

namespace bvg {

enum class Status { Pass, Fail, Erratum };
std::string_view to_string(Status s);

struct CheckReport {
  std::string checkId;
  Status status = Status::Pass;
  std::string witness;  // empty only for pass
  double wallTimeMs = 0;
  std::string conventionLedgerHash;
};

/// Content hash of the sign conventions in force (FNV-1a, hex).
const std::string& conventionLedgerHash();
/// The conventions themselves, one per line.
const std::string& conventionLedger();

/// Corpus objects shared by all checks. Construction is serial and registers
/// every symbol a check can touch, so ids (and printed witnesses) do not
/// depend on scheduling.
class CheckContext {
 public:
  explicit CheckContext(Corpus& corpus);

  Corpus& corpus;
  const LoadedTheory& bf;
  const LoadedTheory& gr;
  const LoadedTheory& pp;
  BoundGenFun G, F, H;
};

struct CheckOutcomeEx {
  Status status = Status::Pass;
  std::string witness;
};

struct CheckDef {
  std::string id;
  std::string suite;  // cme, qext, qsq, hamilton, pullback, ...
  std::string theory;  // for --theory filters, may be empty
  std::function<CheckOutcomeEx(CheckContext&)> run;
};

/// Every check, sorted by id.
const std::vector<CheckDef>& allChecks();

/// Runs the given checks on `workers` threads; the result is in id order.
std::vector<CheckReport> runChecks(CheckContext& ctx, const std::vector<const CheckDef*>& checks, unsigned workers);

}  // namespace bvg
