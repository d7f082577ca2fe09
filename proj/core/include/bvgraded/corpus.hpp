#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "bvgraded/bv.hpp"
#include "bvgraded/dsl.hpp"
#include "bvgraded/transform.hpp"

namespace bvg {

/// Raised for unreadable or malformed corpus files; what() names the file
/// and the source position.
class CorpusError : public Error {
 public:
  CorpusError(ErrorKind kind, const std::string& what) : Error(kind, what) {}
};

std::string readText(const std::filesystem::path& path);

struct LoadedTheory {
  std::string path;
  dsl::TheoryFile file;
  dsl::Scope scope;
  Theory theory;
};

/// Elaborates a parsed theory file: registers fields, builds the roster,
/// action density and expected Q.
LoadedTheory buildTheory(dsl::TheoryFile file, const std::string& origin = "<memory>");
LoadedTheory loadTheory(const std::filesystem::path& path);

/// The theory with its action replaced by a reading's body.
Theory withAction(const LoadedTheory& base, const dsl::Reading& reading);

struct LoadedGenFun {
  std::string path;
  dsl::GenFunFile file;
};

LoadedGenFun loadGenFun(const std::filesystem::path& path);

/// A generating function file elaborated against its two theories.
struct BoundGenFun {
  const LoadedGenFun* source = nullptr;
  dsl::Scope scope;  // both theories, probe fields and lets
  GeneratingFunction g;
};

/// Same charts, body taken from a reading.
GeneratingFunction withBody(const BoundGenFun& bound, const dsl::Reading& reading);

/// Directory of .bvt/.bvx files, loaded on demand and cached.
class Corpus {
 public:
  explicit Corpus(std::filesystem::path dir) : dir_(std::move(dir)) {}
  /// BVGRADED_CORPUS if set, otherwise the given fallback.
  static std::filesystem::path resolveDir(const std::filesystem::path& fallback);

  const std::filesystem::path& dir() const { return dir_; }
  const LoadedTheory& theory(const std::string& name);
  const LoadedGenFun& genfun(const std::string& name);
  /// A scope that binds every field of the given theories.
  dsl::Scope scopeFor(const std::vector<std::string>& theories);
  /// Elaborates genfun_<name>.bvx; the first used theory is the old chart.
  BoundGenFun bindGenFun(const std::string& name);

 private:
  std::filesystem::path dir_;
  std::map<std::string, LoadedTheory> theories_;
  std::map<std::string, LoadedGenFun> genfuns_;
};

}  // namespace bvg
