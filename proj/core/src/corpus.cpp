#include "bvgraded/corpus.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bvg {
namespace {

[[noreturn]] void rethrow(const std::string& origin, const dsl::Diagnostic& d) {
  throw CorpusError(d.kind(), origin + ":" + std::to_string(d.pos().line) + ":" + std::to_string(d.pos().column) +
                                  ": " + d.message());
}

}  // namespace

std::string readText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(ErrorKind::Usage, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

LoadedTheory buildTheory(dsl::TheoryFile file, const std::string& origin) {
  LoadedTheory out;
  out.path = origin;
  try {
    out.scope = dsl::bindTheory(file);
    out.theory.name = file.name;
    out.theory.notes = file.notes;
    for (const auto& p : file.pairs) {
      const JetField* f = out.scope.field(p.field);
      const JetField* a = out.scope.field(p.antifield);
      if (!f || !a) throw dsl::Diagnostic(ErrorKind::RosterMismatch, p.pos, "pair refers to an undeclared field");
      out.theory.roster.push_back({f, a});
    }
    out.theory.action = dsl::elaborateScalar(*file.action, out.scope);
    for (const auto& q : file.q) out.theory.expectedQ[q.target] = dsl::elaborate(*q.body, out.scope).valued();
  } catch (const dsl::Diagnostic& d) {
    rethrow(origin, d);
  }
  out.file = std::move(file);
  return out;
}

LoadedTheory loadTheory(const std::filesystem::path& path) {
  const std::string text = readText(path);
  dsl::TheoryFile file;
  try {
    file = dsl::parseTheory(text);
  } catch (const dsl::Diagnostic& d) {
    rethrow(path.string(), d);
  }
  return buildTheory(std::move(file), path.string());
}

Theory withAction(const LoadedTheory& base, const dsl::Reading& reading) {
  Theory t = base.theory;
  t.action = dsl::elaborateScalar(*reading.body, base.scope);
  return t;
}

LoadedGenFun loadGenFun(const std::filesystem::path& path) {
  LoadedGenFun out;
  out.path = path.string();
  try {
    out.file = dsl::parseGenFun(readText(path));
  } catch (const dsl::Diagnostic& d) {
    rethrow(out.path, d);
  }
  return out;
}

std::filesystem::path Corpus::resolveDir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("BVGRADED_CORPUS"); env && *env) return env;
  return fallback;
}

const LoadedTheory& Corpus::theory(const std::string& name) {
  auto it = theories_.find(name);
  if (it != theories_.end()) return it->second;
  return theories_.emplace(name, loadTheory(dir_ / (name + ".bvt"))).first->second;
}

const LoadedGenFun& Corpus::genfun(const std::string& name) {
  auto it = genfuns_.find(name);
  if (it != genfuns_.end()) return it->second;
  return genfuns_.emplace(name, loadGenFun(dir_ / ("genfun_" + name + ".bvx"))).first->second;
}

dsl::Scope Corpus::scopeFor(const std::vector<std::string>& theories) {
  dsl::Scope scope;
  for (const auto& name : theories) {
    const LoadedTheory& t = theory(name);
    for (const auto& d : t.file.fields) scope.bindField(d.name, t.scope.field(d.name));
    for (const auto& s : t.file.superfields) scope.bindValue(s.name, *t.scope.value(s.name));
  }
  return scope;
}

}  // namespace bvg

namespace bvg {

GeneratingFunction withBody(const BoundGenFun& bound, const dsl::Reading& reading) {
  GeneratingFunction g = bound.g;
  try {
    g.body = dsl::elaborateScalar(*reading.body, bound.scope);
  } catch (const dsl::Diagnostic& d) {
    rethrow(bound.source->path, d);
  }
  return g;
}

BoundGenFun Corpus::bindGenFun(const std::string& name) {
  BoundGenFun out;
  out.source = &genfun(name);
  const dsl::GenFunFile& f = out.source->file;
  if (f.uses.size() != 2)
    throw CorpusError(ErrorKind::Usage, out.source->path + ": a generating function uses exactly two theories");
  out.scope = scopeFor(f.uses);
  out.g.name = f.name;
  out.g.oldRoster = theory(f.uses[0]).theory.roster;
  out.g.newRoster = theory(f.uses[1]).theory.roster;
  auto resolve = [&](const std::vector<std::string>& names, const std::string& side) {
    std::vector<const JetField*> v;
    for (const auto& n : names) {
      const JetField* fld = theory(side).scope.field(n);
      if (!fld) throw CorpusError(ErrorKind::RosterMismatch, out.source->path + ": '" + n + "' is not a field of " + side);
      v.push_back(fld);
    }
    return v;
  };
  out.g.oldFields = resolve(f.oldVars, f.uses[0]);
  out.g.newFields = resolve(f.newVars, f.uses[1]);
  try {
    auto& reg = FieldRegistry::global();
    for (const auto& d : f.fields) {
      try {
        out.scope.bindField(d.name, &reg.declare(d.name, d.kind, d.form, d.ghost, d.maxJet));
      } catch (const dsl::Diagnostic&) {
        throw;
      } catch (const Error& e) {
        throw dsl::Diagnostic(e.kind(), d.pos, e.detail());
      }
    }
    for (const auto& a : f.lets) out.scope.bindValue(a.target, dsl::elaborate(*a.body, out.scope));
    out.g.body = dsl::elaborateScalar(*f.body, out.scope);
  } catch (const dsl::Diagnostic& d) {
    rethrow(out.source->path, d);
  }
  return out;
}

}  // namespace bvg
