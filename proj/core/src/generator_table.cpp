#include "bvgraded/generator_table.hpp"

#include <algorithm>

#include "bvgraded/error.hpp"

namespace bvg {

std::vector<std::vector<int>> multiIndicesUpTo(int order) {
  std::vector<std::vector<int>> out{{}};
  std::vector<std::vector<int>> layer{{}};
  for (int k = 1; k <= order; ++k) {
    std::vector<std::vector<int>> next;
    for (const auto& mi : layer) {
      const int start = mi.empty() ? 0 : mi.back();
      for (int b = start; b < kDim; ++b) {
        auto grown = mi;
        grown.push_back(b);
        next.push_back(std::move(grown));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

GeneratorTable::GeneratorTable() {
  chunks_.reserve(kMaxChunks);
  std::lock_guard lock(mutex_);
  for (int a = 0; a < kDim; ++a) {
    GeneratorSymbol s;
    s.name = "dx";
    s.indices = {a};
    s.grading = {0, 1};
    s.role = SymbolRole::Coordinate;
    dx_[static_cast<std::size_t>(a)] = pushLocked(std::move(s));
  }
  count_.store(pending_, std::memory_order_release);
}

GeneratorTable& GeneratorTable::global() {
  static GeneratorTable table;
  return table;
}

SymbolId GeneratorTable::pushLocked(GeneratorSymbol sym) {
  const std::size_t id = pending_;
  if ((id >> kChunkBits) >= chunks_.size()) {
    if (chunks_.size() == kMaxChunks) throw std::length_error("generator table exhausted");
    chunks_.push_back(std::make_unique<Chunk>());
  }
  const auto sid = static_cast<SymbolId>(id);
  if (sym.base == kNoSymbol) sym.base = sid;
  index_.emplace(Key{sym.name, sym.indices, sym.jet}, sid);
  mutableAt(sid) = std::move(sym);
  ++pending_;
  return sid;
}

SymbolId GeneratorTable::component(const std::string& name, std::vector<int> indices,
                                   Grading grading, int maxJetOrder) {
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(Key{name, indices, {}}); it != index_.end()) {
    const auto& existing = (*this)[it->second];
    if (existing.grading != grading || existing.role != SymbolRole::Component)
      throw Error(ErrorKind::GradingMismatch, "generator '" + name + "' re-registered with a different grading");
    if (existing.maxJetOrder < maxJetOrder)
      throw Error(ErrorKind::JetOrderOverflow, "generator '" + name + "' re-registered with a deeper jet order");
    return it->second;
  }
  const auto jets = multiIndicesUpTo(maxJetOrder);
  std::map<std::vector<int>, SymbolId> ids;
  for (const auto& mi : jets) {
    GeneratorSymbol s;
    s.name = name;
    s.indices = indices;
    s.jet = mi;
    s.grading = grading;
    s.role = SymbolRole::Component;
    s.base = ids.empty() ? kNoSymbol : ids.at({});
    s.maxJetOrder = maxJetOrder;
    ids.emplace(mi, pushLocked(std::move(s)));
  }
  for (const auto& [mi, id] : ids) {
    if (static_cast<int>(mi.size()) == maxJetOrder) continue;
    for (int b = 0; b < kDim; ++b) {
      auto up = mi;
      up.insert(std::upper_bound(up.begin(), up.end(), b), b);
      mutableAt(id).raised[static_cast<std::size_t>(b)] = ids.at(up);
    }
  }
  const SymbolId base = ids.at({});
  count_.store(pending_, std::memory_order_release);
  return base;
}

SymbolId GeneratorTable::parameter(const std::string& name, Grading grading) {
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(Key{name, {}, {}}); it != index_.end()) {
    if ((*this)[it->second].grading != grading)
      throw Error(ErrorKind::GradingMismatch, "parameter '" + name + "' re-registered with a different grading");
    return it->second;
  }
  GeneratorSymbol s;
  s.name = name;
  s.grading = grading;
  s.role = SymbolRole::Parameter;
  const SymbolId id = pushLocked(std::move(s));
  count_.store(pending_, std::memory_order_release);
  return id;
}

std::optional<SymbolId> GeneratorTable::find(const std::string& name, const std::vector<int>& indices,
                                             const std::vector<int>& jet) const {
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(Key{name, indices, jet}); it != index_.end()) return it->second;
  return std::nullopt;
}

SymbolId GeneratorTable::raise(SymbolId id, int b) const {
  const auto& s = (*this)[id];
  const SymbolId up = s.raised[static_cast<std::size_t>(b)];
  if (up == kNoSymbol) throw Error(ErrorKind::JetOrderOverflow, "cannot differentiate " + label(id));
  return up;
}

SymbolId GeneratorTable::jet(SymbolId base, std::span<const int> multiIndex) const {
  SymbolId id = base;
  for (int b : multiIndex) id = raise(id, b);
  return id;
}

std::string GeneratorTable::label(SymbolId id) const {
  const auto& s = (*this)[id];
  std::string out = s.name;
  if (!s.indices.empty()) {
    out += '_';
    for (int i : s.indices) out += static_cast<char>('1' + i);
  }
  if (!s.jet.empty()) {
    out += ',';
    for (int b : s.jet) out += static_cast<char>('1' + b);
  }
  return out;
}

}  // namespace bvg
