#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "bvgraded/grading.hpp"

namespace bvg {

using SymbolId = std::uint32_t;
inline constexpr SymbolId kNoSymbol = 0xFFFFFFFFu;
inline constexpr int kDim = 3;

enum class SymbolRole : std::uint8_t {
  Coordinate,  // dx^a
  Component,   // jet coordinate of a field component
  Parameter,   // constants such as Lambda or a formal t; no jets
};

struct GeneratorSymbol {
  std::string name;
  std::vector<int> indices;  // 0-based internal/coordinate labels
  std::vector<int> jet;      // sorted coordinate multi-index
  Grading grading;
  SymbolRole role = SymbolRole::Component;
  SymbolId base = kNoSymbol;
  std::array<SymbolId, kDim> raised{kNoSymbol, kNoSymbol, kNoSymbol};
  int maxJetOrder = 0;

  int parity() const noexcept { return grading.parity(); }
  bool isParameter() const noexcept { return role == SymbolRole::Parameter; }
};

/// Registry of graded generators. Registration is serialized; lookups of
/// already-published ids are lock-free, so expressions built on one thread
/// can be read on any other.
class GeneratorTable {
 public:
  GeneratorTable();
  GeneratorTable(const GeneratorTable&) = delete;
  GeneratorTable& operator=(const GeneratorTable&) = delete;

  static GeneratorTable& global();

  SymbolId dx(int a) const { return dx_[static_cast<std::size_t>(a)]; }
  bool isDx(SymbolId id) const noexcept { return id < kDim; }

  /// Registers a field component together with all of its jets up to
  /// `maxJetOrder` and returns the id of the order-0 symbol. Re-registering
  /// an identical symbol returns the existing id.
  SymbolId component(const std::string& name, std::vector<int> indices, Grading grading,
                     int maxJetOrder);

  /// Registers an even or odd constant with vanishing total derivatives.
  SymbolId parameter(const std::string& name, Grading grading);

  std::optional<SymbolId> find(const std::string& name, const std::vector<int>& indices,
                               const std::vector<int>& jet = {}) const;

  const GeneratorSymbol& operator[](SymbolId id) const {
    return chunks_[id >> kChunkBits]->data[id & kChunkMask];
  }
  int parity(SymbolId id) const { return (*this)[id].parity(); }

  /// Total derivative target: the jet of `id` with one more derivative along b.
  SymbolId raise(SymbolId id, int b) const;
  SymbolId jet(SymbolId base, std::span<const int> multiIndex) const;

  std::size_t size() const noexcept { return count_.load(std::memory_order_acquire); }

  std::string label(SymbolId id) const;

 private:
  static constexpr unsigned kChunkBits = 12;
  static constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
  static constexpr std::size_t kChunkMask = kChunkSize - 1;
  static constexpr std::size_t kMaxChunks = 4096;

  struct Chunk {
    std::array<GeneratorSymbol, kChunkSize> data;
  };
  using Key = std::tuple<std::string, std::vector<int>, std::vector<int>>;

  SymbolId pushLocked(GeneratorSymbol sym);
  GeneratorSymbol& mutableAt(SymbolId id) { return chunks_[id >> kChunkBits]->data[id & kChunkMask]; }

  mutable std::mutex mutex_;
  std::vector<std::unique_ptr<Chunk>> chunks_;
  std::atomic<std::size_t> count_{0};
  std::size_t pending_ = 0;
  std::map<Key, SymbolId> index_;
  std::array<SymbolId, kDim> dx_{};
};

/// Sorted multi-indices of length <= order over kDim coordinates, ordered
/// by length then lexicographically.
std::vector<std::vector<int>> multiIndicesUpTo(int order);

}  // namespace bvg
