#pragma once

#include <cstdint>
#include <compare>
#include <ostream>

namespace bvg {

/// Bigrading of a generator: ghost number and the number of coordinate
/// one-form factors it contributes. Commutation signs only see the total
/// parity (ghost + form) mod 2.
struct Grading {
  int ghost = 0;
  int form = 0;

  constexpr int parity() const noexcept { return ((ghost + form) % 2 + 2) % 2; }
  constexpr int total() const noexcept { return ghost + form; }

  constexpr Grading operator+(Grading o) const noexcept { return {ghost + o.ghost, form + o.form}; }
  constexpr Grading operator-(Grading o) const noexcept { return {ghost - o.ghost, form - o.form}; }
  constexpr auto operator<=>(const Grading&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, Grading g) {
  return os << "(gh " << g.ghost << ", form " << g.form << ")";
}

}  // namespace bvg
