#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bvgraded/bv.hpp"

namespace bvg {

/// Random homogeneous forms over a private set of fields: an odd vector
/// ghost, a connection, and even/odd scalar and internal atoms.
class RandomForms {
 public:
  explicit RandomForms(std::uint64_t seed);

  const Valued& xi() const { return xi_; }
  const Valued& connection() const { return conn_; }

  /// Coefficient polynomial of the given parity (1-3 terms, jets up to order 1).
  Expression coefficient(int parity);
  Expression scalarForm(int degree, int parity);
  Valued internalForm(int degree, int parity);
  int coin() { return static_cast<int>(rng_() % 2); }

 private:
  Expression atom(bool odd);

  std::mt19937_64 rng_;
  Valued xi_, conn_;
  std::vector<const JetField*> even_, odd_;
};

struct IdentityResult {
  std::string name;
  int instances = 0;
  CheckOutcome outcome;
};

/// The four contraction identities for top-forms on a 3-manifold, each on
/// `instances` random forms.
std::vector<IdentityResult> checkTopFormIdentities(std::uint64_t seed, int instances);

}  // namespace bvg
