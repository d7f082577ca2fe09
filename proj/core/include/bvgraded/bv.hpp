#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bvgraded/calculus.hpp"

namespace bvg {

/// Formal cosmological constant: even, ghost 0, form 0.
SymbolId lambdaSymbol();

struct RosterEntry {
  const JetField* field = nullptr;
  const JetField* antifield = nullptr;
};

/// Darboux pairing of one field component with its antifield component.
/// `kappa` is the sign with which a^t x^s enters ⟨Φ†, X⟩ for X shaped like Φ.
struct ComponentPair {
  SymbolId field = kNoSymbol;
  SymbolId antifield = kNoSymbol;
  int kappa = 1;
  int fieldParity = 0;
};

struct Theory {
  std::string name;
  std::vector<RosterEntry> roster;
  Expression action;  // top-form density, polynomial in Lambda
  std::map<std::string, Valued> expectedQ;
  std::vector<std::string> notes;

  const RosterEntry* entryFor(const std::string& fieldOrAntifield) const;
  std::vector<ComponentPair> pairs() const;
  /// True when the base component belongs to a field or antifield of the roster.
  bool covers(SymbolId base) const;
};

/// ⟨Φ†, X⟩ as a top-form: Tr[Φ† ∧ X] for internal and scalar fields,
/// ι_X Φ† for vector fields.
Expression pairing(const Valued& antifield, const Valued& value);

/// Pairing signs of every component of a roster entry.
std::vector<ComponentPair> componentPairs(const RosterEntry& entry);

/// Odd bracket of two densities (top-forms) with respect to the roster.
Expression antibracketDensity(const Expression& f, const Expression& g, const std::vector<RosterEntry>& roster);

/// Component values of the Hamiltonian vector field of a density.
using QMap = std::map<SymbolId, Expression>;
QMap extractQ(const Expression& action, const std::vector<RosterEntry>& roster);
QMap extractQ(const Theory& theory);

/// Left derivation extending Q to jet polynomials: Q(f) = Σ Q(z) ∂f/∂z.
Expression applyQ(const QMap& q, const Expression& expr);
/// Field-level view of Q on a roster field or antifield.
Valued assembleQ(const QMap& q, const JetField& field);

/// Polynomial coefficient of Lambda^k.
Expression lambdaCoefficient(const Expression& expr, int power);
int lambdaDegree(const Expression& expr);

enum class LambdaMode { Zero, Formal };

struct CheckOutcome {
  bool pass = true;
  std::string witness;
};

CheckOutcome checkCME(const Theory& theory, LambdaMode mode);
/// Q(Q(z)) = 0 for every field and antifield component.
CheckOutcome checkQSquared(const Theory& theory, LambdaMode mode = LambdaMode::Zero);
/// extractQ vs the expected assignments, field by field, at Lambda = 0.
CheckOutcome checkExpectedQ(const Theory& theory);

struct OnShellReport {
  CheckOutcome bIdentity;   // d_A ι_ξB - L^A_ξ B + ι_ξ d_A B = 0
  CheckOutcome aIdentity;   // d_A(-ι_ξA) - L^A_ξ A + ι_ξ F_A = 0
  CheckOutcome onShell;     // discrepancies vanish when d_A B = F_A = 0
};
OnShellReport checkOnShellCorrespondence(const JetField& b, const JetField& a, const JetField& xi);

}  // namespace bvg
