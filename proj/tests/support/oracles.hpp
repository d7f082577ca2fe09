#pragma once

#include <cstdint>
#include <string>

namespace oracle {

struct SuiteResult {
  int instances = 0;
  bool pass = true;
  std::string witness;
};

/// Products of random generator sequences against a bubble sort that flips
/// the sign on every transposition of two odd neighbours.
SuiteResult koszulBubbleSort(std::uint64_t seed, int instances);

/// Bracket and trace on random constant vectors against hand-rolled eta/epsilon
/// contractions, plus Tr[[a,b]c] = Tr[a[b,c]] and Jacobi on symbolic vectors.
SuiteResult adInvariance(std::uint64_t seed, int instances);

/// d(x y) = dx y + (-1)^|x| x dy on random homogeneous forms.
SuiteResult leibniz(std::uint64_t seed, int instances);

/// Euler derivatives of d(beta) vanish for random 2-forms beta.
SuiteResult eulerAnnihilatesExact(std::uint64_t seed, int instances);

/// Tr[e^3] = 3! det(e) dx1 dx2 dx3 with the determinant expanded over permutations.
SuiteResult tripleTraceDeterminant();

}  // namespace oracle
