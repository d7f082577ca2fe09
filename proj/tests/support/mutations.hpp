#pragma once

#include <string>
#include <vector>

#include "bvgraded/dsl.hpp"

namespace mutation {

struct Mutant {
  std::string description;  // the flipped term, printed
  bvg::dsl::NodePtr tree;
};

/// Every copy of `tree` with exactly one summand sign flipped.
std::vector<Mutant> singleSignFlips(const bvg::dsl::NodePtr& tree);

}  // namespace mutation
