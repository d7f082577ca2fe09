#include "mutations.hpp"

#include <memory>

namespace mutation {

using bvg::dsl::Node;
using bvg::dsl::NodeKind;
using bvg::dsl::NodePtr;

namespace {

int countSites(const Node& n) {
  int k = n.kind == NodeKind::Sum ? static_cast<int>(n.signs.size()) : 0;
  for (const auto& c : n.children) k += countSites(*c);
  return k;
}

// Copies n, flipping the site with the given preorder index.
NodePtr flip(const Node& n, int& site, std::string& what) {
  auto out = std::make_shared<Node>(n);
  if (n.kind == NodeKind::Sum)
    for (std::size_t i = 0; i < out->signs.size(); ++i, --site)
      if (site == 0) {
        out->signs[i] = -out->signs[i];
        what = print(*n.children[i]);
        site = -1;
        return out;
      }
  for (auto& c : out->children) {
    if (site < 0) break;
    c = flip(*c, site, what);
  }
  return out;
}

}  // namespace

std::vector<Mutant> singleSignFlips(const NodePtr& tree) {
  std::vector<Mutant> out;
  const int n = countSites(*tree);
  for (int k = 0; k < n; ++k) {
    int site = k;
    Mutant m;
    m.tree = flip(*tree, site, m.description);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace mutation
