#pragma once

#include <string>
#include <vector>

#include "bvgraded/checks.hpp"

namespace bvg {

/// Plain-text report, one line per check with the witness indented below.
/// Wall times are printed only on request, so the default is golden-stable.
std::string renderText(const std::vector<CheckReport>& reports, bool timings = false);

}  // namespace bvg
