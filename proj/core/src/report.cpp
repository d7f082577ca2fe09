#include "bvgraded/report.hpp"

#include <map>
#include <sstream>

namespace bvg {

std::string renderText(const std::vector<CheckReport>& reports, bool timings) {
  std::ostringstream os;
  std::map<Status, int> count;
  os << "bvgraded report, conventions " << conventionLedgerHash() << "\n";
  for (const auto& r : reports) {
    ++count[r.status];
    std::string status(to_string(r.status));
    status.resize(18, ' ');
    os << status << r.checkId;
    if (timings) os << "  (" << static_cast<long>(r.wallTimeMs) << " ms)";
    os << "\n";
    std::istringstream w(r.witness);
    for (std::string line; std::getline(w, line);) os << "    " << line << "\n";
  }
  os << "summary: " << count[Status::Pass] << " pass, " << count[Status::Fail] << " fail, " << count[Status::Erratum]
     << " erratum-detected\n";
  return os.str();
}

}  // namespace bvg
