#pragma once

#include "hpn/net.hpp"

#include <string>
#include <vector>

namespace hpn {

struct Violation {
  std::string rule;     // short rule tag, e.g. "no-c-to-d-arc"
  std::string message;  // names the offending arc/place
};

/// Checks the structural constraints of the net's class. Empty report
/// means the net is well formed. Violations are report entries, never
/// exceptions.
std::vector<Violation> validate_structure(const HybridNet& net);

}  // namespace hpn
