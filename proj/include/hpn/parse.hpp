#pragma once

#include "hpn/net.hpp"

#include <stdexcept>
#include <string>

namespace hpn {

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) +
                           ": " + msg),
        line(line_),
        column(col_) {}
};

/// Parses the line-oriented model grammar:
///
///   place <id> continuous|discrete = <initial>
///   transition <id> continuous [speed=<rational>]
///   transition <id> discrete duration=<rational>
///   transition <id> discrete interval=[<rational>,<rational>|inf]
///   arc <src> -> <dst> [weight=<rational>]
///   # comment
///
/// The net class is inferred: discrete transitions with durations give
/// HybridTimed, with intervals DElementary; purely continuous nets are
/// CCPN when speeds are declared, AutonomousContinuous otherwise.
HybridNet parse_model(const std::string& text);

HybridNet parse_model_file(const std::string& path);

/// Emits the same grammar; parse(serialize(net)) is structurally equal
/// to net.
std::string serialize_model(const HybridNet& net);

}  // namespace hpn
