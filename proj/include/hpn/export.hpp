#pragma once

#include "hpn/ccpn.hpp"
#include "hpn/ha.hpp"
#include "hpn/hybrid.hpp"
#include "hpn/net.hpp"
#include "hpn/vcpn.hpp"

#include <string>

namespace hpn {

/// CSV `time,<place ids...>`, one row per breakpoint, shortest
/// round-trip decimals.
std::string trajectory_csv(const std::vector<std::string>& columns,
                           const Trajectory& traj);
std::string trajectory_csv(const HybridNet& net, const Trajectory& traj);

/// Same trajectory CSV; solver events appended as `# event,<t>,<text>`
/// comment rows.
std::string vcpn_csv(const HybridNet& net, const vcpn::SimResult& sim);

/// CSV `time,kind,detail,<columns...>` with the post-event snapshot.
std::string event_log_csv(const std::vector<std::string>& columns,
                          const EventLog& log);

/// Structured (JSON) and DOT renderings of the analysis graphs. Rationals
/// appear as "p/q" strings in JSON, decimals in DOT labels.
std::string evolution_graph_json(const HybridNet& net, const EvolutionGraph& g);
std::string evolution_graph_dot(const HybridNet& net, const EvolutionGraph& g);
std::string macro_graph_json(const HybridNet& net, const MacroGraph& g);
std::string macro_graph_dot(const HybridNet& net, const MacroGraph& g);

/// Versioned automaton schema; export_ha_json(import_ha(doc)) == doc for
/// documents this toolkit wrote. Throws std::runtime_error on malformed
/// or wrong-version input.
std::string export_ha_json(const HybridAutomaton& ha);
HybridAutomaton import_ha(const std::string& json_text);

/// Locations annotated with flow ("dm1/dt=-1") and invariants, edges
/// with guard/reset/label text.
std::string export_ha_dot(const HybridAutomaton& ha);

}  // namespace hpn
