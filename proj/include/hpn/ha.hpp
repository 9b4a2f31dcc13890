#pragma once

#include "hpn/ccpn.hpp"
#include "hpn/hybrid.hpp"
#include "hpn/net.hpp"

#include <map>
#include <string>
#include <vector>

namespace hpn {

struct MarkingCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HaVariable {
  std::string name;
  bool is_clock = false;  // clocks flow at rate 1 everywhere
};

struct Constraint {
  enum Op { Ge, Le, Eq };
  int var;
  Op op;
  Rat bound;
};

struct HaEdge {
  int src = -1;
  int dst = -1;
  std::string label;  // transition id; internal edges carry "~..." labels
  std::vector<Constraint> guard;
  std::vector<int> resets;    // clock variables reset to zero
  bool internal = false;      // zero-crossing / refill edges
  std::vector<int> zero_set;  // variables pinned to zero by this edge
};

struct HaLocation {
  std::string id;
  std::vector<Rat> flow;  // per variable
  std::vector<Constraint> invariant;
  // Structural annotations used by the simulator and the equivalence
  // harness; serialized with the automaton.
  std::string group;              // timed-automaton location id
  SignVector sign;                // sign vector over continuous variables
  std::vector<Rat> d_marking;     // discrete marking behind this group
  std::vector<std::string> enabled;  // labels enabled here
  std::vector<int> out_edges;
};

struct HybridAutomaton {
  std::vector<HaVariable> vars;
  std::vector<HaLocation> locations;
  std::vector<HaEdge> edges;
  int initial_location = 0;
  std::vector<Rat> initial_valuation;
  std::vector<std::string> labels;          // firing order for log purposes
  std::vector<std::string> d_place_names;   // names for d_marking entries

  int var_index(const std::string& name) const;
  std::size_t num_continuous() const;
};

/// Discrete skeleton of a d-elementary net: D-places/D-transitions with
/// their intervals; loop arcs to the continuous part are dropped.
/// orig_places / orig_transitions map back into the source net.
struct TimePN {
  HybridNet net;
  std::vector<int> orig_places;
  std::vector<int> orig_transitions;
};

TimePN extract_discrete_part(const HybridNet& net);

/// Marking-graph timed automaton of a time PN: one clock per transition,
/// reset when the transition becomes newly enabled; guards x >= alpha,
/// invariants x <= beta. Throws MarkingCapExceeded past marking_cap
/// reachable markings.
HybridAutomaton timepn_to_timed_automaton(const HybridNet& tpn,
                                          std::size_t marking_cap = 4096);

/// The CCPN induced by a discrete marking: continuous nodes plus the
/// continuous transitions whose loop-arc conditions hold.
HybridNet ccpn_configuration(const HybridNet& net, const Marking& d_marking);

/// Sign-vector automaton of a CCPN: one location per reachable closed
/// sign vector, constant flow W*v(sign), edges for (sets of) places
/// reaching zero.
HybridAutomaton ccpn_to_ha(const HybridNet& ccpn);

/// Full three-step translation of a d-elementary (or purely continuous,
/// or purely discrete) net.
HybridAutomaton translate(const HybridNet& net, std::size_t marking_cap = 4096);

/// Event-driven run of a translated automaton under the same firing
/// policies as simulate_hybrid; logs are directly comparable.
struct HaSimResult {
  Trajectory trajectory;  // continuous variables only, HA variable order
  EventLog log;           // snapshots: continuous vars then d_marking
};

HaSimResult simulate_ha(const HybridAutomaton& ha, const Rat& horizon,
                        const FiringPolicy& policy,
                        const HybridSimConfig& cfg = {});

/// First divergence between two event logs (hybrid vs automaton run),
/// or nullopt when equivalent. Markings compare by name.
struct LogDivergence {
  std::size_t index;
  std::string expected, got;
};
std::optional<LogDivergence> compare_logs(const HybridNet& net,
                                          const EventLog& hybrid_log,
                                          const HybridAutomaton& ha,
                                          const EventLog& ha_log);

}  // namespace hpn
