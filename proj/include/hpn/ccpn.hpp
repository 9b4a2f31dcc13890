#pragma once

#include "hpn/net.hpp"

#include <stdexcept>
#include <vector>

namespace hpn {

/// Boolean abstraction of a continuous marking: one flag per continuous
/// place (declaration order), true = positive, false = empty.
using SignVector = std::vector<bool>;

enum class Enabling { Strong, Weak };

/// Thrown when the proportional-sharing fixed point fails to settle
/// (structurally pathological nets).
struct NonConvergence : std::runtime_error {
  std::vector<int> oscillating_places;
  explicit NonConvergence(std::vector<int> places);
};

struct ZeroEvent {
  ExtRat dt;                // nullopt = no place ever reaches zero
  std::vector<int> places;  // all places attaining the minimum
};

struct Phase {
  std::vector<Rat> speeds;      // per transition (discrete entries 0)
  std::vector<Rat> derivative;  // per place, W * speeds
  Rat start_time;
  ExtRat duration;              // nullopt = unbounded
  std::vector<int> exit_places; // places reaching zero at the end; empty = none
  Marking start_marking;
};

enum class Terminal { SteadyState, HorizonReached, Cycle };

struct EvolutionGraph {
  std::vector<Phase> phases;
  Terminal terminal = Terminal::SteadyState;
};

using Trajectory = std::vector<std::pair<Rat, Marking>>;

namespace ccpn {

SignVector macro_marking(const HybridNet& net, const Marking& m);

Enabling enabling_state(const HybridNet& net, const Marking& m, int tj);

/// Instantaneous firing speeds for the given macro-marking. Strongly
/// enabled transitions run at V_j; outputs of empty places are throttled
/// proportionally until every empty place satisfies outflow <= inflow.
/// `active` masks transitions (hybrid configuration gating); empty mask
/// means all continuous transitions active.
std::vector<Rat> compute_speeds(const HybridNet& net, const SignVector& sign,
                                const std::vector<bool>& active = {});

/// Closes a sign vector under instantaneous refill: an empty place whose
/// balance leaves a strictly positive derivative becomes positive
/// immediately. Monotone, at most |P^C| rounds.
SignVector stable_sign(const HybridNet& net, SignVector sign,
                       const std::vector<bool>& active = {});

/// W * v, exact.
std::vector<Rat> marking_derivative(const HybridNet& net,
                                    const std::vector<Rat>& speeds);

/// Earliest time a positive continuous place reaches zero under a
/// constant derivative; returns every place attaining the minimum.
ZeroEvent next_zero_event(const HybridNet& net, const Marking& m,
                          const std::vector<Rat>& derivative);

EvolutionGraph evolution_graph(const HybridNet& net, const ExtRat& horizon);

/// Breakpoints at phase boundaries and the horizon; markings between
/// breakpoints reconstruct by linear interpolation.
Trajectory simulate(const HybridNet& net, const Rat& horizon);

/// Marking at time t by interpolation of a trajectory.
Marking marking_at(const Trajectory& traj, const Rat& t);

}  // namespace ccpn

/// Macro-marking reachability graph of an autonomous continuous net.
struct MacroGraph {
  std::vector<SignVector> nodes;  // nodes[0] = macro(M0)
  struct Edge {
    int from, to, transition;
  };
  std::vector<Edge> edges;
};

MacroGraph macro_reachability_graph(const HybridNet& net);

}  // namespace hpn
