#pragma once

#include "hpn/ccpn.hpp"
#include "hpn/net.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpn {

enum class PolicyKind { Earliest, Latest, UniformRandom, Scripted };

/// Resolves the nondeterministic choice of discrete firing times within
/// [alpha, beta] of the enabling instant.
struct FiringPolicy {
  PolicyKind kind = PolicyKind::Earliest;
  std::uint64_t seed = 0;
  // (transition id, absolute time), consumed in order per transition.
  std::vector<std::pair<std::string, Rat>> script;

  static FiringPolicy earliest() { return {}; }
  static FiringPolicy latest() { return {PolicyKind::Latest, 0, {}}; }
  static FiringPolicy random(std::uint64_t seed) {
    return {PolicyKind::UniformRandom, seed, {}};
  }
  static FiringPolicy scripted(std::vector<std::pair<std::string, Rat>> s) {
    return {PolicyKind::Scripted, 0, std::move(s)};
  }
};

enum class EventKind { ContinuousZero, DiscreteFire, EnableChange };

const char* event_kind_name(EventKind k);

struct Event {
  Rat time;
  EventKind kind;
  std::string detail;  // place id, transition id, or "+T"/"-T" for enable flips
  Marking snapshot;    // marking right after the event
};

struct EventLog {
  std::vector<Event> events;
};

struct ScriptViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZenoSuspect : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FiringUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HybridSimConfig {
  long max_events = 1000000;
};

struct HybridResult {
  Trajectory trajectory;
  EventLog log;
};

/// True iff every input place of discrete transition tj carries at least
/// the arc weight (integer compare on D-places, rational threshold
/// compare on C-places).
bool d_enabled(const HybridNet& net, const Marking& m, int tj);

/// m - Pre(.,tj) + Post(.,tj); throws FiringUnderflow if an entry would
/// go negative.
Marking fire_discrete(const HybridNet& net, const Marking& m, int tj);

/// Continuous transition gating: active iff every discrete input place
/// meets its loop-arc weight. Entries for discrete transitions are false.
std::vector<bool> active_configuration(const HybridNet& net, const Marking& m);

/// Scheduled absolute firing time for a transition enabled since
/// `enabled_since`, or nullopt for "never". `rng` is consulted only by
/// UniformRandom; `script_time` is the pending scripted entry, if any.
ExtRat select_firing_time(const FiringPolicy& policy, const Interval& iv,
                          const Rat& enabled_since, const Rat& horizon,
                          std::mt19937_64* rng,
                          const std::optional<Rat>& script_time);

/// Event loop over CCPN phases, discrete firings, and (timed nets)
/// threshold crossings. Deterministic for every policy but UniformRandom,
/// which is reproducible per seed.
HybridResult simulate_hybrid(const HybridNet& net, const Rat& horizon,
                             const FiringPolicy& policy,
                             const HybridSimConfig& cfg = {});

/// Rewrites a HybridTimed net into the DElementary form with point
/// intervals [d, d]. Requires the net to satisfy the d-elementary
/// structural constraints (no C-place inputs to D-transitions).
HybridNet degenerate_intervals(const HybridNet& net);

}  // namespace hpn
