#pragma once

#include "hpn/rational.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace hpn {

enum class NodeKind { Continuous, Discrete };

enum class NetClass { AutonomousContinuous, CCPN, VCPN, HybridTimed, DElementary };

const char* net_class_name(NetClass c);

struct Place {
  std::string id;
  NodeKind kind = NodeKind::Continuous;
};

/// Firing interval [lo, hi] of a discrete transition; hi = nullopt is
/// unbounded. A fixed duration d is the point interval [d, d].
struct Interval {
  Rat lo;
  ExtRat hi;
};

struct Transition {
  std::string id;
  NodeKind kind = NodeKind::Continuous;
  Rat max_speed;                     // continuous transitions
  std::optional<Rat> duration;       // discrete, timed nets
  std::optional<Interval> interval;  // discrete, time (interval) nets

  /// Uniform timing view: duration d reads as [d, d].
  Interval timing() const {
    if (duration) return {*duration, *duration};
    return *interval;
  }
};

/// Per-place amounts, indexed by the net's place order. Discrete entries
/// are integral, continuous entries arbitrary non-negative rationals.
using Marking = std::vector<Rat>;

struct HybridNet {
  NetClass net_class = NetClass::CCPN;
  std::vector<Place> places;
  std::vector<Transition> transitions;
  // Dense |P| x |T| weight matrices; nets in this domain are small.
  std::vector<std::vector<Rat>> pre;
  std::vector<std::vector<Rat>> post;
  Marking initial_marking;

  std::size_t num_places() const { return places.size(); }
  std::size_t num_transitions() const { return transitions.size(); }

  int place_index(const std::string& id) const;
  int transition_index(const std::string& id) const;

  /// Indices of continuous / discrete places in declaration order.
  std::vector<int> continuous_places() const;
  std::vector<int> discrete_places() const;
  std::vector<int> continuous_transitions() const;
  std::vector<int> discrete_transitions() const;

  /// W[i][j] = post(Pi,Tj) - pre(Pi,Tj).
  std::vector<std::vector<Rat>> incidence_matrix() const;

  /// Input place set of Tj ({i : pre(i,j) > 0}) and output set
  /// ({i : post(i,j) > 0}), by declaration order.
  std::vector<int> input_places(int tj) const;
  std::vector<int> output_places(int tj) const;

  bool purely_continuous() const;
};

/// Equal structure: same ordered places/transitions, weights, timings
/// and initial marking.
bool structurally_equal(const HybridNet& a, const HybridNet& b);

}  // namespace hpn
