#include "hpn/net.hpp"

#include <stdexcept>

namespace hpn {

const char* net_class_name(NetClass c) {
  switch (c) {
    case NetClass::AutonomousContinuous: return "autonomous-continuous";
    case NetClass::CCPN: return "ccpn";
    case NetClass::VCPN: return "vcpn";
    case NetClass::HybridTimed: return "hybrid-timed";
    case NetClass::DElementary: return "d-elementary";
  }
  return "?";
}

int HybridNet::place_index(const std::string& id) const {
  for (std::size_t i = 0; i < places.size(); ++i)
    if (places[i].id == id) return static_cast<int>(i);
  return -1;
}

int HybridNet::transition_index(const std::string& id) const {
  for (std::size_t j = 0; j < transitions.size(); ++j)
    if (transitions[j].id == id) return static_cast<int>(j);
  return -1;
}

static std::vector<int> indices_of_kind(const auto& nodes, NodeKind k) {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind == k) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> HybridNet::continuous_places() const {
  return indices_of_kind(places, NodeKind::Continuous);
}
std::vector<int> HybridNet::discrete_places() const {
  return indices_of_kind(places, NodeKind::Discrete);
}
std::vector<int> HybridNet::continuous_transitions() const {
  return indices_of_kind(transitions, NodeKind::Continuous);
}
std::vector<int> HybridNet::discrete_transitions() const {
  return indices_of_kind(transitions, NodeKind::Discrete);
}

std::vector<std::vector<Rat>> HybridNet::incidence_matrix() const {
  std::vector<std::vector<Rat>> w(num_places(), std::vector<Rat>(num_transitions()));
  for (std::size_t i = 0; i < num_places(); ++i)
    for (std::size_t j = 0; j < num_transitions(); ++j)
      w[i][j] = post[i][j] - pre[i][j];
  return w;
}

std::vector<int> HybridNet::input_places(int tj) const {
  if (tj < 0 || tj >= static_cast<int>(num_transitions()))
    throw std::out_of_range("unknown transition index");
  std::vector<int> out;
  for (std::size_t i = 0; i < num_places(); ++i)
    if (pre[i][tj] > 0) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> HybridNet::output_places(int tj) const {
  if (tj < 0 || tj >= static_cast<int>(num_transitions()))
    throw std::out_of_range("unknown transition index");
  std::vector<int> out;
  for (std::size_t i = 0; i < num_places(); ++i)
    if (post[i][tj] > 0) out.push_back(static_cast<int>(i));
  return out;
}

bool HybridNet::purely_continuous() const {
  for (const auto& p : places)
    if (p.kind == NodeKind::Discrete) return false;
  for (const auto& t : transitions)
    if (t.kind == NodeKind::Discrete) return false;
  return true;
}

bool structurally_equal(const HybridNet& a, const HybridNet& b) {
  if (a.net_class != b.net_class) return false;
  if (a.places.size() != b.places.size()) return false;
  if (a.transitions.size() != b.transitions.size()) return false;
  for (std::size_t i = 0; i < a.places.size(); ++i)
    if (a.places[i].id != b.places[i].id || a.places[i].kind != b.places[i].kind)
      return false;
  for (std::size_t j = 0; j < a.transitions.size(); ++j) {
    const auto& x = a.transitions[j];
    const auto& y = b.transitions[j];
    if (x.id != y.id || x.kind != y.kind) return false;
    if (x.kind == NodeKind::Continuous && x.max_speed != y.max_speed) return false;
    if (x.duration != y.duration) return false;
    if (x.interval.has_value() != y.interval.has_value()) return false;
    if (x.interval && (x.interval->lo != y.interval->lo || x.interval->hi != y.interval->hi))
      return false;
  }
  if (a.pre != b.pre || a.post != b.post) return false;
  return a.initial_marking == b.initial_marking;
}

}  // namespace hpn
