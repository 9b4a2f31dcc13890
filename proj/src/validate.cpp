#include "hpn/validate.hpp"

#include <set>

namespace hpn {

std::vector<Violation> validate_structure(const HybridNet& net) {
  std::vector<Violation> report;
  auto add = [&](std::string rule, std::string msg) {
    report.push_back({std::move(rule), std::move(msg)});
  };

  std::set<std::string> seen;
  for (const auto& p : net.places)
    if (!seen.insert(p.id).second)
      add("unique-ids", "duplicate identifier '" + p.id + "'");
  for (const auto& t : net.transitions)
    if (!seen.insert(t.id).second)
      add("unique-ids", "duplicate identifier '" + t.id + "'");

  if (net.initial_marking.size() != net.num_places()) {
    add("marking-shape", "initial marking does not index the place list");
    return report;
  }
  for (std::size_t i = 0; i < net.num_places(); ++i) {
    const auto& m0 = net.initial_marking[i];
    if (m0 < 0)
      add("nonnegative-marking",
          "place " + net.places[i].id + " has negative initial marking " +
              to_frac_string(m0));
    if (net.places[i].kind == NodeKind::Discrete && denominator(m0) != 1)
      add("integer-d-marking",
          "discrete place " + net.places[i].id +
              " has non-integer initial marking " + to_frac_string(m0));
  }

  bool cls_delem = net.net_class == NetClass::DElementary;
  bool cls_timed = net.net_class == NetClass::HybridTimed;
  bool cls_cont = net.net_class == NetClass::AutonomousContinuous ||
                  net.net_class == NetClass::CCPN || net.net_class == NetClass::VCPN;

  for (std::size_t j = 0; j < net.num_transitions(); ++j) {
    const auto& t = net.transitions[j];
    if (t.kind == NodeKind::Continuous) {
      if (t.duration || t.interval)
        add("timing-kind", "continuous transition " + t.id + " carries discrete timing");
      if (t.max_speed < 0)
        add("nonnegative-speed", "transition " + t.id + " has negative speed");
    } else {
      if (cls_cont)
        add("class-discrete-node",
            "discrete transition " + t.id + " in a continuous net class");
      if (cls_delem && !t.interval)
        add("timing-kind",
            "d-elementary discrete transition " + t.id + " needs a firing interval");
      if (cls_timed && !t.duration)
        add("timing-kind",
            "timed discrete transition " + t.id + " needs a fixed duration");
      if (t.interval) {
        if (t.interval->lo < 0)
          add("interval-bounds", "transition " + t.id + " has negative alpha");
        if (t.interval->hi && *t.interval->hi < t.interval->lo)
          add("interval-bounds", "transition " + t.id + " has alpha > beta");
      }
      if (t.duration && *t.duration < 0)
        add("interval-bounds", "transition " + t.id + " has negative duration");
    }
  }
  if (cls_cont)
    for (const auto& p : net.places)
      if (p.kind == NodeKind::Discrete)
        add("class-discrete-node",
            "discrete place " + p.id + " in a continuous net class");

  if (net.pre.size() != net.num_places() || net.post.size() != net.num_places())
    return report;

  for (std::size_t i = 0; i < net.num_places(); ++i) {
    for (std::size_t j = 0; j < net.num_transitions(); ++j) {
      const Rat& w_pre = net.pre[i][j];
      const Rat& w_post = net.post[i][j];
      if (w_pre < 0 || w_post < 0)
        add("nonnegative-weight",
            "arc between " + net.places[i].id + " and " + net.transitions[j].id +
                " has negative weight");
      bool p_cont = net.places[i].kind == NodeKind::Continuous;
      bool t_cont = net.transitions[j].kind == NodeKind::Continuous;
      if (cls_delem && p_cont && !t_cont && (w_pre != 0 || w_post != 0))
        add("no-c-to-d-arc",
            "arc between C-place " + net.places[i].id + " and D-transition " +
                net.transitions[j].id +
                " (d-elementary nets forbid any C-place/D-transition arc)");
      if ((cls_delem || cls_timed) && !p_cont && t_cont && w_pre != w_post)
        add("d-c-loop",
            "D-place " + net.places[i].id + " and C-transition " +
                net.transitions[j].id + " must form a loop (pre " +
                to_frac_string(w_pre) + " != post " + to_frac_string(w_post) + ")");
    }
  }
  return report;
}

}  // namespace hpn
