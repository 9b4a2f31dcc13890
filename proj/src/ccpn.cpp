#include "hpn/ccpn.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace hpn {

NonConvergence::NonConvergence(std::vector<int> places)
    : std::runtime_error("speed sharing did not converge"),
      oscillating_places(std::move(places)) {}

namespace ccpn {

SignVector macro_marking(const HybridNet& net, const Marking& m) {
  SignVector sign;
  for (int i : net.continuous_places()) sign.push_back(m[i] > 0);
  return sign;
}

Enabling enabling_state(const HybridNet& net, const Marking& m, int tj) {
  for (int i : net.input_places(tj))
    if (net.places[i].kind == NodeKind::Continuous && m[i] == 0)
      return Enabling::Weak;
  return Enabling::Strong;
}

std::vector<Rat> compute_speeds(const HybridNet& net, const SignVector& sign,
                                const std::vector<bool>& active) {
  const auto cplaces = net.continuous_places();
  const auto ctrans = net.continuous_transitions();

  std::vector<Rat> v(net.num_transitions(), Rat(0));
  for (int j : ctrans)
    if (active.empty() || active[j]) v[j] = net.transitions[j].max_speed;

  std::vector<int> zero_places;
  for (std::size_t k = 0; k < cplaces.size(); ++k)
    if (!sign[k]) zero_places.push_back(cplaces[k]);
  if (zero_places.empty()) return v;

  long max_iter = static_cast<long>(ctrans.size());
  for (std::size_t k = 0; k < std::min<std::size_t>(cplaces.size(), 24); ++k)
    max_iter *= 2;
  max_iter = std::max<long>(max_iter, 16);

  for (long iter = 0; iter < max_iter; ++iter) {
    std::vector<int> scaled;
    for (int i : zero_places) {
      Rat in(0), out(0);
      for (int j : ctrans) {
        in += net.post[i][j] * v[j];
        out += net.pre[i][j] * v[j];
      }
      if (out > in) {
        Rat factor = in / out;  // out > in >= 0, so out > 0
        for (int j : ctrans)
          if (net.pre[i][j] > 0) v[j] *= factor;
        scaled.push_back(i);
      }
    }
    if (scaled.empty()) return v;
    if (iter == max_iter - 1) throw NonConvergence(scaled);
  }
  return v;  // unreachable
}

std::vector<Rat> marking_derivative(const HybridNet& net,
                                    const std::vector<Rat>& speeds) {
  std::vector<Rat> d(net.num_places(), Rat(0));
  for (std::size_t i = 0; i < net.num_places(); ++i)
    for (std::size_t j = 0; j < net.num_transitions(); ++j)
      if (speeds[j] != 0) d[i] += (net.post[i][j] - net.pre[i][j]) * speeds[j];
  return d;
}

SignVector stable_sign(const HybridNet& net, SignVector sign,
                       const std::vector<bool>& active) {
  const auto cplaces = net.continuous_places();
  for (;;) {
    auto v = compute_speeds(net, sign, active);
    auto d = marking_derivative(net, v);
    bool flipped = false;
    for (std::size_t k = 0; k < cplaces.size(); ++k) {
      if (!sign[k] && d[cplaces[k]] > 0) {
        sign[k] = true;
        flipped = true;
      }
    }
    if (!flipped) return sign;
  }
}

ZeroEvent next_zero_event(const HybridNet& net, const Marking& m,
                          const std::vector<Rat>& derivative) {
  ZeroEvent ev;
  for (int i : net.continuous_places()) {
    if (m[i] > 0 && derivative[i] < 0) {
      Rat dt = m[i] / -derivative[i];
      if (!ev.dt || dt < *ev.dt) {
        ev.dt = dt;
        ev.places.assign(1, i);
      } else if (dt == *ev.dt) {
        ev.places.push_back(i);
      }
    }
  }
  return ev;
}

EvolutionGraph evolution_graph(const HybridNet& net, const ExtRat& horizon) {
  EvolutionGraph g;
  Marking m = net.initial_marking;
  Rat t(0);
  std::vector<std::pair<SignVector, std::vector<Rat>>> seen;

  for (;;) {
    SignVector sign = stable_sign(net, macro_marking(net, m));
    auto v = compute_speeds(net, sign);
    auto d = marking_derivative(net, v);
    ZeroEvent ev = next_zero_event(net, m, d);

    ExtRat remaining;
    if (horizon) remaining = *horizon - t;
    if (remaining && ext_less(remaining, ev.dt)) {
      if (*remaining > 0)
        g.phases.push_back({v, d, t, remaining, {}, m});
      g.terminal = Terminal::HorizonReached;
      return g;
    }
    if (!ev.dt) {
      g.phases.push_back({v, d, t, {}, {}, m});
      g.terminal = Terminal::SteadyState;
      return g;
    }

    g.phases.push_back({v, d, t, ev.dt, ev.places, m});
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += d[i] * *ev.dt;
    for (int i : ev.places) m[i] = 0;  // exact by construction
    t += *ev.dt;
    if (horizon && t == *horizon) {
      g.terminal = Terminal::HorizonReached;
      return g;
    }

    auto key = std::make_pair(sign, v);
    if (!horizon) {
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
        g.terminal = Terminal::Cycle;
        return g;
      }
      seen.push_back(std::move(key));
    }
  }
}

Trajectory simulate(const HybridNet& net, const Rat& horizon) {
  EvolutionGraph g = evolution_graph(net, ExtRat(horizon));
  Trajectory traj;
  Marking m = net.initial_marking;
  traj.emplace_back(Rat(0), m);
  for (const auto& ph : g.phases) {
    Rat dur = ph.duration ? *ph.duration : horizon - ph.start_time;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += ph.derivative[i] * dur;
    for (int i : ph.exit_places)
      if (ph.duration) m[i] = 0;
    traj.emplace_back(ph.start_time + dur, m);
  }
  if (traj.back().first < horizon)  // steady state before the horizon
    traj.emplace_back(horizon, m);
  return traj;
}

Marking marking_at(const Trajectory& traj, const Rat& t) {
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    if (t >= traj[k].first && t <= traj[k + 1].first) {
      const Rat span = traj[k + 1].first - traj[k].first;
      if (span == 0) return traj[k + 1].second;
      const Rat u = (t - traj[k].first) / span;
      Marking m(traj[k].second.size());
      for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = traj[k].second[i] + (traj[k + 1].second[i] - traj[k].second[i]) * u;
      return m;
    }
  }
  return traj.back().second;
}

}  // namespace ccpn

MacroGraph macro_reachability_graph(const HybridNet& net) {
  MacroGraph g;
  const auto cplaces = net.continuous_places();
  const auto slot = [&] {
    std::vector<int> s(net.num_places(), -1);
    int k = 0;
    for (int i : cplaces) s[i] = k++;
    return s;
  }();

  SignVector init = ccpn::macro_marking(net, net.initial_marking);
  std::map<SignVector, int> index;
  index[init] = 0;
  g.nodes.push_back(init);

  for (std::size_t head = 0; head < g.nodes.size(); ++head) {
    SignVector cur = g.nodes[head];
    for (std::size_t j = 0; j < net.num_transitions(); ++j) {
      if (net.transitions[j].kind != NodeKind::Continuous) continue;
      std::vector<int> inputs;
      bool fireable = true;
      for (int i : net.input_places(static_cast<int>(j))) {
        if (slot[i] < 0) continue;
        if (!cur[slot[i]]) {
          fireable = false;
          break;
        }
        inputs.push_back(slot[i]);
      }
      if (!fireable) continue;

      SignVector base = cur;
      for (int i : net.output_places(static_cast<int>(j)))
        if (slot[i] >= 0) base[slot[i]] = true;

      // Firing may empty any subset of the input places.
      const std::size_t nsub = std::size_t{1} << inputs.size();
      for (std::size_t mask = 0; mask < nsub; ++mask) {
        SignVector succ = base;
        for (std::size_t b = 0; b < inputs.size(); ++b)
          if (mask & (std::size_t{1} << b)) succ[inputs[b]] = false;
        if (succ == cur) continue;
        auto [it, fresh] = index.try_emplace(succ, static_cast<int>(g.nodes.size()));
        if (fresh) g.nodes.push_back(succ);
        MacroGraph::Edge e{static_cast<int>(head), it->second, static_cast<int>(j)};
        bool dup = std::any_of(g.edges.begin(), g.edges.end(), [&](const auto& x) {
          return x.from == e.from && x.to == e.to && x.transition == e.transition;
        });
        if (!dup) g.edges.push_back(e);
      }
    }
  }
  return g;
}

}  // namespace hpn
