#include "hpn/hybrid.hpp"

#include <algorithm>
#include <deque>

namespace hpn {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::ContinuousZero: return "continuous-zero";
    case EventKind::DiscreteFire: return "discrete-fire";
    case EventKind::EnableChange: return "enable-change";
  }
  return "?";
}

bool d_enabled(const HybridNet& net, const Marking& m, int tj) {
  for (int i : net.input_places(tj))
    if (m[i] < net.pre[i][tj]) return false;
  return true;
}

Marking fire_discrete(const HybridNet& net, const Marking& m, int tj) {
  Marking out = m;
  for (std::size_t i = 0; i < net.num_places(); ++i) {
    out[i] += net.post[i][tj] - net.pre[i][tj];
    if (out[i] < 0)
      throw FiringUnderflow("firing " + net.transitions[tj].id +
                            " drives place " + net.places[i].id + " negative");
  }
  return out;
}

std::vector<bool> active_configuration(const HybridNet& net, const Marking& m) {
  std::vector<bool> active(net.num_transitions(), false);
  for (std::size_t j = 0; j < net.num_transitions(); ++j) {
    if (net.transitions[j].kind != NodeKind::Continuous) continue;
    bool ok = true;
    for (std::size_t i = 0; i < net.num_places(); ++i) {
      if (net.places[i].kind != NodeKind::Discrete) continue;
      if (net.pre[i][j] > 0 && m[i] < net.pre[i][j]) {
        ok = false;
        break;
      }
    }
    active[j] = ok;
  }
  return active;
}

ExtRat select_firing_time(const FiringPolicy& policy, const Interval& iv,
                          const Rat& enabled_since, const Rat& horizon,
                          std::mt19937_64* rng,
                          const std::optional<Rat>& script_time) {
  switch (policy.kind) {
    case PolicyKind::Earliest:
      return enabled_since + iv.lo;
    case PolicyKind::Latest:
      if (!iv.hi) return std::nullopt;
      return enabled_since + *iv.hi;
    case PolicyKind::UniformRandom: {
      Rat a = enabled_since + iv.lo;
      Rat b = iv.hi ? enabled_since + *iv.hi : horizon;
      if (b < a) return a;  // window past the horizon; fires beyond it
      const std::uint64_t u = (*rng)() >> 34;  // 30 bits
      return a + (b - a) * Rat(u, std::uint64_t{1} << 30);
    }
    case PolicyKind::Scripted:
      if (script_time) return *script_time;
      // Unscripted transitions still obey urgency at a finite beta.
      if (iv.hi) return enabled_since + *iv.hi;
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

struct ScriptCursor {
  std::vector<std::deque<Rat>> pending;  // indexed by transition

  ScriptCursor(const HybridNet& net, const FiringPolicy& policy) {
    pending.resize(net.num_transitions());
    for (const auto& [id, time] : policy.script) {
      int tj = net.transition_index(id);
      if (tj < 0) throw ScriptViolation("script names unknown transition " + id);
      pending[tj].push_back(time);
    }
  }
  std::optional<Rat> peek(int tj) const {
    if (pending[tj].empty()) return std::nullopt;
    return pending[tj].front();
  }
  void consume(int tj) {
    if (!pending[tj].empty()) pending[tj].pop_front();
  }
};

struct Timer {
  std::optional<Rat> enabled_since;
  ExtRat scheduled;  // absolute firing time, nullopt = never
};

}  // namespace

HybridResult simulate_hybrid(const HybridNet& net, const Rat& horizon,
                             const FiringPolicy& policy,
                             const HybridSimConfig& cfg) {
  HybridResult res;
  Marking m = net.initial_marking;
  Rat t(0);
  std::mt19937_64 rng(policy.seed);
  ScriptCursor script(net, policy);
  const auto dtrans = net.discrete_transitions();

  std::vector<Timer> timers(net.num_transitions());
  auto schedule = [&](int tj, const Rat& es) {
    timers[tj].enabled_since = es;
    timers[tj].scheduled = select_firing_time(
        policy, net.transitions[tj].timing(), es, horizon,
        policy.kind == PolicyKind::UniformRandom ? &rng : nullptr,
        policy.kind == PolicyKind::Scripted ? script.peek(tj) : std::nullopt);
  };

  // Sign vector over continuous places is explicit state: a place keeps a
  // positive sign at marking zero while its balance is non-negative. This
  // matches the location semantics of the translated hybrid automaton.
  const auto cplaces = net.continuous_places();
  SignVector sign = ccpn::stable_sign(
      net, ccpn::macro_marking(net, net.initial_marking),
      active_configuration(net, net.initial_marking));

  // Continuous dynamics under the current sign/configuration.
  auto phase_derivative = [&](const Marking& mk) {
    auto active = active_configuration(net, mk);
    auto v = ccpn::compute_speeds(net, sign, active);
    return ccpn::marking_derivative(net, v);
  };

  // Enabling that holds on a right-neighborhood of now: a continuous
  // input sitting exactly on its threshold with negative derivative
  // counts as disabled.
  auto enabled_forward = [&](int tj, const Marking& mk,
                             const std::vector<Rat>& deriv) {
    for (int i : net.input_places(tj)) {
      if (mk[i] < net.pre[i][tj]) return false;
      if (net.places[i].kind == NodeKind::Continuous && mk[i] == net.pre[i][tj] &&
          deriv[i] < 0)
        return false;
    }
    return true;
  };

  // Timer/log sync after any state change. fired[tj] forces a clock
  // restart (single-server semantics).
  auto resync = [&](const std::vector<bool>& fired) {
    auto deriv = phase_derivative(m);
    for (int tj : dtrans) {
      bool now_en = enabled_forward(tj, m, deriv);
      bool was_en = timers[tj].enabled_since.has_value();
      if (now_en && (!was_en || fired[tj])) {
        schedule(tj, t);
      } else if (!now_en && was_en) {
        timers[tj] = Timer{};
      }
      if (now_en != was_en)
        res.log.events.push_back({t, EventKind::EnableChange,
                                  (now_en ? "+" : "-") + net.transitions[tj].id,
                                  m});
    }
  };

  res.trajectory.emplace_back(t, m);
  {
    // Baseline enablement at t = 0; timers start silently.
    auto deriv = phase_derivative(m);
    for (int tj : dtrans)
      if (enabled_forward(tj, m, deriv)) schedule(tj, t);
  }

  for (;;) {
    if (static_cast<long>(res.log.events.size()) > cfg.max_events)
      throw ZenoSuspect("more than " + std::to_string(cfg.max_events) +
                        " events before the horizon");

    auto deriv = phase_derivative(m);
    // Earliest instant a positive-signed place reaches zero (can be now,
    // right after a configuration change).
    ZeroEvent zero;
    for (std::size_t k = 0; k < cplaces.size(); ++k) {
      int i = cplaces[k];
      if (!sign[k] || deriv[i] >= 0) continue;
      Rat dt = m[i] / -deriv[i];
      if (!zero.dt || dt < *zero.dt) {
        zero.dt = dt;
        zero.places.assign(1, i);
      } else if (dt == *zero.dt) {
        zero.places.push_back(i);
      }
    }
    ExtRat zero_time;
    if (zero.dt) zero_time = t + *zero.dt;

    ExtRat t_next = horizon;
    t_next = ext_min(t_next, zero_time);

    // Threshold crossings that flip a discrete transition's enabling
    // (timed nets with continuous input places).
    for (int tj : dtrans) {
      for (int i : net.input_places(tj)) {
        if (net.places[i].kind != NodeKind::Continuous) continue;
        const Rat& w = net.pre[i][tj];
        const Rat& d = deriv[i];
        if (m[i] < w && d > 0)
          t_next = ext_min(t_next, t + (w - m[i]) / d);
        else if (m[i] > w && d < 0)
          t_next = ext_min(t_next, t + (m[i] - w) / -d);
      }
    }
    for (int tj : dtrans)
      if (timers[tj].enabled_since && timers[tj].scheduled)
        t_next = ext_min(t_next, timers[tj].scheduled);

    Rat tn = *t_next;
    if (tn < t) tn = t;  // late scripted entries surface as ScriptViolation

    // Advance the continuous part.
    if (tn > t) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += deriv[i] * (tn - t);
      t = tn;
      res.trajectory.emplace_back(t, m);
    }

    bool progressed = false;
    // Zero events land before discrete firings at the same instant. All
    // simultaneous places drop together, then the sign closes.
    if (zero_time && *zero_time == t) {
      progressed = true;
      for (int i : zero.places) {
        m[i] = 0;  // exact already; keep the representation canonical
        for (std::size_t k = 0; k < cplaces.size(); ++k)
          if (cplaces[k] == i) sign[k] = false;
        res.log.events.push_back(
            {t, EventKind::ContinuousZero, net.places[i].id, m});
      }
      sign = ccpn::stable_sign(net, sign, active_configuration(net, m));
      res.trajectory.back().second = m;
    }

    // At most one discrete firing per pass; simultaneous firings resolve
    // in declaration order across passes, with timers resynced between.
    std::vector<bool> fired(net.num_transitions(), false);
    for (int tj : dtrans) {
      if (!timers[tj].enabled_since || !timers[tj].scheduled) continue;
      if (*timers[tj].scheduled > t) continue;
      if (!d_enabled(net, m, tj)) continue;  // knocked out at this instant
      const Rat es = *timers[tj].enabled_since;
      const Interval iv = net.transitions[tj].timing();
      const Rat elapsed = t - es;
      if (elapsed < iv.lo || (iv.hi && elapsed > *iv.hi)) {
        if (policy.kind == PolicyKind::Scripted)
          throw ScriptViolation("scripted time for " + net.transitions[tj].id +
                                " at t=" + to_frac_string(t) +
                                " falls outside its interval (enabled at " +
                                to_frac_string(es) + ")");
        throw std::logic_error("scheduled firing left its interval");
      }
      m = fire_discrete(net, m, tj);
      if (policy.kind == PolicyKind::Scripted) script.consume(tj);
      fired[tj] = true;
      res.log.events.push_back(
          {t, EventKind::DiscreteFire, net.transitions[tj].id, m});
      res.trajectory.emplace_back(t, m);
      sign = ccpn::stable_sign(net, sign, active_configuration(net, m));
      progressed = true;
      break;
    }

    resync(fired);

    if (t == horizon && !progressed) break;
  }

  if (res.trajectory.back().first < horizon)
    res.trajectory.emplace_back(horizon, m);
  return res;
}

HybridNet degenerate_intervals(const HybridNet& net) {
  HybridNet out = net;
  out.net_class = NetClass::DElementary;
  for (auto& tr : out.transitions) {
    if (tr.kind == NodeKind::Discrete && tr.duration) {
      tr.interval = Interval{*tr.duration, *tr.duration};
      tr.duration.reset();
    }
  }
  return out;
}

}  // namespace hpn
