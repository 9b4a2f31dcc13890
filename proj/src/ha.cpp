#include "hpn/ha.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <sstream>

namespace hpn {

int HybridAutomaton::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

std::size_t HybridAutomaton::num_continuous() const {
  std::size_t n = 0;
  for (const auto& v : vars)
    if (!v.is_clock) ++n;
  return n;
}

namespace {

std::string sign_str(const SignVector& s) {
  std::string out;
  for (bool b : s) out += b ? '1' : '0';
  return out;
}

std::string clock_name(const std::string& transition_id) {
  return "x_" + transition_id;
}

}  // namespace

TimePN extract_discrete_part(const HybridNet& net) {
  TimePN out;
  out.orig_places = net.discrete_places();
  out.orig_transitions = net.discrete_transitions();
  auto& d = out.net;
  d.net_class = net.net_class == NetClass::HybridTimed ? NetClass::HybridTimed
                                                       : NetClass::DElementary;
  for (int i : out.orig_places) d.places.push_back(net.places[i]);
  for (int j : out.orig_transitions) d.transitions.push_back(net.transitions[j]);
  d.pre.assign(d.places.size(), std::vector<Rat>(d.transitions.size()));
  d.post.assign(d.places.size(), std::vector<Rat>(d.transitions.size()));
  for (std::size_t a = 0; a < out.orig_places.size(); ++a)
    for (std::size_t b = 0; b < out.orig_transitions.size(); ++b) {
      d.pre[a][b] = net.pre[out.orig_places[a]][out.orig_transitions[b]];
      d.post[a][b] = net.post[out.orig_places[a]][out.orig_transitions[b]];
    }
  for (int i : out.orig_places) d.initial_marking.push_back(net.initial_marking[i]);
  return out;
}

HybridAutomaton timepn_to_timed_automaton(const HybridNet& tpn,
                                          std::size_t marking_cap) {
  HybridAutomaton ta;
  const std::size_t nt = tpn.num_transitions();
  for (std::size_t j = 0; j < nt; ++j) {
    ta.vars.push_back({clock_name(tpn.transitions[j].id), true});
    ta.labels.push_back(tpn.transitions[j].id);
  }
  for (const auto& p : tpn.places) ta.d_place_names.push_back(p.id);

  auto enabled_set = [&](const Marking& m) {
    std::vector<bool> en(nt, false);
    for (std::size_t j = 0; j < nt; ++j) en[j] = d_enabled(tpn, m, static_cast<int>(j));
    return en;
  };

  std::map<Marking, int> index;
  std::deque<int> queue;
  std::vector<Marking> markings;
  auto intern = [&](const Marking& m) {
    auto [it, fresh] = index.try_emplace(m, static_cast<int>(markings.size()));
    if (fresh) {
      if (markings.size() >= marking_cap)
        throw MarkingCapExceeded("time PN exceeds the marking cap of " +
                                 std::to_string(marking_cap));
      markings.push_back(m);
      HaLocation loc;
      loc.id = "S" + std::to_string(markings.size());
      loc.group = loc.id;
      loc.flow.assign(nt, Rat(1));
      loc.d_marking = m;
      auto en = enabled_set(m);
      for (std::size_t j = 0; j < nt; ++j) {
        if (!en[j]) continue;
        loc.enabled.push_back(tpn.transitions[j].id);
        Interval iv = tpn.transitions[j].timing();
        if (iv.hi)
          loc.invariant.push_back({static_cast<int>(j), Constraint::Le, *iv.hi});
      }
      ta.locations.push_back(std::move(loc));
      queue.push_back(it->second);
    }
    return it->second;
  };

  intern(tpn.initial_marking);
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    Marking m = markings[q];
    auto en = enabled_set(m);
    for (std::size_t j = 0; j < nt; ++j) {
      if (!en[j]) continue;
      Marking next = fire_discrete(tpn, m, static_cast<int>(j));
      int q2 = intern(next);
      auto en2 = enabled_set(next);
      HaEdge e;
      e.src = q;
      e.dst = q2;
      e.label = tpn.transitions[j].id;
      e.guard.push_back(
          {static_cast<int>(j), Constraint::Ge, tpn.transitions[j].timing().lo});
      for (std::size_t k = 0; k < nt; ++k)
        if (en2[k] && (k == j || !en[k])) e.resets.push_back(static_cast<int>(k));
      ta.locations[q].out_edges.push_back(static_cast<int>(ta.edges.size()));
      ta.edges.push_back(std::move(e));
    }
  }
  return ta;
}

HybridNet ccpn_configuration(const HybridNet& net, const Marking& d_marking) {
  auto active = active_configuration(net, d_marking);
  HybridNet out;
  out.net_class = NetClass::CCPN;
  std::vector<int> keep_p = net.continuous_places();
  std::vector<int> keep_t;
  for (int j : net.continuous_transitions())
    if (active[j]) keep_t.push_back(j);
  for (int i : keep_p) out.places.push_back(net.places[i]);
  for (int j : keep_t) out.transitions.push_back(net.transitions[j]);
  out.pre.assign(keep_p.size(), std::vector<Rat>(keep_t.size()));
  out.post.assign(keep_p.size(), std::vector<Rat>(keep_t.size()));
  for (std::size_t a = 0; a < keep_p.size(); ++a)
    for (std::size_t b = 0; b < keep_t.size(); ++b) {
      out.pre[a][b] = net.pre[keep_p[a]][keep_t[b]];
      out.post[a][b] = net.post[keep_p[a]][keep_t[b]];
    }
  for (int i : keep_p) out.initial_marking.push_back(net.initial_marking[i]);
  return out;
}

namespace {

// Shared builder for the sign-vector automaton of one or many
// configurations. Locations are created on demand and keyed by
// (group index, sign vector).
struct FlatBuilder {
  const HybridNet& net;
  HybridAutomaton ha;
  std::size_t ncont;
  std::vector<int> cplaces;

  // Per group: active mask and annotations.
  std::vector<std::vector<bool>> group_active;
  std::vector<std::string> group_ids;
  std::vector<Marking> group_d_marking;            // tpn order
  std::vector<std::vector<std::string>> group_enabled;
  std::vector<std::vector<Constraint>> group_clock_inv;  // flat var indices
  std::vector<std::vector<int>> group_ta_edges;    // into ta_edges
  struct TaEdgeFlat {
    int dst_group;
    std::string label;
    std::vector<Constraint> guard;   // flat var indices
    std::vector<int> resets;         // flat var indices
  };
  std::vector<TaEdgeFlat> ta_edges;

  std::map<std::pair<int, SignVector>, int> index;
  std::deque<int> queue;
  std::vector<std::pair<int, SignVector>> keys;

  explicit FlatBuilder(const HybridNet& n) : net(n), cplaces(n.continuous_places()) {
    ncont = cplaces.size();
    for (int i : cplaces) ha.vars.push_back({net.places[i].id, false});
  }

  std::vector<Rat> flow_of(int group, const SignVector& sign) const {
    auto v = ccpn::compute_speeds(net, sign, group_active[group]);
    auto d = ccpn::marking_derivative(net, v);
    std::vector<Rat> flow;
    for (int i : cplaces) flow.push_back(d[i]);
    for (std::size_t k = ncont; k < ha.vars.size(); ++k) flow.push_back(Rat(1));
    return flow;
  }

  SignVector closed(int group, SignVector s) const {
    return ccpn::stable_sign(net, std::move(s), group_active[group]);
  }

  int intern(int group, const SignVector& sign) {
    auto key = std::make_pair(group, sign);
    auto [it, fresh] = index.try_emplace(key, static_cast<int>(keys.size()));
    if (fresh) {
      keys.push_back(key);
      HaLocation loc;
      loc.group = group_ids[group];
      loc.id = loc.group.empty() ? "s" + sign_str(sign)
                                 : loc.group + "_" + sign_str(sign);
      loc.sign = sign;
      loc.d_marking = group_d_marking[group];
      loc.enabled = group_enabled[group];
      loc.flow = flow_of(group, sign);
      for (std::size_t k = 0; k < ncont; ++k)
        if (sign[k])
          loc.invariant.push_back({static_cast<int>(k), Constraint::Ge, Rat(0)});
      for (const auto& c : group_clock_inv[group]) loc.invariant.push_back(c);
      ha.locations.push_back(std::move(loc));
      queue.push_back(it->second);
    }
    return it->second;
  }

  void add_edge(int src, HaEdge e) {
    e.src = src;
    ha.locations[src].out_edges.push_back(static_cast<int>(ha.edges.size()));
    ha.edges.push_back(std::move(e));
  }

  void build_from(int group, const SignVector& init_sign) {
    ha.initial_location = intern(group, closed(group, init_sign));
    while (!queue.empty()) {
      int q = queue.front();
      queue.pop_front();
      auto [g, sign] = keys[q];
      SignVector cl = closed(g, sign);
      if (cl != sign) {
        // Entered with an inconsistent sign (after a discrete switch):
        // leave urgently for the closed location.
        HaEdge e;
        e.dst = intern(g, cl);
        e.label = "~close";
        e.internal = true;
        add_edge(q, std::move(e));
        continue;
      }
      const auto& flow = ha.locations[q].flow;
      std::vector<int> droppable;
      for (std::size_t k = 0; k < ncont; ++k)
        if (sign[k] && flow[k] < 0) droppable.push_back(static_cast<int>(k));
      // One edge per nonempty subset: simultaneous zero crossings drop
      // together before the sign closes.
      const std::size_t nsub = std::size_t{1} << droppable.size();
      for (std::size_t mask = 1; mask < nsub; ++mask) {
        SignVector s2 = sign;
        HaEdge e;
        for (std::size_t b = 0; b < droppable.size(); ++b)
          if (mask & (std::size_t{1} << b)) {
            int k = droppable[b];
            s2[k] = false;
            e.zero_set.push_back(k);
            e.guard.push_back({k, Constraint::Eq, Rat(0)});
          }
        e.dst = intern(g, closed(g, s2));
        std::string lbl;
        for (int k : e.zero_set) {
          if (!lbl.empty()) lbl += ",";
          lbl += ha.vars[k].name + "=0";
        }
        e.label = "~" + lbl;
        e.internal = true;
        add_edge(q, std::move(e));
      }
      for (int te : group_ta_edges[g]) {
        const auto& tf = ta_edges[te];
        HaEdge e;
        e.dst = intern(tf.dst_group, sign);  // sign preserved across firings
        e.label = tf.label;
        e.guard = tf.guard;
        e.resets = tf.resets;
        add_edge(q, std::move(e));
      }
    }
  }
};

}  // namespace

HybridAutomaton ccpn_to_ha(const HybridNet& ccpn) {
  FlatBuilder b(ccpn);
  b.group_active.push_back({});
  b.group_ids.push_back("");
  b.group_d_marking.push_back({});
  b.group_enabled.push_back({});
  b.group_clock_inv.push_back({});
  b.group_ta_edges.push_back({});
  // Resolve the empty active mask to "all continuous transitions".
  std::vector<bool> active(ccpn.num_transitions(), false);
  for (int j : ccpn.continuous_transitions()) active[j] = true;
  b.group_active[0] = active;

  b.build_from(0, ccpn::macro_marking(ccpn, ccpn.initial_marking));
  for (int i : ccpn.continuous_places())
    b.ha.initial_valuation.push_back(ccpn.initial_marking[i]);
  return std::move(b.ha);
}

HybridAutomaton translate(const HybridNet& net, std::size_t marking_cap) {
  TimePN tpn = extract_discrete_part(net);
  if (tpn.net.places.empty() && tpn.net.transitions.empty())
    return ccpn_to_ha(net);  // degenerate: nothing discrete to isolate

  HybridAutomaton ta = timepn_to_timed_automaton(tpn.net, marking_cap);
  if (net.continuous_places().empty() && net.continuous_transitions().empty())
    return ta;  // degenerate: the timed automaton is the whole model

  FlatBuilder b(net);
  const std::size_t ngroups = ta.locations.size();
  const std::size_t nclocks = ta.vars.size();
  for (const auto& v : ta.vars) b.ha.vars.push_back(v);
  b.ha.labels = ta.labels;
  b.ha.d_place_names = ta.d_place_names;

  auto reindex = [&](const std::vector<Constraint>& cs) {
    std::vector<Constraint> out = cs;
    for (auto& c : out) c.var += static_cast<int>(b.ncont);
    return out;
  };

  for (std::size_t g = 0; g < ngroups; ++g) {
    const auto& loc = ta.locations[g];
    // Full-size marking with the discrete entries of this group; only
    // D-places matter for the gating.
    Marking full(net.num_places(), Rat(0));
    for (std::size_t a = 0; a < tpn.orig_places.size(); ++a)
      full[tpn.orig_places[a]] = loc.d_marking[a];
    b.group_active.push_back(active_configuration(net, full));
    b.group_ids.push_back(loc.id);
    b.group_d_marking.push_back(loc.d_marking);
    b.group_enabled.push_back(loc.enabled);
    b.group_clock_inv.push_back(reindex(loc.invariant));
    b.group_ta_edges.push_back({});
  }
  for (const auto& e : ta.edges) {
    FlatBuilder::TaEdgeFlat tf;
    tf.dst_group = e.dst;
    tf.label = e.label;
    tf.guard = reindex(e.guard);
    for (int r : e.resets) tf.resets.push_back(r + static_cast<int>(b.ncont));
    b.group_ta_edges[e.src].push_back(static_cast<int>(b.ta_edges.size()));
    b.ta_edges.push_back(std::move(tf));
  }

  b.build_from(0, ccpn::macro_marking(net, net.initial_marking));
  for (int i : net.continuous_places())
    b.ha.initial_valuation.push_back(net.initial_marking[i]);
  for (std::size_t k = 0; k < nclocks; ++k)
    b.ha.initial_valuation.push_back(Rat(0));
  return std::move(b.ha);
}

// ---------------------------------------------------------------------------
// Simulation of translated automata.

namespace {

struct LabelCursor {
  std::map<std::string, std::deque<Rat>> pending;
  LabelCursor(const FiringPolicy& policy) {
    for (const auto& [id, time] : policy.script) pending[id].push_back(time);
  }
  std::optional<Rat> peek(const std::string& label) const {
    auto it = pending.find(label);
    if (it == pending.end() || it->second.empty()) return std::nullopt;
    return it->second.front();
  }
  void consume(const std::string& label) {
    auto it = pending.find(label);
    if (it != pending.end() && !it->second.empty()) it->second.pop_front();
  }
};

}  // namespace

HaSimResult simulate_ha(const HybridAutomaton& ha, const Rat& horizon,
                        const FiringPolicy& policy, const HybridSimConfig& cfg) {
  HaSimResult res;
  const std::size_t ncont = ha.num_continuous();
  std::mt19937_64 rng(policy.seed);
  LabelCursor script(policy);

  int loc = ha.initial_location;
  std::vector<Rat> val = ha.initial_valuation;
  val.resize(ha.vars.size(), Rat(0));
  Rat t(0);

  auto cvals = [&] {
    return Marking(val.begin(), val.begin() + ncont);
  };
  auto snapshot = [&] {
    Marking s = cvals();
    for (const auto& x : ha.locations[loc].d_marking) s.push_back(x);
    return s;
  };
  auto is_enabled = [&](const std::string& label) {
    const auto& en = ha.locations[loc].enabled;
    return std::find(en.begin(), en.end(), label) != en.end();
  };
  auto labeled_edge = [&](const std::string& label) -> const HaEdge* {
    for (int ei : ha.locations[loc].out_edges)
      if (!ha.edges[ei].internal && ha.edges[ei].label == label)
        return &ha.edges[ei];
    return nullptr;
  };
  auto clock_of = [&](const std::string& label) {
    return ha.var_index(clock_name(label));
  };
  // [alpha, beta] of an enabled label, read off the guard and invariant.
  auto interval_of = [&](const std::string& label) {
    Interval iv{Rat(0), std::nullopt};
    int clk = clock_of(label);
    if (const HaEdge* e = labeled_edge(label))
      for (const auto& c : e->guard)
        if (c.var == clk && c.op == Constraint::Ge) iv.lo = c.bound;
    for (const auto& c : ha.locations[loc].invariant)
      if (c.var == clk && c.op == Constraint::Le) iv.hi = c.bound;
    return iv;
  };

  std::map<std::string, ExtRat> scheduled;
  std::map<std::string, Rat> enabled_since;
  auto schedule = [&](const std::string& label) {
    int clk = clock_of(label);
    Rat es = clk >= 0 ? t - val[clk] : t;
    enabled_since[label] = es;
    scheduled[label] = select_firing_time(
        policy, interval_of(label), es, horizon,
        policy.kind == PolicyKind::UniformRandom ? &rng : nullptr,
        policy.kind == PolicyKind::Scripted ? script.peek(label) : std::nullopt);
  };

  auto follow_internal_close = [&] {
    for (;;) {
      bool moved = false;
      for (int ei : ha.locations[loc].out_edges) {
        const auto& e = ha.edges[ei];
        if (e.internal && e.zero_set.empty()) {
          loc = e.dst;
          moved = true;
          break;
        }
      }
      if (!moved) return;
    }
  };

  // Enable/disable bookkeeping in label declaration order; `fired` forces
  // a clock restart for the transition that just fired.
  auto resync = [&](const std::string& fired) {
    for (const auto& label : ha.labels) {
      bool now_en = is_enabled(label);
      bool was_en = enabled_since.count(label) > 0;
      if (now_en && (!was_en || label == fired)) {
        schedule(label);
      } else if (!now_en && was_en) {
        enabled_since.erase(label);
        scheduled.erase(label);
      }
      if (now_en != was_en)
        res.log.events.push_back(
            {t, EventKind::EnableChange, (now_en ? "+" : "-") + label, snapshot()});
    }
  };

  follow_internal_close();
  res.trajectory.emplace_back(t, cvals());
  for (const auto& label : ha.labels)
    if (is_enabled(label)) schedule(label);

  for (;;) {
    if (static_cast<long>(res.log.events.size()) > cfg.max_events)
      throw ZenoSuspect("more than " + std::to_string(cfg.max_events) +
                        " events before the horizon");

    const auto& flow = ha.locations[loc].flow;
    const auto& sign = ha.locations[loc].sign;

    ExtRat zero_time;
    std::vector<int> zero_vars;
    for (std::size_t k = 0; k < ncont; ++k) {
      if (k >= sign.size() || !sign[k] || flow[k] >= 0) continue;
      Rat dt = val[k] / -flow[k];
      Rat at = t + dt;
      if (!zero_time || at < *zero_time) {
        zero_time = at;
        zero_vars.assign(1, static_cast<int>(k));
      } else if (at == *zero_time) {
        zero_vars.push_back(static_cast<int>(k));
      }
    }

    ExtRat t_next = horizon;
    t_next = ext_min(t_next, zero_time);
    for (const auto& label : ha.labels) {
      auto it = scheduled.find(label);
      if (it != scheduled.end() && it->second) t_next = ext_min(t_next, it->second);
    }
    Rat tn = *t_next;
    if (tn < t) tn = t;

    if (tn > t) {
      for (std::size_t k = 0; k < val.size(); ++k) val[k] += flow[k] * (tn - t);
      t = tn;
      res.trajectory.emplace_back(t, cvals());
    }

    bool progressed = false;
    if (zero_time && *zero_time == t) {
      progressed = true;
      // Take the zero edge whose drop set matches exactly.
      const HaEdge* edge = nullptr;
      for (int ei : ha.locations[loc].out_edges) {
        const auto& e = ha.edges[ei];
        if (e.internal && e.zero_set == zero_vars) {
          edge = &e;
          break;
        }
      }
      if (!edge) throw std::logic_error("missing zero edge in translated HA");
      int dst = edge->dst;
      for (int k : zero_vars) val[k] = 0;
      loc = dst;
      for (int k : zero_vars)
        res.log.events.push_back(
            {t, EventKind::ContinuousZero, ha.vars[k].name, snapshot()});
      res.trajectory.back().second = cvals();
    }

    std::string fired;
    for (const auto& label : ha.labels) {
      auto es_it = enabled_since.find(label);
      auto sc_it = scheduled.find(label);
      if (es_it == enabled_since.end() || sc_it == scheduled.end() ||
          !sc_it->second || *sc_it->second > t)
        continue;
      if (!is_enabled(label)) continue;
      const Interval iv = interval_of(label);
      const Rat elapsed = t - es_it->second;
      if (elapsed < iv.lo || (iv.hi && elapsed > *iv.hi)) {
        if (policy.kind == PolicyKind::Scripted)
          throw ScriptViolation("scripted time for " + label + " at t=" +
                                to_frac_string(t) + " falls outside its interval");
        throw std::logic_error("scheduled firing left its interval");
      }
      const HaEdge* e = labeled_edge(label);
      if (!e) throw std::logic_error("enabled label without an edge");
      for (int r : e->resets) val[r] = 0;
      loc = e->dst;
      follow_internal_close();
      if (policy.kind == PolicyKind::Scripted) script.consume(label);
      res.log.events.push_back({t, EventKind::DiscreteFire, label, snapshot()});
      res.trajectory.emplace_back(t, cvals());
      fired = label;
      progressed = true;
      break;
    }

    resync(fired);
    if (t == horizon && !progressed) break;
  }

  if (res.trajectory.back().first < horizon)
    res.trajectory.emplace_back(horizon, cvals());
  return res;
}

std::optional<LogDivergence> compare_logs(const HybridNet& net,
                                          const EventLog& hybrid_log,
                                          const HybridAutomaton& ha,
                                          const EventLog& ha_log) {
  auto hybrid_map = [&](const Marking& m) {
    std::map<std::string, Rat> out;
    for (std::size_t i = 0; i < net.num_places(); ++i) out[net.places[i].id] = m[i];
    return out;
  };
  auto ha_map = [&](const Marking& m) {
    std::map<std::string, Rat> out;
    std::size_t k = 0;
    for (const auto& v : ha.vars)
      if (!v.is_clock) out[v.name] = m[k++];
    for (const auto& d : ha.d_place_names) out[d] = m[k++];
    return out;
  };
  auto describe = [](const Event& e) {
    return to_frac_string(e.time) + " " + std::string(event_kind_name(e.kind)) +
           " " + e.detail;
  };

  const std::size_t n = std::min(hybrid_log.events.size(), ha_log.events.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Event& a = hybrid_log.events[i];
    const Event& b = ha_log.events[i];
    if (a.time != b.time || a.kind != b.kind || a.detail != b.detail)
      return LogDivergence{i, describe(a), describe(b)};
    auto ma = hybrid_map(a.snapshot);
    auto mb = ha_map(b.snapshot);
    for (const auto& [id, value] : mb) {
      auto it = ma.find(id);
      if (it != ma.end() && it->second != value)
        return LogDivergence{i, id + "=" + to_frac_string(it->second),
                             id + "=" + to_frac_string(value)};
    }
  }
  if (hybrid_log.events.size() != ha_log.events.size()) {
    std::size_t i = n;
    std::string a = i < hybrid_log.events.size()
                        ? describe(hybrid_log.events[i])
                        : "(end of log)";
    std::string b =
        i < ha_log.events.size() ? describe(ha_log.events[i]) : "(end of log)";
    return LogDivergence{i, a, b};
  }
  return std::nullopt;
}

}  // namespace hpn
