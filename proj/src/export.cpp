#include "hpn/export.hpp"

#include "json.hpp"

#include <sstream>

namespace hpn {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kHaSchemaVersion = 1;

std::string csv_row(const Rat& t, const Marking& m) {
  std::string row = to_decimal_string(t);
  for (const auto& x : m) row += "," + to_decimal_string(x);
  return row + "\n";
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

json rat_list(const std::vector<Rat>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_frac_string(x));
  return out;
}

std::vector<Rat> rats_from(const json& a) {
  std::vector<Rat> out;
  for (const auto& x : a) out.push_back(rat_from_string(x.get<std::string>()));
  return out;
}

const char* op_name(Constraint::Op op) {
  switch (op) {
    case Constraint::Ge: return ">=";
    case Constraint::Le: return "<=";
    case Constraint::Eq: return "==";
  }
  return "?";
}

Constraint::Op op_from(const std::string& s) {
  if (s == ">=") return Constraint::Ge;
  if (s == "<=") return Constraint::Le;
  if (s == "==") return Constraint::Eq;
  throw std::runtime_error("unknown constraint operator " + s);
}

std::string constraint_text(const HybridAutomaton& ha, const Constraint& c) {
  return ha.vars[c.var].name + op_name(c.op) + to_decimal_string(c.bound);
}

std::string sign_text(const SignVector& s) {
  std::string out;
  for (bool b : s) out += b ? '1' : '0';
  return out;
}

}  // namespace

std::string trajectory_csv(const std::vector<std::string>& columns,
                           const Trajectory& traj) {
  std::string out = "time";
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  for (const auto& [t, m] : traj) out += csv_row(t, m);
  return out;
}

std::string trajectory_csv(const HybridNet& net, const Trajectory& traj) {
  std::vector<std::string> cols;
  for (const auto& p : net.places) cols.push_back(p.id);
  return trajectory_csv(cols, traj);
}

std::string vcpn_csv(const HybridNet& net, const vcpn::SimResult& sim) {
  std::string out = "time";
  for (const auto& p : net.places) out += "," + p.id;
  out += "\n";
  for (const auto& [t, m] : sim.breakpoints) {
    out += to_decimal_string(t);
    for (double x : m) out += "," + to_decimal_string(x);
    out += "\n";
  }
  for (const auto& [t, text] : sim.events)
    out += "# event," + to_decimal_string(t) + "," + text + "\n";
  return out;
}

std::string event_log_csv(const std::vector<std::string>& columns,
                          const EventLog& log) {
  std::string out = "time,kind,detail";
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  for (const auto& e : log.events) {
    out += to_decimal_string(e.time);
    out += ",";
    out += event_kind_name(e.kind);
    out += "," + e.detail;
    for (const auto& x : e.snapshot) out += "," + to_decimal_string(x);
    out += "\n";
  }
  return out;
}

std::string evolution_graph_json(const HybridNet& net, const EvolutionGraph& g) {
  ordered_json doc;
  doc["format"] = "hpn-evolution-graph";
  doc["version"] = 1;
  switch (g.terminal) {
    case Terminal::SteadyState: doc["terminal"] = "steady-state"; break;
    case Terminal::HorizonReached: doc["terminal"] = "horizon"; break;
    case Terminal::Cycle: doc["terminal"] = "cycle"; break;
  }
  doc["phases"] = json::array();
  for (const auto& ph : g.phases) {
    ordered_json p;
    p["start"] = to_frac_string(ph.start_time);
    p["duration"] = ph.duration ? json(to_frac_string(*ph.duration)) : json();
    p["marking"] = rat_list(ph.start_marking);
    p["speeds"] = rat_list(ph.speeds);
    p["derivative"] = rat_list(ph.derivative);
    json ev = json::array();
    for (int i : ph.exit_places) ev.push_back(net.places[i].id);
    p["event"] = ev;
    doc["phases"].push_back(std::move(p));
  }
  return doc.dump(2) + "\n";
}

std::string evolution_graph_dot(const HybridNet& net, const EvolutionGraph& g) {
  std::string out = "digraph evolution {\n  rankdir=TB;\n  node [shape=box];\n";
  for (std::size_t k = 0; k < g.phases.size(); ++k) {
    const auto& ph = g.phases[k];
    std::string label = "m=(";
    for (std::size_t i = 0; i < ph.start_marking.size(); ++i) {
      if (i) label += ",";
      label += to_decimal_string(ph.start_marking[i]);
    }
    label += ")\\nt=" + to_decimal_string(ph.start_time);
    out += "  p" + std::to_string(k) + " [label=" + dot_quote(label) + "];\n";
  }
  for (std::size_t k = 0; k + 1 < g.phases.size(); ++k) {
    const auto& ph = g.phases[k];
    std::string label = "v=(";
    for (std::size_t j = 0; j < ph.speeds.size(); ++j) {
      if (j) label += ",";
      label += to_decimal_string(ph.speeds[j]);
    }
    label += ")";
    if (!ph.exit_places.empty()) {
      label += "\\n";
      for (std::size_t a = 0; a < ph.exit_places.size(); ++a) {
        if (a) label += ",";
        label += net.places[ph.exit_places[a]].id + "=0";
      }
    }
    out += "  p" + std::to_string(k) + " -> p" + std::to_string(k + 1) +
           " [label=" + dot_quote(label) + "];\n";
  }
  out += "}\n";
  return out;
}

std::string macro_graph_json(const HybridNet& net, const MacroGraph& g) {
  ordered_json doc;
  doc["format"] = "hpn-macro-graph";
  doc["version"] = 1;
  json places = json::array();
  for (int i : net.continuous_places()) places.push_back(net.places[i].id);
  doc["places"] = places;
  doc["nodes"] = json::array();
  for (const auto& s : g.nodes) doc["nodes"].push_back(sign_text(s));
  doc["edges"] = json::array();
  for (const auto& e : g.edges) {
    ordered_json je;
    je["from"] = e.from;
    je["to"] = e.to;
    je["transition"] = net.transitions[e.transition].id;
    doc["edges"].push_back(std::move(je));
  }
  return doc.dump(2) + "\n";
}

std::string macro_graph_dot(const HybridNet& net, const MacroGraph& g) {
  const auto cplaces = net.continuous_places();
  std::string out = "digraph macro {\n  node [shape=ellipse];\n";
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    std::string pos, zero;
    for (std::size_t a = 0; a < cplaces.size(); ++a) {
      auto& side = g.nodes[k][a] ? pos : zero;
      if (!side.empty()) side += ",";
      side += net.places[cplaces[a]].id;
    }
    std::string label = "P+={" + pos + "}\\nP0={" + zero + "}";
    out += "  n" + std::to_string(k) + " [label=" + dot_quote(label) + "];\n";
  }
  for (const auto& e : g.edges)
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) +
           " [label=" + dot_quote(net.transitions[e.transition].id) + "];\n";
  out += "}\n";
  return out;
}

std::string export_ha_json(const HybridAutomaton& ha) {
  ordered_json doc;
  doc["format"] = "hpn-ha";
  doc["version"] = kHaSchemaVersion;
  doc["variables"] = json::array();
  for (const auto& v : ha.vars) {
    ordered_json jv;
    jv["name"] = v.name;
    jv["clock"] = v.is_clock;
    doc["variables"].push_back(std::move(jv));
  }
  doc["locations"] = json::array();
  for (const auto& loc : ha.locations) {
    ordered_json jl;
    jl["id"] = loc.id;
    ordered_json flow;
    for (std::size_t k = 0; k < loc.flow.size(); ++k)
      flow[ha.vars[k].name] = to_frac_string(loc.flow[k]);
    jl["flow"] = std::move(flow);
    jl["invariant"] = json::array();
    for (const auto& c : loc.invariant) {
      ordered_json jc;
      jc["var"] = ha.vars[c.var].name;
      jc["op"] = op_name(c.op);
      jc["bound"] = to_frac_string(c.bound);
      jl["invariant"].push_back(std::move(jc));
    }
    jl["group"] = loc.group;
    jl["sign"] = sign_text(loc.sign);
    jl["d_marking"] = rat_list(loc.d_marking);
    jl["enabled"] = loc.enabled;
    doc["locations"].push_back(std::move(jl));
  }
  doc["edges"] = json::array();
  for (const auto& e : ha.edges) {
    ordered_json je;
    je["src"] = e.src;
    je["dst"] = e.dst;
    je["label"] = e.label;
    je["guard"] = json::array();
    for (const auto& c : e.guard) {
      ordered_json jc;
      jc["var"] = ha.vars[c.var].name;
      jc["op"] = op_name(c.op);
      jc["bound"] = to_frac_string(c.bound);
      je["guard"].push_back(std::move(jc));
    }
    je["resets"] = json::array();
    for (int r : e.resets) je["resets"].push_back(ha.vars[r].name);
    je["internal"] = e.internal;
    je["zero_set"] = json::array();
    for (int z : e.zero_set) je["zero_set"].push_back(ha.vars[z].name);
    doc["edges"].push_back(std::move(je));
  }
  doc["initial_location"] = ha.initial_location;
  doc["initial_valuation"] = rat_list(ha.initial_valuation);
  doc["labels"] = ha.labels;
  doc["d_place_names"] = ha.d_place_names;
  return doc.dump(2) + "\n";
}

HybridAutomaton import_ha(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad automaton document: ") + e.what());
  }
  if (doc.value("format", "") != "hpn-ha")
    throw std::runtime_error("not an hpn-ha document");
  if (doc.value("version", 0) != kHaSchemaVersion)
    throw std::runtime_error("unsupported hpn-ha version");

  HybridAutomaton ha;
  for (const auto& jv : doc.at("variables"))
    ha.vars.push_back({jv.at("name").get<std::string>(), jv.at("clock").get<bool>()});
  auto var_of = [&](const std::string& name) {
    int k = ha.var_index(name);
    if (k < 0) throw std::runtime_error("unknown variable " + name);
    return k;
  };
  auto constraint_of = [&](const json& jc) {
    return Constraint{var_of(jc.at("var").get<std::string>()),
                      op_from(jc.at("op").get<std::string>()),
                      rat_from_string(jc.at("bound").get<std::string>())};
  };
  for (const auto& jl : doc.at("locations")) {
    HaLocation loc;
    loc.id = jl.at("id").get<std::string>();
    loc.flow.resize(ha.vars.size(), Rat(0));
    for (const auto& [name, val] : jl.at("flow").items())
      loc.flow[var_of(name)] = rat_from_string(val.get<std::string>());
    for (const auto& jc : jl.at("invariant")) loc.invariant.push_back(constraint_of(jc));
    loc.group = jl.at("group").get<std::string>();
    for (char c : jl.at("sign").get<std::string>()) loc.sign.push_back(c == '1');
    loc.d_marking = rats_from(jl.at("d_marking"));
    loc.enabled = jl.at("enabled").get<std::vector<std::string>>();
    ha.locations.push_back(std::move(loc));
  }
  for (const auto& je : doc.at("edges")) {
    HaEdge e;
    e.src = je.at("src").get<int>();
    e.dst = je.at("dst").get<int>();
    if (e.src < 0 || e.src >= static_cast<int>(ha.locations.size()) || e.dst < 0 ||
        e.dst >= static_cast<int>(ha.locations.size()))
      throw std::runtime_error("edge endpoint out of range");
    e.label = je.at("label").get<std::string>();
    for (const auto& jc : je.at("guard")) e.guard.push_back(constraint_of(jc));
    for (const auto& r : je.at("resets")) e.resets.push_back(var_of(r.get<std::string>()));
    e.internal = je.at("internal").get<bool>();
    for (const auto& z : je.at("zero_set")) e.zero_set.push_back(var_of(z.get<std::string>()));
    ha.locations[e.src].out_edges.push_back(static_cast<int>(ha.edges.size()));
    ha.edges.push_back(std::move(e));
  }
  ha.initial_location = doc.at("initial_location").get<int>();
  ha.initial_valuation = rats_from(doc.at("initial_valuation"));
  ha.labels = doc.at("labels").get<std::vector<std::string>>();
  ha.d_place_names = doc.at("d_place_names").get<std::vector<std::string>>();
  return ha;
}

std::string export_ha_dot(const HybridAutomaton& ha) {
  std::string out = "digraph ha {\n  rankdir=LR;\n  node [shape=box];\n";
  for (std::size_t q = 0; q < ha.locations.size(); ++q) {
    const auto& loc = ha.locations[q];
    std::string label = loc.id;
    for (std::size_t k = 0; k < loc.flow.size(); ++k)
      label += "\\nd" + ha.vars[k].name + "/dt=" + to_decimal_string(loc.flow[k]);
    for (const auto& c : loc.invariant) label += "\\n" + constraint_text(ha, c);
    out += "  q" + std::to_string(q) + " [label=" + dot_quote(label) + "];\n";
  }
  out += "  init [shape=point];\n  init -> q" +
         std::to_string(ha.initial_location) + ";\n";
  for (const auto& e : ha.edges) {
    std::string label = e.label;
    for (const auto& c : e.guard) label += "\\n" + constraint_text(ha, c);
    if (!e.resets.empty()) {
      label += "\\n";
      for (std::size_t a = 0; a < e.resets.size(); ++a) {
        if (a) label += ",";
        label += ha.vars[e.resets[a]].name + ":=0";
      }
    }
    out += "  q" + std::to_string(e.src) + " -> q" + std::to_string(e.dst) +
           " [label=" + dot_quote(label);
    if (e.internal) out += ", style=dashed";
    out += "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace hpn
