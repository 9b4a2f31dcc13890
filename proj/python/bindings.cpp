// Python surface: thin string-oriented wrappers over the C++ core.
// Models pass as grammar text, horizons/times as "p/q" strings, results
// as CSV / JSON documents.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hpn/ccpn.hpp"
#include "hpn/export.hpp"
#include "hpn/ha.hpp"
#include "hpn/hybrid.hpp"
#include "hpn/parse.hpp"
#include "hpn/validate.hpp"
#include "hpn/vcpn.hpp"

namespace py = pybind11;
using namespace hpn;

namespace {

FiringPolicy make_policy(const std::string& name, std::uint64_t seed,
                         const std::vector<std::pair<std::string, std::string>>& script) {
  if (name == "earliest") return FiringPolicy::earliest();
  if (name == "latest") return FiringPolicy::latest();
  if (name == "random") return FiringPolicy::random(seed);
  if (name == "script") {
    std::vector<std::pair<std::string, Rat>> s;
    for (const auto& [id, t] : script) s.emplace_back(id, rat_from_string(t));
    return FiringPolicy::scripted(std::move(s));
  }
  throw std::invalid_argument("unknown policy " + name);
}

}  // namespace

PYBIND11_MODULE(_hpn, mod) {
  mod.doc() = "hybrid Petri net toolkit";

  mod.def("net_class", [](const std::string& text) {
    return std::string(net_class_name(parse_model(text).net_class));
  });

  mod.def("roundtrip", [](const std::string& text) {
    return serialize_model(parse_model(text));
  });

  mod.def("validate", [](const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : validate_structure(parse_model(text)))
      out.emplace_back(v.rule, v.message);
    return out;
  });

  mod.def("simulate_ccpn_csv", [](const std::string& text, const std::string& horizon) {
    HybridNet net = parse_model(text);
    return trajectory_csv(net, ccpn::simulate(net, rat_from_string(horizon)));
  });

  mod.def("evolution_graph_json", [](const std::string& text, const std::string& horizon) {
    HybridNet net = parse_model(text);
    ExtRat h;
    if (!horizon.empty()) h = rat_from_string(horizon);
    return evolution_graph_json(net, ccpn::evolution_graph(net, h));
  }, py::arg("text"), py::arg("horizon") = "");

  mod.def("macro_graph_json", [](const std::string& text) {
    HybridNet net = parse_model(text);
    return macro_graph_json(net, macro_reachability_graph(net));
  });

  mod.def("simulate_vcpn_csv", [](const std::string& text, double horizon) {
    HybridNet net = parse_model(text);
    return vcpn_csv(net, vcpn::simulate(net, horizon));
  });

  mod.def("simulate_hybrid_csv",
          [](const std::string& text, const std::string& horizon,
             const std::string& policy, std::uint64_t seed,
             const std::vector<std::pair<std::string, std::string>>& script) {
            HybridNet net = parse_model(text);
            auto res = simulate_hybrid(net, rat_from_string(horizon),
                                       make_policy(policy, seed, script));
            std::vector<std::string> cols;
            for (const auto& p : net.places) cols.push_back(p.id);
            return std::make_pair(trajectory_csv(net, res.trajectory),
                                  event_log_csv(cols, res.log));
          },
          py::arg("text"), py::arg("horizon"), py::arg("policy") = "earliest",
          py::arg("seed") = 0,
          py::arg("script") = std::vector<std::pair<std::string, std::string>>{});

  mod.def("translate_json", [](const std::string& text, std::size_t cap) {
    return export_ha_json(translate(parse_model(text), cap));
  }, py::arg("text"), py::arg("cap") = 4096);

  mod.def("check_equivalence",
          [](const std::string& text, const std::string& horizon,
             const std::string& policy, std::uint64_t seed,
             const std::vector<std::pair<std::string, std::string>>& script)
              -> std::optional<std::string> {
            HybridNet net = parse_model(text);
            FiringPolicy fp = make_policy(policy, seed, script);
            Rat h = rat_from_string(horizon);
            HybridAutomaton ha = translate(net);
            auto hres = simulate_hybrid(net, h, fp);
            auto ares = simulate_ha(ha, h, fp);
            auto div = compare_logs(net, hres.log, ha, ares.log);
            if (!div) return std::nullopt;
            return "event " + std::to_string(div->index) + ": expected " +
                   div->expected + ", got " + div->got;
          },
          py::arg("text"), py::arg("horizon"), py::arg("policy") = "earliest",
          py::arg("seed") = 0,
          py::arg("script") = std::vector<std::pair<std::string, std::string>>{});
}
