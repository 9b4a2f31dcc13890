// Command line front end: validate / simulate / analyze / translate /
// check-equivalence over model files.

#include "CLI11.hpp"

#include "hpn/ccpn.hpp"
#include "hpn/export.hpp"
#include "hpn/ha.hpp"
#include "hpn/hybrid.hpp"
#include "hpn/parse.hpp"
#include "hpn/validate.hpp"
#include "hpn/vcpn.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hpn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SemanticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

HybridNet load_model(const std::string& path) {
  std::string text = slurp(path);
  try {
    return parse_model(text);
  } catch (const ParseError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

std::string model_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

struct PolicySpec {
  std::string text = "earliest";
  std::optional<std::uint64_t> seed;

  FiringPolicy resolve() const {
    if (text == "earliest") return FiringPolicy::earliest();
    if (text == "latest") return FiringPolicy::latest();
    if (text == "random") {
      if (!seed) throw UsageError("--policy random requires --seed");
      return FiringPolicy::random(*seed);
    }
    if (text.rfind("script=", 0) == 0) {
      std::string path = text.substr(7);
      std::istringstream in(slurp(path));
      std::vector<std::pair<std::string, Rat>> script;
      std::string id, time, line;
      int lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        if (!(ls >> id)) continue;
        if (id[0] == '#') continue;
        if (!(ls >> time))
          throw UsageError(path + ":" + std::to_string(lineno) +
                           ": expected `<transition> <time>`");
        script.emplace_back(id, rat_from_string(time));
      }
      return FiringPolicy::scripted(std::move(script));
    }
    throw UsageError("unknown policy " + text);
  }

  /// Directory-name suffix for the run.
  std::string tag() const {
    if (text.rfind("script=", 0) == 0) return "script";
    return text;
  }
};

struct Formats {
  bool csv = true, dot = true, structured = true;
};

Formats parse_formats(const std::string& list) {
  if (list.empty()) return {};
  Formats f{false, false, false};
  std::istringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "csv")
      f.csv = true;
    else if (item == "dot")
      f.dot = true;
    else if (item == "structured")
      f.structured = true;
    else
      throw UsageError("unknown format " + item);
  }
  return f;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << content;
}

Rat parse_horizon(const std::string& s) {
  Rat h;
  try {
    h = rat_from_string(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad --horizon: ") + e.what());
  }
  if (h <= 0) throw UsageError("--horizon must be positive");
  return h;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path, std::ostream& out) {
  HybridNet net = load_model(path);
  auto report = validate_structure(net);
  if (report.empty()) {
    out << path << ": ok (" << net_class_name(net.net_class) << ", "
        << net.num_places() << " places, " << net.num_transitions()
        << " transitions)\n";
    return kExitOk;
  }
  for (const auto& v : report)
    out << path << ": " << v.rule << ": " << v.message << "\n";
  return kExitSemantic;
}

int cmd_simulate(const std::string& path, const std::string& engine,
                 const std::string& horizon_text, const PolicySpec& policy,
                 const Formats& fmt, const fs::path& outdir, std::ostream& out) {
  HybridNet net = load_model(path);
  Rat horizon = parse_horizon(horizon_text);
  fs::path dir = outdir / (model_stem(path) + "-simulate-" + engine + "-" +
                           policy.tag());

  if (engine == "ccpn") {
    if (net.net_class != NetClass::CCPN)
      throw SemanticError(path + ": ccpn engine needs a constant-speed "
                          "continuous net, got " +
                          net_class_name(net.net_class));
    auto traj = ccpn::simulate(net, horizon);
    auto graph = ccpn::evolution_graph(net, horizon);
    if (fmt.csv) write_file(dir / "trajectory.csv", trajectory_csv(net, traj));
    out << path << ": " << graph.phases.size() << " phases, "
        << traj.size() << " breakpoints\n";
    return kExitOk;
  }
  if (engine == "vcpn") {
    if (net.net_class != NetClass::CCPN && net.net_class != NetClass::VCPN)
      throw SemanticError(path + ": vcpn engine needs a continuous net with "
                          "speeds, got " +
                          net_class_name(net.net_class));
    auto sim = vcpn::simulate(net, to_double(horizon));
    if (fmt.csv) write_file(dir / "trajectory.csv", vcpn_csv(net, sim));
    out << path << ": " << sim.events.size() << " region switches, "
        << sim.breakpoints.size() << " breakpoints\n";
    return kExitOk;
  }
  if (engine == "hybrid") {
    if (net.net_class != NetClass::HybridTimed &&
        net.net_class != NetClass::DElementary)
      throw SemanticError(path + ": hybrid engine needs a net with a discrete "
                          "part, got " +
                          net_class_name(net.net_class));
    auto res = simulate_hybrid(net, horizon, policy.resolve());
    std::vector<std::string> cols;
    for (const auto& p : net.places) cols.push_back(p.id);
    if (fmt.csv) {
      write_file(dir / "trajectory.csv", trajectory_csv(net, res.trajectory));
      write_file(dir / "events.csv", event_log_csv(cols, res.log));
    }
    std::size_t fires = 0;
    for (const auto& e : res.log.events)
      if (e.kind == EventKind::DiscreteFire) ++fires;
    out << path << ": " << res.log.events.size() << " events (" << fires
        << " discrete firings), " << res.trajectory.size() << " breakpoints\n";
    return kExitOk;
  }
  throw UsageError("unknown engine " + engine);
}

int cmd_analyze(const std::string& path, bool macro, bool evolution,
                const std::string& horizon_text, const Formats& fmt,
                const fs::path& outdir, std::ostream& out) {
  if (macro == evolution)
    throw UsageError("pick exactly one of --macro-graph / --evolution-graph");
  HybridNet net = load_model(path);
  fs::path dir = outdir / (model_stem(path) + "-analyze");

  if (macro) {
    if (!net.purely_continuous())
      throw SemanticError(path +
                          ": macro-graph analysis needs a purely continuous net");
    auto g = macro_reachability_graph(net);
    if (fmt.dot) write_file(dir / "macro.dot", macro_graph_dot(net, g));
    if (fmt.structured) write_file(dir / "macro.json", macro_graph_json(net, g));
    out << path << ": " << g.nodes.size() << " nodes, " << g.edges.size()
        << " edges\n";
    return kExitOk;
  }
  if (net.net_class != NetClass::CCPN)
    throw SemanticError(path + ": evolution-graph analysis needs a "
                        "constant-speed continuous net");
  ExtRat horizon;  // default: run to steady state / cycle
  if (!horizon_text.empty()) horizon = parse_horizon(horizon_text);
  auto g = ccpn::evolution_graph(net, horizon);
  if (fmt.dot) write_file(dir / "evolution.dot", evolution_graph_dot(net, g));
  if (fmt.structured)
    write_file(dir / "evolution.json", evolution_graph_json(net, g));
  out << path << ": " << g.phases.size() << " phases\n";
  return kExitOk;
}

int cmd_translate(const std::string& path, std::size_t cap, const Formats& fmt,
                  const fs::path& outdir, std::ostream& out) {
  HybridNet net = load_model(path);
  if (net.net_class != NetClass::DElementary && !net.purely_continuous())
    throw SemanticError(path + ": translation needs interval timing on every "
                        "discrete transition, got " +
                        net_class_name(net.net_class));
  if (net.purely_continuous())
    out << path << ": warning: no discrete part; emitting the sign-vector "
           "automaton of the whole net\n";
  HybridAutomaton ha;
  try {
    ha = translate(net, cap);
  } catch (const MarkingCapExceeded& e) {
    throw SemanticError(path + ": " + e.what());
  }
  fs::path dir = outdir / (model_stem(path) + "-translate");
  if (fmt.structured) write_file(dir / "ha.json", export_ha_json(ha));
  if (fmt.dot) write_file(dir / "ha.dot", export_ha_dot(ha));

  std::size_t n = 0;
  {
    std::vector<std::string> groups;
    for (const auto& loc : ha.locations)
      if (std::find(groups.begin(), groups.end(), loc.group) == groups.end())
        groups.push_back(loc.group);
    n = groups.size();
  }
  const std::size_t m = ha.num_continuous();
  out << path << ":\n";
  out << "  n " << n << "\n";
  out << "  m " << m << "\n";
  out << "  locations " << ha.locations.size() << "\n";
  out << "  bound " << (n << m) << "\n";
  return kExitOk;
}

int cmd_check_equivalence(const std::string& path,
                          const std::string& horizon_text,
                          const PolicySpec& policy, std::size_t cap,
                          const std::string& ha_path, std::ostream& out) {
  HybridNet net = load_model(path);
  if (net.net_class != NetClass::DElementary)
    throw SemanticError(path + ": equivalence check needs interval timing on "
                        "every discrete transition");
  Rat horizon = parse_horizon(horizon_text);
  HybridAutomaton ha;
  if (ha_path.empty()) {
    ha = translate(net, cap);
  } else {
    try {
      ha = import_ha(slurp(ha_path));
    } catch (const std::runtime_error& e) {
      throw SemanticError(ha_path + ": " + e.what());
    }
  }
  FiringPolicy fp = policy.resolve();
  auto hres = simulate_hybrid(net, horizon, fp);
  auto ares = simulate_ha(ha, horizon, fp);
  auto div = compare_logs(net, hres.log, ha, ares.log);
  if (!div) {
    out << path << ": equivalent (" << hres.log.events.size() << " events)\n";
    return kExitOk;
  }
  out << path << ": divergence at event " << div->index << ":\n";
  out << "  expected " << div->expected << "\n";
  out << "  got      " << div->got << "\n";
  return kExitSemantic;
}

/// Runs `work` per model, optionally in parallel, printing buffered
/// output in input order. The exit code is the worst across models.
int fan_out(const std::vector<std::string>& models, unsigned jobs,
            const std::function<int(const std::string&, std::ostream&)>& work) {
  auto run_one = [&](const std::string& path) -> std::pair<int, std::string> {
    std::ostringstream buf;
    try {
      int rc = work(path, buf);
      return {rc, buf.str()};
    } catch (const UsageError& e) {
      return {kExitUsage, buf.str() + "error: " + e.what() + "\n"};
    } catch (const SemanticError& e) {
      return {kExitSemantic, buf.str() + "error: " + e.what() + "\n"};
    } catch (const std::exception& e) {
      return {kExitSemantic, buf.str() + "error: " + e.what() + "\n"};
    }
  };

  std::vector<std::pair<int, std::string>> results(models.size());
  if (jobs <= 1 || models.size() <= 1) {
    for (std::size_t i = 0; i < models.size(); ++i) results[i] = run_one(models[i]);
  } else {
    std::vector<std::future<std::pair<int, std::string>>> futs;
    for (const auto& path : models)
      futs.push_back(std::async(std::launch::async, run_one, path));
    for (std::size_t i = 0; i < models.size(); ++i) results[i] = futs[i].get();
  }
  int rc = kExitOk;
  for (const auto& [code, text] : results) {
    (code == kExitOk ? std::cout : std::cerr) << text;
    rc = std::max(rc, code);
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid Petri net toolkit"};
  app.require_subcommand(1);

  std::vector<std::string> models;
  std::string engine = "ccpn";
  std::string horizon;
  PolicySpec policy;
  std::uint64_t seed_opt = 0;
  bool seed_given = false;
  std::size_t cap = 4096;
  std::string outdir = "out";
  std::string format_list;
  unsigned jobs = 1;
  bool macro = false, evolution = false;
  std::string ha_file;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("model", models, "model file(s)")->required();
    cmd->add_option("--jobs", jobs, "parallel workers for multiple models");
    if (needs_out) {
      cmd->add_option("--out", outdir, "output directory");
      cmd->add_option("--format", format_list, "comma list: csv,dot,structured");
    }
  };

  auto* c_validate = app.add_subcommand("validate", "structural checks");
  add_common(c_validate, false);

  auto* c_sim = app.add_subcommand("simulate", "run an engine to a horizon");
  add_common(c_sim, true);
  c_sim->add_option("--engine", engine, "ccpn | vcpn | hybrid");
  c_sim->add_option("--horizon", horizon, "simulation horizon")->required();
  c_sim->add_option("--policy", policy.text,
                    "earliest | latest | random | script=<file>");
  c_sim->add_option("--seed", seed_opt, "rng seed (random policy)")
      ->each([&](const std::string&) { seed_given = true; });

  auto* c_an = app.add_subcommand("analyze", "reachability / evolution graphs");
  add_common(c_an, true);
  c_an->add_flag("--macro-graph", macro, "macro-marking reachability graph");
  c_an->add_flag("--evolution-graph", evolution, "phase sequence graph");
  c_an->add_option("--horizon", horizon, "optional horizon cutoff");

  auto* c_tr = app.add_subcommand("translate", "emit the hybrid automaton");
  add_common(c_tr, true);
  c_tr->add_option("--cap", cap, "reachable-marking cap");

  auto* c_eq = app.add_subcommand("check-equivalence",
                                  "cross-check net vs automaton run");
  add_common(c_eq, false);
  c_eq->add_option("--horizon", horizon, "simulation horizon")->required();
  c_eq->add_option("--policy", policy.text,
                   "earliest | latest | random | script=<file>");
  c_eq->add_option("--seed", seed_opt, "rng seed (random policy)")
      ->each([&](const std::string&) { seed_given = true; });
  c_eq->add_option("--cap", cap, "reachable-marking cap");
  c_eq->add_option("--ha", ha_file, "check against this automaton file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (seed_given) policy.seed = seed_opt;

  try {
    Formats fmt = parse_formats(format_list);
    fs::path out(outdir);
    if (c_validate->parsed())
      return fan_out(models, jobs, [&](const std::string& p, std::ostream& o) {
        return cmd_validate(p, o);
      });
    if (c_sim->parsed())
      return fan_out(models, jobs, [&](const std::string& p, std::ostream& o) {
        return cmd_simulate(p, engine, horizon, policy, fmt, out, o);
      });
    if (c_an->parsed())
      return fan_out(models, jobs, [&](const std::string& p, std::ostream& o) {
        return cmd_analyze(p, macro, evolution, horizon, fmt, out, o);
      });
    if (c_tr->parsed())
      return fan_out(models, jobs, [&](const std::string& p, std::ostream& o) {
        return cmd_translate(p, cap, fmt, out, o);
      });
    if (c_eq->parsed())
      return fan_out(models, jobs, [&](const std::string& p, std::ostream& o) {
        return cmd_check_equivalence(p, horizon, policy, cap, ha_file, o);
      });
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSemantic;
  }
  return kExitUsage;
}
