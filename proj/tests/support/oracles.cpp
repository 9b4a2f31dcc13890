#include "oracles.hpp"

#include "hpn/parse.hpp"

#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hpn::testsup {

std::string models_dir() {
  const char* env = std::getenv("HPN_MODELS");
  if (env) return env;
  return "models";
}

HybridNet load_model(const std::string& name) {
  std::string path = models_dir() + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

Rat rand_rat(std::mt19937_64& rng, int max_num, int max_den) {
  std::uniform_int_distribution<int> num(1, max_num), den(1, max_den);
  return Rat(num(rng), den(rng));
}

namespace {

int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

void size_matrices(HybridNet& net) {
  net.pre.assign(net.places.size(), std::vector<Rat>(net.transitions.size()));
  net.post.assign(net.places.size(), std::vector<Rat>(net.transitions.size()));
}

}  // namespace

HybridNet random_autonomous_net(std::mt19937_64& rng, int max_places) {
  HybridNet net;
  net.net_class = NetClass::AutonomousContinuous;
  const int np = rand_int(rng, 1, max_places);
  const int nt = rand_int(rng, 1, max_places + 2);
  for (int i = 0; i < np; ++i) {
    net.places.push_back({"P" + std::to_string(i + 1), NodeKind::Continuous});
    net.initial_marking.push_back(Rat(rand_int(rng, 0, 3)));
  }
  for (int j = 0; j < nt; ++j)
    net.transitions.push_back({"T" + std::to_string(j + 1), NodeKind::Continuous,
                               Rat(0), {}, {}});
  size_matrices(net);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < np; ++i) {
      int roll = rand_int(rng, 0, 5);
      if (roll == 0) net.pre[i][j] = 1;
      if (roll == 1) net.post[i][j] = 1;
    }
  return net;
}

LinearNet random_one_region_net(std::mt19937_64& rng) {
  LinearNet out;
  HybridNet& net = out.net;
  net.net_class = NetClass::VCPN;
  const int np = rand_int(rng, 1, 4);
  for (int i = 0; i < np; ++i) {
    net.places.push_back({"P" + std::to_string(i + 1), NodeKind::Continuous});
    net.initial_marking.push_back(rand_rat(rng, 4, 2));
  }
  out.A.assign(np, std::vector<double>(np, 0.0));
  out.c.assign(np, 0.0);

  // One source per place keeps every marking positive, so the argmin
  // structure of the dynamics never changes.
  for (int i = 0; i < np; ++i) {
    Rat v = rand_rat(rng, 3, 2);
    net.transitions.push_back({"S" + std::to_string(i + 1), NodeKind::Continuous,
                               v, {}, {}});
    out.c[i] += to_double(v);
  }
  const int ncons = rand_int(rng, 1, np + 1);
  std::vector<std::pair<int, int>> cons;  // (src place, dst place or -1)
  for (int k = 0; k < ncons; ++k) {
    Rat v = rand_rat(rng, 2, 2);
    int src = rand_int(rng, 0, np - 1);
    int dst = rand_int(rng, -1, np - 1);  // -1 = sink
    if (dst == src) dst = -1;
    net.transitions.push_back({"C" + std::to_string(k + 1), NodeKind::Continuous,
                               v, {}, {}});
    out.A[src][src] -= to_double(v);
    if (dst >= 0) out.A[dst][src] += to_double(v);
    cons.emplace_back(src, dst);
  }
  size_matrices(net);
  for (int i = 0; i < np; ++i) net.post[i][i] = 1;  // sources
  for (int k = 0; k < ncons; ++k) {
    int j = np + k;
    net.pre[cons[k].first][j] = 1;
    if (cons[k].second >= 0) net.post[cons[k].second][j] = 1;
  }
  return out;
}

HybridNet random_delem_net(std::mt19937_64& rng, int max_cycles) {
  HybridNet net;
  net.net_class = NetClass::DElementary;
  const int np = rand_int(rng, 1, 3);
  for (int i = 0; i < np; ++i) {
    net.places.push_back({"P" + std::to_string(i + 1), NodeKind::Continuous});
    net.initial_marking.push_back(Rat(rand_int(rng, 0, 6)));
  }
  struct Arc {
    int p, t;
    bool into_place;
  };
  std::vector<Arc> arcs;
  // Source and drain per place, plus occasional cross-feeds.
  for (int i = 0; i < np; ++i) {
    int js = static_cast<int>(net.transitions.size());
    net.transitions.push_back({"Tin" + std::to_string(i + 1),
                               NodeKind::Continuous, rand_rat(rng, 6, 2), {}, {}});
    arcs.push_back({i, js, true});
    int jd = static_cast<int>(net.transitions.size());
    net.transitions.push_back({"Tout" + std::to_string(i + 1),
                               NodeKind::Continuous, rand_rat(rng, 6, 2), {}, {}});
    arcs.push_back({i, jd, false});
    if (np > 1 && rand_int(rng, 0, 1) == 0) {
      int other = (i + 1 + rand_int(rng, 0, np - 2)) % np;
      arcs.push_back({other, jd, true});  // drain feeds another tank
    }
  }
  const int nctrans = static_cast<int>(net.transitions.size());

  // At least one valve keeps the inferred class d-elementary.
  const int ncycles = rand_int(rng, 1, max_cycles);
  std::vector<std::pair<int, int>> valve_places;  // (on, off) place indices
  for (int k = 0; k < ncycles; ++k) {
    int on = static_cast<int>(net.places.size());
    net.places.push_back({"On" + std::to_string(k + 1), NodeKind::Discrete});
    net.initial_marking.push_back(Rat(rand_int(rng, 0, 1)));
    int off = static_cast<int>(net.places.size());
    net.places.push_back({"Off" + std::to_string(k + 1), NodeKind::Discrete});
    net.initial_marking.push_back(net.initial_marking[on] == 0 ? Rat(1) : Rat(0));
    valve_places.emplace_back(on, off);

    Rat a(rand_int(rng, 0, 3));
    Interval close_iv{a, rand_int(rng, 0, 2) == 0
                             ? ExtRat{}
                             : ExtRat(a + Rat(rand_int(rng, 0, 4)))};
    int jc = static_cast<int>(net.transitions.size());
    net.transitions.push_back({"stop" + std::to_string(k + 1), NodeKind::Discrete,
                               Rat(0), {}, close_iv});
    arcs.push_back({on, jc, false});
    arcs.push_back({off, jc, true});

    // Reopening takes at least one time unit, which keeps every cycle's
    // period positive (no Zeno runs).
    Rat c(rand_int(rng, 1, 4));
    Interval open_iv{c, ExtRat(c + Rat(rand_int(rng, 0, 3)))};
    int jo = static_cast<int>(net.transitions.size());
    net.transitions.push_back({"go" + std::to_string(k + 1), NodeKind::Discrete,
                               Rat(0), {}, open_iv});
    arcs.push_back({off, jo, false});
    arcs.push_back({on, jo, true});
  }
  size_matrices(net);
  for (const auto& a : arcs)
    (a.into_place ? net.post : net.pre)[a.p][a.t] = 1;

  // Each valve gates one continuous transition through a loop arc.
  for (int k = 0; k < ncycles; ++k) {
    int j = rand_int(rng, 0, nctrans - 1);
    net.pre[valve_places[k].first][j] = 1;
    net.post[valve_places[k].first][j] = 1;
  }
  return net;
}

HybridNet random_timed_net(std::mt19937_64& rng, int max_cycles) {
  HybridNet net = random_delem_net(rng, max_cycles);
  net.net_class = NetClass::HybridTimed;
  for (auto& t : net.transitions) {
    if (t.kind != NodeKind::Discrete) continue;
    Rat lo = t.interval->lo;
    if (lo == 0) lo = Rat(1, 2);  // durations stay positive
    t.interval.reset();
    t.duration = lo;
  }
  return net;
}

std::set<SignVector> macro_nodes_oracle(const HybridNet& net) {
  const auto cplaces = net.continuous_places();
  const std::size_t n = cplaces.size();
  auto slot_of = [&](int place) {
    for (std::size_t k = 0; k < n; ++k)
      if (cplaces[k] == place) return static_cast<int>(k);
    return -1;
  };

  SignVector init;
  for (int i : cplaces) init.push_back(net.initial_marking[i] > 0);

  std::set<SignVector> seen{init};
  std::deque<SignVector> queue{init};
  while (!queue.empty()) {
    SignVector cur = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < net.num_transitions(); ++j) {
      if (net.transitions[j].kind != NodeKind::Continuous) continue;
      bool fireable = true;
      std::vector<int> in_slots;
      for (std::size_t i = 0; i < net.num_places(); ++i) {
        if (net.pre[i][j] <= 0) continue;
        int s = slot_of(static_cast<int>(i));
        if (s < 0) continue;
        if (!cur[s]) fireable = false;
        in_slots.push_back(s);
      }
      if (!fireable) continue;
      // Enumerate every way the firing can leave inputs empty or not.
      for (std::size_t mask = 0; mask < (std::size_t{1} << in_slots.size());
           ++mask) {
        SignVector next = cur;
        for (std::size_t i = 0; i < net.num_places(); ++i) {
          if (net.post[i][j] <= 0) continue;
          int s = slot_of(static_cast<int>(i));
          if (s >= 0) next[s] = true;
        }
        for (std::size_t b = 0; b < in_slots.size(); ++b)
          if (mask & (std::size_t{1} << b)) next[in_slots[b]] = false;
        if (seen.insert(next).second) queue.push_back(next);
      }
    }
  }
  return seen;
}

std::vector<double> linear_ode_solution(const std::vector<std::vector<double>>& A,
                                        const std::vector<double>& c,
                                        const std::vector<double>& m0,
                                        double t) {
  const std::size_t n = m0.size();
  const std::size_t d = n + 1;  // augmented: [A c; 0 0]
  std::vector<std::vector<double>> M(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) M[i][j] = A[i][j] * t;
    M[i][n] = c[i] * t;
  }
  double norm = 0.0;
  for (const auto& row : M) {
    double s = 0.0;
    for (double x : row) s += std::abs(x);
    norm = std::max(norm, s);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (auto& row : M)
    for (double& x : row) x *= scale;

  auto matmul = [&](const std::vector<std::vector<double>>& X,
                    const std::vector<std::vector<double>>& Y) {
    std::vector<std::vector<double>> Z(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j) Z[i][j] += X[i][k] * Y[k][j];
    return Z;
  };

  std::vector<std::vector<double>> E(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) E[i][i] = 1.0;
  std::vector<std::vector<double>> term = E;
  for (int k = 1; k <= 20; ++k) {
    term = matmul(term, M);
    for (auto& row : term)
      for (double& x : row) x /= k;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) E[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) E = matmul(E, E);

  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i] += E[i][j] * m0[j];
    out[i] += E[i][n];
  }
  return out;
}

std::vector<std::pair<std::string, Rat>> record_script(const HybridNet& net,
                                                       const Rat& horizon,
                                                       std::uint64_t seed) {
  auto res = simulate_hybrid(net, horizon, FiringPolicy::random(seed));
  std::vector<std::pair<std::string, Rat>> script;
  for (const auto& e : res.log.events)
    if (e.kind == EventKind::DiscreteFire) script.emplace_back(e.detail, e.time);
  return script;
}

}  // namespace hpn::testsup
