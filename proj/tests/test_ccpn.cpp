#include "doctest.h"
#include "support/oracles.hpp"

#include "hpn/ccpn.hpp"
#include "hpn/parse.hpp"

#include <random>

using namespace hpn;
using testsup::load_model;

TEST_CASE("macro marking and enabling states") {
  HybridNet net = load_model("tanks3.hpn");
  CHECK(ccpn::macro_marking(net, net.initial_marking) ==
        SignVector{true, true, true});
  CHECK(ccpn::enabling_state(net, net.initial_marking, 2) == Enabling::Strong);
  Marking m = net.initial_marking;
  m[0] = 0;
  CHECK(ccpn::enabling_state(net, m, 2) == Enabling::Weak);
  CHECK(ccpn::enabling_state(net, m, 0) == Enabling::Strong);  // source
}

TEST_CASE("speed fixed point per macro state") {
  HybridNet net = load_model("tanks3.hpn");
  auto v = ccpn::compute_speeds(net, {true, true, true});
  CHECK(v == std::vector<Rat>{2, 5, 3, 6});
  v = ccpn::compute_speeds(net, {true, false, true});
  CHECK(v == std::vector<Rat>{2, 5, 3, 5});
  v = ccpn::compute_speeds(net, {false, false, true});
  CHECK(v == std::vector<Rat>{2, 5, 2, 5});
}

TEST_CASE("proportional sharing splits an empty place's inflow") {
  // Two drains with max speeds 3 and 1 share a single unit of inflow.
  HybridNet net = parse_model(
      "place A continuous = 0\n"
      "transition S continuous speed=1\n"
      "transition D1 continuous speed=3\n"
      "transition D2 continuous speed=1\n"
      "arc S -> A\narc A -> D1\narc A -> D2\n");
  auto v = ccpn::compute_speeds(net, {false});
  CHECK(v[1] == Rat(3, 4));
  CHECK(v[2] == Rat(1, 4));
  auto d = ccpn::marking_derivative(net, v);
  CHECK(d[0] == 0);
}

TEST_CASE("sign closure flips refilled places") {
  HybridNet net = load_model("tanks3.hpn");
  // P3 empty but fed at rate 9: closes to all-positive.
  CHECK(ccpn::stable_sign(net, {true, true, false}) ==
        SignVector{true, true, true});
  // All empty: P3 still gets net inflow (weak speeds 2,5,2,5 feed it).
  CHECK(ccpn::stable_sign(net, {false, false, false}) ==
        SignVector{false, false, true});
}

TEST_CASE("next zero event picks the earliest emptying places") {
  HybridNet net = load_model("tanks3.hpn");
  Marking m{Rat(4), Rat(2), Rat(0)};
  std::vector<Rat> d{Rat(-2), Rat(-1), Rat(5)};
  auto ev = ccpn::next_zero_event(net, m, d);
  REQUIRE(ev.dt);
  CHECK(*ev.dt == 2);
  CHECK(ev.places == std::vector<int>{0, 1});
}

TEST_CASE("evolution graph reproduces the three-tank phases") {
  HybridNet net = load_model("tanks3.hpn");
  auto g = ccpn::evolution_graph(net, ExtRat{});
  REQUIRE(g.phases.size() == 3);
  CHECK(g.terminal == Terminal::SteadyState);

  CHECK(g.phases[0].speeds == std::vector<Rat>{2, 5, 3, 6});
  CHECK(g.phases[1].speeds == std::vector<Rat>{2, 5, 3, 5});
  CHECK(g.phases[2].speeds == std::vector<Rat>{2, 5, 2, 5});
  CHECK(g.phases[0].derivative == std::vector<Rat>{-1, -1, 9});
  CHECK(g.phases[1].derivative == std::vector<Rat>{-1, 0, 8});
  CHECK(g.phases[2].derivative == std::vector<Rat>{0, 0, 7});
  CHECK(g.phases[0].duration == ExtRat(Rat(10)));
  CHECK(g.phases[1].start_time == 10);
  CHECK(g.phases[1].duration == ExtRat(Rat(15)));
  CHECK(g.phases[2].start_time == 25);
  CHECK_FALSE(g.phases[2].duration);
  CHECK(g.phases[0].exit_places == std::vector<int>{1});
  CHECK(g.phases[1].exit_places == std::vector<int>{0});
}

TEST_CASE("evolution graph horizon cut") {
  HybridNet net = load_model("tanks3.hpn");
  auto g = ccpn::evolution_graph(net, ExtRat(Rat(12)));
  REQUIRE(g.phases.size() == 2);
  CHECK(g.terminal == Terminal::HorizonReached);
  CHECK(g.phases[1].duration == ExtRat(Rat(2)));

  g = ccpn::evolution_graph(net, ExtRat(Rat(10)));
  CHECK(g.phases.size() == 1);
  CHECK(g.terminal == Terminal::HorizonReached);
}

TEST_CASE("trajectory checkpoints and interpolation") {
  HybridNet net = load_model("tanks3.hpn");
  auto traj = ccpn::simulate(net, Rat(40));
  CHECK(ccpn::marking_at(traj, Rat(10)) == Marking{15, 0, 95});
  CHECK(ccpn::marking_at(traj, Rat(25)) == Marking{0, 0, 215});
  CHECK(ccpn::marking_at(traj, Rat(40)) == Marking{0, 0, 320});
  CHECK(ccpn::marking_at(traj, Rat(5)) == Marking{20, 5, 50});
}

TEST_CASE("macro reachability graph of the autonomous net") {
  HybridNet net = load_model("tanks3_auto.hpn");
  auto g = macro_reachability_graph(net);
  CHECK(g.nodes.size() == 4);
  CHECK(g.nodes[0] == SignVector{true, true, true});

  auto oracle = testsup::macro_nodes_oracle(net);
  std::set<SignVector> got(g.nodes.begin(), g.nodes.end());
  CHECK(got == oracle);
}

TEST_CASE("macro graph agrees with the brute-force oracle on random nets") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 40; ++k) {
    HybridNet net = testsup::random_autonomous_net(rng, 8);
    auto g = macro_reachability_graph(net);
    auto oracle = testsup::macro_nodes_oracle(net);
    std::set<SignVector> got(g.nodes.begin(), g.nodes.end());
    CHECK(got == oracle);
    CHECK(g.nodes.size() <= (std::size_t{1} << net.continuous_places().size()));
  }
}

TEST_CASE("non-convergence reports oscillating places") {
  // A place that must throttle its two outputs which feed each other's
  // inputs never settles only in pathological setups; the plain split
  // below does converge, so assert convergence (regression guard).
  HybridNet net = parse_model(
      "place A continuous = 0\nplace B continuous = 0\n"
      "transition S continuous speed=1\n"
      "transition X continuous speed=2\n"
      "transition Y continuous speed=2\n"
      "arc S -> A\narc A -> X\narc X -> B\narc B -> Y\narc Y -> A\n");
  auto v = ccpn::compute_speeds(net, {false, false});
  CHECK(v[0] == 1);
  auto d = ccpn::marking_derivative(net, v);
  CHECK(d[0] >= 0);
  CHECK(d[1] >= 0);
}
