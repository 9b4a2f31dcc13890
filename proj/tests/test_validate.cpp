#include "doctest.h"
#include "support/oracles.hpp"

#include "hpn/parse.hpp"
#include "hpn/validate.hpp"

#include <algorithm>

using namespace hpn;
using testsup::load_model;

namespace {

bool has_rule(const std::vector<Violation>& report, const std::string& rule) {
  return std::any_of(report.begin(), report.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

}  // namespace

TEST_CASE("fixtures are clean") {
  for (const char* name : {"tanks3.hpn", "tanks3_auto.hpn", "tanks3_delem.hpn",
                           "tanks3_thresholds.hpn", "onetank.hpn"}) {
    auto report = validate_structure(load_model(name));
    CHECK_MESSAGE(report.empty(), name);
  }
}

TEST_CASE("continuous input arc into a discrete transition of an interval net") {
  HybridNet net = load_model("tanks3_delem.hpn");
  net.pre[net.place_index("P1")][net.transition_index("close1")] = 1;
  CHECK(has_rule(validate_structure(net), "no-c-to-d-arc"));
}

TEST_CASE("unmatched loop between a discrete place and a continuous transition") {
  HybridNet net = load_model("tanks3_delem.hpn");
  net.post[net.place_index("Open1")][net.transition_index("T1")] = 0;
  CHECK(has_rule(validate_structure(net), "d-c-loop"));
}

TEST_CASE("negative initial marking") {
  HybridNet net = load_model("tanks3.hpn");
  net.initial_marking[1] = Rat(-1);
  CHECK(has_rule(validate_structure(net), "nonnegative-marking"));
}

TEST_CASE("fractional marking on a discrete place") {
  HybridNet net = load_model("tanks3_delem.hpn");
  net.initial_marking[net.place_index("Open1")] = Rat(1, 2);
  CHECK(has_rule(validate_structure(net), "integer-d-marking"));
}

TEST_CASE("marking shape and duplicate ids") {
  HybridNet net = load_model("tanks3.hpn");
  net.initial_marking.push_back(Rat(1));
  CHECK(has_rule(validate_structure(net), "marking-shape"));

  net = load_model("tanks3.hpn");
  net.places[1].id = "P1";
  CHECK(has_rule(validate_structure(net), "unique-ids"));
}

TEST_CASE("timing fields must match the transition kind") {
  HybridNet net = load_model("tanks3_delem.hpn");
  net.transitions[0].duration = Rat(1);  // continuous transition
  CHECK(has_rule(validate_structure(net), "timing-kind"));

  net = load_model("tanks3_delem.hpn");
  net.transitions[net.transition_index("close1")].interval.reset();
  CHECK(has_rule(validate_structure(net), "timing-kind"));
}

TEST_CASE("negative speeds, weights, and reversed intervals") {
  HybridNet net = load_model("tanks3.hpn");
  net.transitions[0].max_speed = Rat(-2);
  CHECK(has_rule(validate_structure(net), "nonnegative-speed"));

  net = load_model("tanks3.hpn");
  net.pre[0][2] = Rat(-1);
  CHECK(has_rule(validate_structure(net), "nonnegative-weight"));

  net = load_model("tanks3_delem.hpn");
  net.transitions[net.transition_index("open1")].interval = Interval{Rat(5), Rat(3)};
  CHECK(has_rule(validate_structure(net), "interval-bounds"));
}

TEST_CASE("random generated nets validate clean") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 30; ++k) {
    CHECK(validate_structure(testsup::random_delem_net(rng)).empty());
    CHECK(validate_structure(testsup::random_timed_net(rng)).empty());
    CHECK(validate_structure(testsup::random_autonomous_net(rng, 10)).empty());
  }
}
