#pragma once

#include "hpn/net.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace hpn::vcpn {

/// One linear region of the piecewise-linear dynamics: each transition's
/// current argmin input place is fixed, giving mdot = A*m + b.
struct Region {
  std::vector<int> argmin;    // per transition: place index, -1 for source
  std::vector<bool> clamped;  // argmin marking dipped below zero, speed held at 0
  std::vector<std::vector<double>> A;  // |P| x |P|
  std::vector<double> b;

  bool same_cell(const Region& o) const {
    return argmin == o.argmin && clamped == o.clamped;
  }
};

struct Tolerances {
  double rel_tol = 1e-9;
  double event_tol = 1e-9;
  double max_step = 0;  // 0 = horizon / 1000
};

struct SimResult {
  std::vector<std::pair<double, std::vector<double>>> breakpoints;
  std::vector<std::pair<double, std::string>> events;
};

struct StepUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// v_j = V_j * min over input places of m_i (V_j alone for source
/// transitions); negative minima clamp to zero.
std::vector<double> speeds(const HybridNet& net, const std::vector<double>& m);

/// Argmin place per transition (ties break toward the earliest declared
/// place) and the induced linear dynamics.
Region region_of(const HybridNet& net, const std::vector<double>& m);

/// Integrates mdot = W*v(m) with adaptive RK4; region switches are
/// bisected to within event_tol and reported as events.
SimResult simulate(const HybridNet& net, double horizon,
                   const Tolerances& tol = {});

}  // namespace hpn::vcpn
