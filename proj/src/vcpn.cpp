#include "hpn/vcpn.hpp"

#include <algorithm>
#include <cmath>

namespace hpn::vcpn {

namespace {

std::vector<double> as_doubles(const Marking& m) {
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = to_double(m[i]);
  return out;
}

std::vector<double> derivative(const HybridNet& net, const std::vector<double>& m) {
  auto v = speeds(net, m);
  std::vector<double> d(net.num_places(), 0.0);
  for (std::size_t i = 0; i < net.num_places(); ++i)
    for (std::size_t j = 0; j < net.num_transitions(); ++j)
      if (v[j] != 0.0)
        d[i] += to_double(net.post[i][j] - net.pre[i][j]) * v[j];
  return d;
}

std::vector<double> rk4_step(const HybridNet& net, const std::vector<double>& y,
                             double h) {
  const std::size_t n = y.size();
  auto k1 = derivative(net, y);
  std::vector<double> tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  auto k2 = derivative(net, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  auto k3 = derivative(net, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  auto k4 = derivative(net, tmp);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

std::string event_text(const HybridNet& net, const Region& from, const Region& to) {
  std::string s;
  for (std::size_t j = 0; j < net.num_transitions(); ++j) {
    if (from.argmin[j] != to.argmin[j]) {
      if (!s.empty()) s += "; ";
      s += "argmin " + net.transitions[j].id + ": " +
           (from.argmin[j] < 0 ? "source" : net.places[from.argmin[j]].id) +
           " -> " + (to.argmin[j] < 0 ? "source" : net.places[to.argmin[j]].id);
    } else if (from.clamped[j] != to.clamped[j]) {
      if (!s.empty()) s += "; ";
      s += (to.clamped[j] ? "clamp " : "unclamp ") + net.transitions[j].id;
    }
  }
  return s.empty() ? "region change" : s;
}

}  // namespace

std::vector<double> speeds(const HybridNet& net, const std::vector<double>& m) {
  std::vector<double> v(net.num_transitions(), 0.0);
  for (std::size_t j = 0; j < net.num_transitions(); ++j) {
    const auto& t = net.transitions[j];
    if (t.kind != NodeKind::Continuous) continue;
    double lo = 1.0;
    bool have_input = false;
    for (std::size_t i = 0; i < net.num_places(); ++i) {
      if (net.places[i].kind != NodeKind::Continuous) continue;
      if (net.pre[i][j] <= 0) continue;
      double mi = m[i];
      if (!have_input || mi < lo) lo = mi;
      have_input = true;
    }
    double vj = to_double(t.max_speed) * (have_input ? std::max(0.0, lo) : 1.0);
    v[j] = vj;
  }
  return v;
}

Region region_of(const HybridNet& net, const std::vector<double>& m) {
  const std::size_t np = net.num_places();
  const std::size_t nt = net.num_transitions();
  Region r;
  r.argmin.assign(nt, -1);
  r.clamped.assign(nt, false);
  r.A.assign(np, std::vector<double>(np, 0.0));
  r.b.assign(np, 0.0);

  for (std::size_t j = 0; j < nt; ++j) {
    const auto& t = net.transitions[j];
    if (t.kind != NodeKind::Continuous) continue;
    int arg = -1;
    for (std::size_t i = 0; i < np; ++i) {
      if (net.places[i].kind != NodeKind::Continuous || net.pre[i][j] <= 0)
        continue;
      if (arg < 0 || m[i] < m[arg]) arg = static_cast<int>(i);
    }
    r.argmin[j] = arg;
    if (arg >= 0 && m[arg] < 0) r.clamped[j] = true;

    const double vmax = to_double(t.max_speed);
    for (std::size_t i = 0; i < np; ++i) {
      double w = to_double(net.post[i][j] - net.pre[i][j]);
      if (w == 0.0) continue;
      if (arg < 0)
        r.b[i] += w * vmax;
      else if (!r.clamped[j])
        r.A[i][arg] += w * vmax;
    }
  }
  return r;
}

SimResult simulate(const HybridNet& net, double horizon, const Tolerances& tol) {
  SimResult res;
  std::vector<double> y = as_doubles(net.initial_marking);
  const double max_step = tol.max_step > 0 ? tol.max_step : horizon / 1000.0;
  const double min_step = std::max(1e-300, horizon * 1e-14);

  auto emit = [&](double t, const std::vector<double>& m) {
    std::vector<double> clamped = m;
    for (auto& x : clamped) x = std::max(0.0, x);
    res.breakpoints.emplace_back(t, std::move(clamped));
  };

  double t = 0.0;
  double h = max_step;
  emit(t, y);
  Region region = region_of(net, y);

  while (t < horizon) {
    h = std::min({h, max_step, horizon - t});
    // Step doubling: two half steps vs one full step, 4th order base.
    std::vector<double> full = rk4_step(net, y, h);
    std::vector<double> half = rk4_step(net, rk4_step(net, y, h / 2), h / 2);
    double err = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      err = std::max(err, std::abs(half[i] - full[i]) / 15.0);
      scale = std::max(scale, std::abs(y[i]));
    }
    const double step_tol = tol.rel_tol * scale * std::max(h / horizon, 1e-6);
    if (err > step_tol && h > min_step) {
      h /= 2;
      if (h <= min_step)
        throw StepUnderflow("step size underflow during error control");
      continue;
    }
    std::vector<double> y_next(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      y_next[i] = half[i] + (half[i] - full[i]) / 15.0;  // 5th order accept

    Region next_region = region_of(net, y_next);
    if (!next_region.same_cell(region)) {
      // Localize the switch in [t, t+h] by bisection.
      double lo = 0.0, hi = h;
      while (hi - lo > tol.event_tol) {
        double mid = 0.5 * (lo + hi);
        auto ym = rk4_step(net, y, mid);
        if (region_of(net, ym).same_cell(region))
          lo = mid;
        else
          hi = mid;
      }
      auto y_ev = rk4_step(net, y, hi);
      Region after = region_of(net, y_ev);
      if (res.events.size() > 100000)
        throw StepUnderflow("cannot separate region-switch events at event_tol");
      res.events.emplace_back(t + hi, event_text(net, region, after));
      t += hi;
      y = std::move(y_ev);
      emit(t, y);
      region = std::move(after);
      h = max_step;
      continue;
    }

    t += h;
    y = std::move(y_next);
    emit(t, y);
    if (err < step_tol / 16.0) h *= 2.0;
  }
  return res;
}

}  // namespace hpn::vcpn
