#include "ecodyn/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ecodyn {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::RegionExit: return "region_exit";
    case EventKind::EquilibriumCapture: return "equilibrium_capture";
    case EventKind::StepFloorHit: return "step_floor_hit";
  }
  return "?";
}

bool Trajectory::has_event(EventKind k) const { return count_events(k) > 0; }

std::size_t Trajectory::count_events(EventKind k) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [k](const Event& e) { return e.kind == k; }));
}

Vec3 Trajectory::hermite(std::size_t i, double theta) const {
  const double h = times[i + 1] - times[i];
  const double t2 = theta * theta, t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  Vec3 out{};
  for (int k = 0; k < dim; ++k) {
    out[k] = h00 * states[i][k] + h10 * h * slopes[i][k] + h01 * states[i + 1][k] +
             h11 * h * slopes[i + 1][k];
  }
  return out;
}

Vec3 Trajectory::sample(double t) const {
  if (times.empty()) throw std::logic_error("empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  return hermite(i, (t - times[i]) / (times[i + 1] - times[i]));
}

Vec3 vector_field(const Params& p, Formulation f, const Vec3& y) {
  switch (f) {
    case Formulation::Full: {
      const StateFull d = rhs_full(p, {y[0], y[1], y[2]});
      return {d.h_domestic, d.fauna, d.h_wild};
    }
    case Formulation::Reduced: {
      const StateReduced d = rhs_reduced(p, {y[0], y[1]});
      return {d.h_domestic, d.fauna, 0.0};
    }
    case Formulation::Compet: {
      const StateCompet d = rhs_compet(p, {y[0], y[1], y[2]});
      return {d.h_d, d.f_w, d.h_w};
    }
  }
  return {};
}

Vec3 project(Formulation f, const StateFull& s, double m) {
  (void)m;
  switch (f) {
    case Formulation::Full: return {s.h_domestic, s.fauna, s.h_wild};
    case Formulation::Reduced: return {s.h_domestic, s.fauna, 0.0};
    case Formulation::Compet: return {s.h_domestic, -s.fauna, -s.h_wild};
  }
  return {};
}

double distance_to(std::span<const double> s, std::span<const double> q) {
  double sum = 0.0;
  const std::size_t n = std::min(s.size(), q.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (s[i] - q[i]) / std::max(1.0, std::abs(q[i]));
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

int dimension(Formulation f) { return f == Formulation::Reduced ? 2 : 3; }

// Sign of the admissible half-line for each component (+1: >= 0, -1: <= 0).
Vec3 sign_domain(Formulation f) {
  return f == Formulation::Compet ? Vec3{1.0, -1.0, -1.0} : Vec3{1.0, 1.0, 1.0};
}

StateFull to_full(Formulation f, const Vec3& y, double m) {
  switch (f) {
    case Formulation::Full: return {y[0], y[1], y[2]};
    case Formulation::Reduced: return {y[0], y[1], m * y[0]};
    case Formulation::Compet: return {y[0], -y[1], -y[2]};
  }
  return {};
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Trajectory integrate(const Params& p, Formulation form, const Vec3& initial,
                     const IntegrationConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) || !(cfg.t_end > 0.0) || !(cfg.min_step > 0.0)) {
    throw std::invalid_argument("tolerances, t_end and min_step must be > 0");
  }
  const int n = dimension(form);
  const Vec3 sgn = sign_domain(form);
  const double m = p.m();

  Vec3 y{};
  for (int i = 0; i < n; ++i) {
    const double v = sgn[i] * initial[i];
    if (std::isnan(v) || v < -kRoundoffFloor) {
      throw SignError("initial state component " + std::to_string(i) + " outside the sign domain");
    }
    y[i] = v < 0.0 ? 0.0 : initial[i];
  }

  Trajectory tr;
  tr.formulation = form;
  tr.dim = n;

  const std::vector<EquilibriumReport> eqs = equilibria_all(p);
  std::vector<Vec3> eq_points;
  for (const auto& e : eqs) eq_points.push_back(project(form, e.state, m));
  const RegionBounds bounds = region_bounds(p);

  auto f = [&](const Vec3& x) { return vector_field(p, form, x); };

  double t = 0.0;
  Vec3 k1 = f(y);
  auto record = [&](double tt, const Vec3& yy, const Vec3& dy) {
    tr.times.push_back(tt);
    tr.states.push_back(yy);
    tr.slopes.push_back(dy);
  };
  if (cfg.record_after <= 0.0) record(t, y, k1);

  auto err_scale = [&](double a, double b) {
    return cfg.abs_tol + cfg.rel_tol * std::max(std::abs(a), std::abs(b));
  };

  // Starting step (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = err_scale(y[i], y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, cfg.t_end);
    Vec3 y1{};
    for (int i = 0; i < n; ++i) y1[i] = y[i] + h0 * k1[i];
    const Vec3 k2 = f(y1);
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) d2 = std::max(d2, std::abs(k2[i] - k1[i]) / err_scale(y[i], y[i]));
    d2 /= h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    h = std::min({100.0 * h0, h1, cfg.t_end});
    h = std::max(h, cfg.min_step);
  }

  std::size_t steps = 0;
  std::size_t since_record = 0;
  std::size_t near_count = 0;
  std::ptrdiff_t near_index = -1;
  bool captured = false;
  bool outside = false;
  bool on_floor = false;

  while (t < cfg.t_end) {
    if (++steps > cfg.max_steps) {
      throw IntegrationError("max_steps exceeded at t = " + std::to_string(t));
    }
    bool last = false;
    if (t + h >= cfg.t_end) {
      h = cfg.t_end - t;
      last = true;
    }

    Vec3 k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ys{}, yn{};
    for (int i = 0; i < n; ++i) ys[i] = y[i] + h * a21 * k1[i];
    k2 = f(ys);
    for (int i = 0; i < n; ++i) ys[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(ys);
    for (int i = 0; i < n; ++i) ys[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(ys);
    for (int i = 0; i < n; ++i)
      ys[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(ys);
    for (int i = 0; i < n; ++i)
      ys[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(ys);
    for (int i = 0; i < n; ++i)
      yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(yn);

    double err = 0.0;
    bool finite = true;
    bool sign_violation = false;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(yn[i])) finite = false;
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
      err = std::max(err, std::abs(ei) / err_scale(y[i], yn[i]));
      if (sgn[i] * yn[i] < -cfg.abs_tol) sign_violation = true;
    }
    if (!finite) err = std::numeric_limits<double>::infinity();

    const bool at_floor = h <= cfg.min_step * (1.0 + 1e-12);
    if ((err > 1.0 || sign_violation) && !(at_floor && finite)) {
      ++tr.rejected_steps;
      const double shrink = sign_violation ? 0.5 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      h = std::max(h * (std::isfinite(shrink) ? shrink : 0.2), cfg.min_step);
      continue;
    }
    if (at_floor && (err > 1.0 || sign_violation)) {
      if (!on_floor) tr.events.push_back({t, EventKind::StepFloorHit, err});
      on_floor = true;
    } else {
      on_floor = false;
    }
    if (!finite) throw IntegrationError("non-finite state at t = " + std::to_string(t));

    // Accept.
    bool clamped = false;
    for (int i = 0; i < n; ++i) {
      if (sgn[i] * yn[i] < 0.0) {
        yn[i] = 0.0;
        clamped = true;
      }
    }
    t = last ? cfg.t_end : t + h;
    y = yn;
    k1 = clamped ? f(y) : k7;
    ++tr.accepted_steps;

    // Region monitoring.
    {
      const StateFull s = to_full(form, y, m);
      const RegionCheck rc = check_region(p, bounds, s);
      double excess = rc.component_excess;
      if (form != Formulation::Reduced) excess = std::max(excess, rc.joint_excess);
      else excess = s.fauna / bounds.fauna_max - 1.0;
      const bool out = !rc.nonnegative || excess > cfg.region_tol;
      if (out && !outside) tr.events.push_back({t, EventKind::RegionExit, excess});
      outside = out;
    }

    // Equilibrium capture.
    {
      std::ptrdiff_t idx = -1;
      for (std::size_t q = 0; q < eq_points.size(); ++q) {
        if (distance_to(std::span<const double>(y.data(), n),
                        std::span<const double>(eq_points[q].data(), n)) < cfg.equilibrium_tol) {
          idx = static_cast<std::ptrdiff_t>(q);
          break;
        }
      }
      if (idx >= 0 && idx == near_index) {
        ++near_count;
      } else {
        near_index = idx;
        near_count = idx >= 0 ? 1 : 0;
        captured = false;
      }
      if (idx >= 0 && !captured && near_count >= cfg.capture_steps) {
        tr.events.push_back({t, EventKind::EquilibriumCapture, static_cast<double>(idx)});
        captured = true;
      }
    }

    const bool stop = cfg.stop_on_capture && captured;
    ++since_record;
    if (t >= cfg.record_after && (since_record >= cfg.record_stride || last || stop)) {
      record(t, y, k1);
      since_record = 0;
    }
    if (stop) break;

    if (!last) {
      const double grow =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::max(h * grow, cfg.min_step);
    }
  }
  if (tr.times.empty() || tr.times.back() != t) record(t, y, k1);
  return tr;
}

}  // namespace ecodyn
