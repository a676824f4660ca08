#include "ecodyn/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ecodyn {

const char* to_token(Verdict v) {
  switch (v) {
    case Verdict::FaunaOnlyGAS: return "fauna_only_gas";
    case Verdict::HumanOnlyGAS: return "human_only_gas";
    case Verdict::CoexistenceGAS: return "coexistence_gas";
    case Verdict::LimitCycle: return "limit_cycle";
    case Verdict::Boundary: return "boundary";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::FaunaOnlyGAS: return "FaunaOnlyGAS";
    case Verdict::HumanOnlyGAS: return "HumanOnlyGAS";
    case Verdict::CoexistenceGAS: return "CoexistenceGAS";
    case Verdict::LimitCycle: return "LimitCycle";
    case Verdict::Boundary: return "Boundary";
  }
  return "?";
}

const char* to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::Equilibrium: return "equilibrium";
    case AttractorKind::Cycle: return "cycle";
    case AttractorKind::Undecided: return "undecided";
  }
  return "?";
}

OutcomeClass classify(const Params& p) {
  OutcomeClass out;
  out.equilibria = equilibria_all(p);
  out.thresholds = thresholds(p);
  const double n = out.thresholds.n_threshold;
  const bool zero_imm = p.immigration() == 0.0;

  if (std::abs(n - 1.0) <= kExistenceTol * std::max(1.0, std::abs(n))) {
    out.verdict = Verdict::Boundary;
    out.reason = "N = 1 within tolerance";
    return out;
  }
  if (n < 1.0) {
    out.verdict = zero_imm ? Verdict::FaunaOnlyGAS : Verdict::HumanOnlyGAS;
    return out;
  }
  const auto it = std::find_if(out.equilibria.begin(), out.equilibria.end(), [](const auto& e) {
    return e.kind == EquilibriumKind::Coexistence;
  });
  if (it == out.equilibria.end()) {
    out.verdict = Verdict::Boundary;
    out.reason = "N > 1 but the coexistence equilibrium could not be constructed";
    return out;
  }
  if (out.thresholds.delta_stab && out.thresholds.delta_stab_closed_form) {
    const double dj = *out.thresholds.delta_stab, dc = *out.thresholds.delta_stab_closed_form;
    out.closed_form_mismatch =
        !(std::abs(dj - dc) <= kDeltaStabAgreementTol * std::max(1.0, std::abs(dj)));
  }
  const Stability s = routh_hurwitz(char_poly(jacobian(p, to_compet(it->state))));
  switch (s) {
    case Stability::LAS: out.verdict = Verdict::CoexistenceGAS; break;
    case Stability::Unstable: out.verdict = Verdict::LimitCycle; break;
    case Stability::Indeterminate:
      out.verdict = Verdict::Boundary;
      out.reason = "stability discriminant within tolerance of zero";
      break;
  }
  return out;
}

namespace {

// Root of the derivative of the Hermite cubic on [0, 1] for component k,
// given a sign change from + at 0 to <= 0 at 1.
double hermite_stationary(const Trajectory& tr, std::size_t i, int k) {
  const double h = tr.times[i + 1] - tr.times[i];
  const double y0 = tr.states[i][k], y1 = tr.states[i + 1][k];
  const double d0 = h * tr.slopes[i][k], d1 = h * tr.slopes[i + 1][k];
  const double a = 6 * y0 + 3 * d0 - 6 * y1 + 3 * d1;
  const double b = -6 * y0 - 4 * d0 + 6 * y1 - 2 * d1;
  const double c = d0;
  auto dp = [&](double x) { return (a * x + b) * x + c; };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (dp(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Trajectory in_full_coordinates(const Trajectory& tr) {
  if (tr.formulation != Formulation::Compet) return tr;
  Trajectory out = tr;
  out.formulation = Formulation::Full;
  for (auto* v : {&out.states, &out.slopes}) {
    for (Vec3& x : *v) {
      x[1] = -x[1];
      x[2] = -x[2];
    }
  }
  return out;
}

bool agree(const std::vector<double>& v, std::size_t from, double tol) {
  const auto [lo, hi] = std::minmax_element(v.begin() + static_cast<std::ptrdiff_t>(from), v.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  return scale > 0.0 && (*hi - *lo) <= tol * scale;
}

}  // namespace

void fauna_peaks(const Trajectory& raw, std::vector<double>& times, std::vector<double>& values) {
  const Trajectory tr = in_full_coordinates(raw);
  times.clear();
  values.clear();
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    if (tr.slopes[i][1] > 0.0 && tr.slopes[i + 1][1] <= 0.0) {
      const double theta = hermite_stationary(tr, i, 1);
      times.push_back(tr.times[i] + theta * (tr.times[i + 1] - tr.times[i]));
      values.push_back(tr.hermite(i, theta)[1]);
    }
  }
}

CycleInfo cycle_metrics(const Trajectory& raw, const CycleConfig& cfg) {
  const Trajectory tr = in_full_coordinates(raw);
  std::vector<double> pt, pv;
  fauna_peaks(tr, pt, pv);
  if (cfg.peaks < 2 || pt.size() < cfg.peaks) {
    throw std::runtime_error("cycle_metrics: found " + std::to_string(pt.size()) +
                             " fauna peaks, need " + std::to_string(cfg.peaks));
  }
  CycleInfo c;
  const std::size_t first = pt.size() - cfg.peaks;
  c.peak_times.assign(pt.begin() + static_cast<std::ptrdiff_t>(first), pt.end());
  c.peak_values.assign(pv.begin() + static_cast<std::ptrdiff_t>(first), pv.end());
  std::vector<double> spacing;
  for (std::size_t i = 1; i < c.peak_times.size(); ++i) {
    spacing.push_back(c.peak_times[i] - c.peak_times[i - 1]);
  }
  c.period = (c.peak_times.back() - c.peak_times.front()) / static_cast<double>(spacing.size());
  c.converged = agree(c.peak_values, 0, cfg.peak_tol) && agree(spacing, 0, cfg.peak_tol);

  // Extrema over the last full cycle, sampled densely on the interpolant.
  const double t0 = c.peak_times[c.peak_times.size() - 2], t1 = c.peak_times.back();
  for (int k = 0; k < 3; ++k) {
    c.min[k] = std::numeric_limits<double>::infinity();
    c.max[k] = -std::numeric_limits<double>::infinity();
  }
  auto absorb = [&](const Vec3& x) {
    for (int k = 0; k < 3; ++k) {
      c.min[k] = std::min(c.min[k], x[k]);
      c.max[k] = std::max(c.max[k], x[k]);
    }
  };
  absorb(tr.sample(t0));
  absorb(tr.sample(t1));
  const auto begin = std::upper_bound(tr.times.begin(), tr.times.end(), t0);
  for (auto it = begin; it != tr.times.end() && *it <= t1; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - tr.times.begin());
    absorb(tr.states[i]);
    if (i + 1 < tr.size() && tr.times[i + 1] <= t1) {
      for (int s = 1; s < 8; ++s) absorb(tr.hermite(i, s / 8.0));
    }
  }
  if (tr.dim == 2) {
    c.min[2] = c.max[2] = 0.0;
  }
  c.min_fauna = c.min[1];
  return c;
}

AttractorResult detect_attractor(const Params& p, Formulation form, const Vec3& initial,
                                 double horizon, const AttractorConfig& cfg) {
  IntegrationConfig ic = cfg.integration;
  ic.t_end = horizon;
  ic.record_after = cfg.transient_fraction * horizon;
  ic.record_stride = 1;
  AttractorResult res;
  res.trajectory = integrate(p, form, initial, ic);
  const Trajectory& tr = res.trajectory;
  const int n = tr.dim;

  const std::vector<EquilibriumReport> eqs = equilibria_all(p);
  std::vector<Vec3> pts;
  for (const auto& e : eqs) pts.push_back(project(form, e.state, p.m()));

  auto dist = [&](const Vec3& x, const Vec3& q) {
    return distance_to(std::span<const double>(x.data(), n), std::span<const double>(q.data(), n));
  };

  res.min_equilibrium_distance = std::numeric_limits<double>::infinity();
  for (const Vec3& x : tr.states) {
    for (const Vec3& q : pts) res.min_equilibrium_distance = std::min(res.min_equilibrium_distance, dist(x, q));
  }

  const double final_start = (1.0 - cfg.final_fraction) * horizon;
  for (std::size_t q = 0; q < pts.size(); ++q) {
    bool all = true;
    bool any = false;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr.times[i] < final_start) continue;
      any = true;
      if (!(dist(tr.states[i], pts[q]) < cfg.equilibrium_tol)) {
        all = false;
        break;
      }
    }
    if (any && all) {
      res.kind = AttractorKind::Equilibrium;
      res.equilibrium = eqs[q].kind;
      return res;
    }
  }

  try {
    CycleInfo c = cycle_metrics(tr, cfg.cycle);
    if (c.converged && res.min_equilibrium_distance > cfg.equilibrium_separation) {
      res.kind = AttractorKind::Cycle;
    }
    res.cycle = std::move(c);
  } catch (const std::runtime_error&) {
    // Too few peaks: stays Undecided.
  }
  return res;
}

namespace {

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ECODYN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) v.back() = hi;
  return v;
}

}  // namespace

BifurcationGrid bifurcation_grid(const ModelParams& base, double lambda_lo, double lambda_hi,
                                 std::size_t n_lambda, double alpha_lo, double alpha_hi,
                                 std::size_t n_alpha, BetaSpec beta, unsigned threads) {
  if (n_lambda < 2 || n_alpha < 2) throw std::invalid_argument("grid resolution must be >= 2 per axis");
  if (!(lambda_hi > lambda_lo) || !(alpha_hi > alpha_lo)) {
    throw std::invalid_argument("grid axes must be strictly increasing");
  }
  BifurcationGrid g;
  g.lambda_axis = linspace(lambda_lo, lambda_hi, n_lambda);
  g.alpha_axis = linspace(alpha_lo, alpha_hi, n_alpha);
  g.cells.resize(n_lambda * n_alpha);

  auto work = [&](std::size_t idx) {
    const std::size_t il = idx % n_lambda, ia = idx / n_lambda;
    GridCell& cell = g.cells[idx];
    ModelParams mp = base;
    mp.hunting_rate = g.lambda_axis[il];
    mp.anthropisation = g.alpha_axis[ia];
    mp.human_boost = beta.mode == BetaSpec::Mode::Fixed ? beta.value : beta.value * beta_star(mp);
    try {
      const OutcomeClass oc = classify(validate(mp));
      cell.verdict = oc.verdict;
      cell.n_threshold = oc.thresholds.n_threshold;
      cell.delta_stab = oc.thresholds.delta_stab;
      cell.reason = oc.reason;
    } catch (const std::exception& e) {
      cell.verdict = Verdict::Boundary;
      cell.reason = e.what();
    }
  };

  const unsigned nt = std::min<unsigned>(thread_count(threads), static_cast<unsigned>(g.cells.size()));
  if (nt <= 1) {
    for (std::size_t i = 0; i < g.cells.size(); ++i) work(i);
    return g;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < g.cells.size(); i = next++) work(i);
    });
  }
  for (auto& th : pool) th.join();
  return g;
}

std::vector<QssaGap> qssa_compare(const ModelParams& tilde, const std::vector<double>& eps,
                                  const StateReduced& initial, double t_end,
                                  const QssaConfig& cfg) {
  if (!(t_end > 0.0) || cfg.samples == 0) throw std::invalid_argument("t_end and samples must be > 0");
  const Params slow = validate(tilde);
  const double m = slow.m();
  IntegrationConfig ic = cfg.integration;
  ic.t_end = t_end;
  ic.record_stride = 1;
  ic.record_after = 0.0;
  const Trajectory red =
      integrate(slow, Formulation::Reduced, {initial.h_domestic, initial.fauna, 0.0}, ic);

  std::vector<QssaGap> out;
  for (double e : eps) {
    if (!(e > 0.0)) throw ValidationError(ValidationErrorKind::NonPositiveEpsilon, "epsilon must be > 0");
    const Params fast = validate(with_fast_migration(tilde, e));
    const Trajectory full = integrate(
        fast, Formulation::Full, {initial.h_domestic, initial.fauna, m * initial.h_domestic}, ic);
    QssaGap gap;
    gap.epsilon = e;
    for (std::size_t k = 1; k <= cfg.samples; ++k) {
      const double t = t_end * static_cast<double>(k) / static_cast<double>(cfg.samples);
      const Vec3 a = full.sample(t), b = red.sample(t);
      gap.sup_gap_hd = std::max(gap.sup_gap_hd, std::abs(a[0] - b[0]));
      gap.sup_gap_fw = std::max(gap.sup_gap_fw, std::abs(a[1] - b[1]));
      gap.sup_gap_hw = std::max(gap.sup_gap_hw, std::abs(a[2] - m * b[0]));
    }
    out.push_back(gap);
  }
  return out;
}

}  // namespace ecodyn
