// Acceptance checks. Usage: ecodyn_acceptance [criterion...]; no argument runs
// all of them. One PASS/FAIL line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ecodyn/analysis.hpp"
#include "ecodyn/cli.hpp"
#include "support.hpp"

using namespace ecodyn;
using ecodyn::test::baseline;
using ecodyn::test::Draw;
using ecodyn::test::slow_fast_example;

namespace {

// Pinned tolerances.
constexpr double kResidualTol = 1e-9;
constexpr double kDeltaTol = 1e-8;
constexpr double kBetaStarTol = 0.01;
constexpr double kPFTol = 1e-10;
constexpr double kRegionTol = 1e-9;

struct Result {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds; 0 = none
  std::function<Result()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Residual of the full vector field, relative to the largest flux term in
// each equation.
double residual(const Params& p, const StateFull& s) {
  const double hd = s.h_domestic, f = s.fauna, hw = s.h_wild;
  const StateFull r = rhs_full(p, s);
  const double s0 = std::max({1e-300, p.immigration(), p.e() * p.lambda() * hw * f, p.net_mortality() * hd,
                              p.m_w() * hw, p.m_d() * hd});
  const double s1 = std::max({1e-300, p.growth() * (1 + p.beta() * hw) * f, p.lambda() * f * hw});
  const double s2 = std::max({1e-300, p.m_d() * hd, p.m_w() * hw});
  return std::max({std::abs(r.h_domestic) / s0, std::abs(r.fauna) / s1, std::abs(r.h_wild) / s2});
}

Result c1_residuals() {
  Draw d(1001);
  double worst = 0.0;
  std::size_t count = 0;
  for (int i = 0; i < 1000; ++i) {
    ModelParams mp = i % 2 ? d.coexistence_params() : d.any_params();
    const Params p = validate(mp);
    for (const auto& e : equilibria_all(p)) {
      worst = std::max(worst, residual(p, e.state));
      ++count;
    }
  }
  return {worst < kResidualTol, std::to_string(count) + " equilibria, worst relative residual " + fmt("%.3g", worst)};
}

Result c2_delta_oracle() {
  Draw d(1002);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Params p = validate(d.coexistence_params());
    const double closed = delta_stab(p), jac = delta_stab_jacobian(p);
    worst = std::max(worst, std::abs(closed - jac) / std::abs(jac));
  }
  return {worst < kDeltaTol, "500 draws, worst relative gap " + fmt("%.3g", worst)};
}

Result c3_lambda_star() {
  Draw d(1003);
  int used = 0, drawn = 0, mismatches = 0, main_text_mismatches = 0;
  while (used < 50) {
    ++drawn;
    ModelParams mp = d.fixed_params();
    mp.mig_to_domestic = d.log_uniform(0.01, 73.0);
    mp.mig_to_wild = d.uniform(0.17, 0.52) * mp.mig_to_domestic;
    mp.anthropisation = d.uniform(0.0, 0.95);
    mp.hunting_rate = 1.0;
    const Params q = validate(mp);
    const double ls = lambda_star(q), lm = lambda_star(q, LambdaStarVariant::DietScaledBracket);
    // Every test point must lie where the coexistence equilibrium exists.
    if (!(0.5 * ls > 1.01 * *lambda_bounds(q).lambda_min)) continue;
    ++used;
    bool main_ok = true;
    for (double k : {0.5, 0.99, 1.01, 2.0}) {
      mp.hunting_rate = k * ls;
      const double ds = delta_stab(validate(mp));
      if ((ds > 0.0) != (k < 1.0)) ++mismatches;
      if ((ds > 0.0) != (k * ls < lm)) main_ok = false;
    }
    if (!main_ok) ++main_text_mismatches;
  }
  std::ostringstream s;
  s << used << " draws (" << drawn << " drawn), quadratic-root mismatches " << mismatches
    << ", 1/e-bracket variant failing draws " << main_text_mismatches << "; selected: quadratic root";
  return {mismatches == 0, s.str()};
}

Result c4_beta_star() {
  ModelParams mp = baseline();
  const double b0 = beta_star(mp);
  mp.anthropisation = 0.99;
  const double b99 = beta_star(mp);
  const bool ok = std::abs(b0 / 1.3e-4 - 1) < kBetaStarTol && std::abs(b99 / 1.3 - 1) < kBetaStarTol;
  return {ok, "beta*(0) = " + fmt("%.6g", b0) + ", beta*(0.99) = " + fmt("%.6g", b99)};
}

Result c5_pf_identity() {
  Draw d(1005);
  double worst = 0.0, min_disc = INFINITY;
  for (int i = 0; i < 500; ++i) {
    ModelParams mp = d.any_params();
    mp.immigration = d.log_uniform(1e-3, 10.0);
    const Params p = validate(mp);
    const long double kc = (1.0L - p.alpha()) * p.k();
    worst = std::max(worst, static_cast<double>(std::abs(pf_value(p, kc) + p.immigration()) / p.immigration()));
    min_disc = std::min(min_disc, pf_roots(p).discriminant);
  }
  return {worst < kPFTol && min_disc > 0.0,
          "500 draws, worst relative error " + fmt("%.3g", worst) + ", min discriminant " + fmt("%.3g", min_disc)};
}

std::string describe(const AttractorResult& r) {
  std::string s = to_string(r.kind);
  if (r.equilibrium) s += std::string("(") + to_string(*r.equilibrium) + ")";
  if (r.cycle) s += " [period " + fmt("%.4g", r.cycle->period) + (r.cycle->converged ? "" : ", not converged") + "]";
  return s;
}

Result c6_slow_fast() {
  const Params slow = validate(slow_fast_example());
  const double n = threshold_n(slow);
  Result res;
  res.detail = "N = " + fmt("%.6g", n);
  res.pass = n > 1.0;
  const StateFull start{100.0, 3000.0, 0.0};
  struct Case {
    const char* label;
    double eps;
    AttractorKind want;
  };
  for (const Case& c : {Case{"eps=0.1", 0.1, AttractorKind::Cycle}, Case{"eps=1/365", 1.0 / 365.0, AttractorKind::Cycle},
                        Case{"eps=1e-4", 1e-4, AttractorKind::Equilibrium}}) {
    const Params p = validate(with_fast_migration(slow_fast_example(), c.eps));
    const StateFull s{start.h_domestic, start.fauna, p.m() * start.h_domestic};
    const AttractorResult r = detect_attractor(p, Formulation::Full, project(Formulation::Full, s, p.m()), 20000.0);
    const bool ok = r.kind == c.want &&
                    (c.want != AttractorKind::Equilibrium || r.equilibrium == EquilibriumKind::Coexistence);
    res.pass = res.pass && ok;
    res.detail += std::string("; ") + c.label + " -> " + describe(r) + (ok ? "" : " (expected " + std::string(to_string(c.want)) + ")");
  }
  const AttractorResult r = detect_attractor(slow, Formulation::Reduced, {start.h_domestic, start.fauna, 0.0}, 20000.0);
  const bool ok = r.kind == AttractorKind::Equilibrium && r.equilibrium == EquilibriumKind::Coexistence;
  res.pass = res.pass && ok;
  res.detail += "; reduced -> " + describe(r);
  return res;
}

Result c7_baseline_runs() {
  const Vec3 x0{100.0, 3000.0, 20.0};
  const double horizon = 60000.0;
  auto run = [&](double lambda, double imm) {
    return detect_attractor(validate(baseline(lambda, imm)), Formulation::Full, x0, horizon);
  };
  const AttractorResult a = run(0.0116, 0.0), b = run(0.01425, 0.0), c = run(0.01425, 0.1), e = run(0.01425, 1.0);
  Result res;
  auto cyc = [](const AttractorResult& r) { return r.kind == AttractorKind::Cycle; };
  res.pass = cyc(a) && cyc(b) && cyc(c) && e.kind == AttractorKind::Equilibrium &&
             e.equilibrium == EquilibriumKind::Coexistence;
  if (res.pass) {
    res.pass = b.cycle->fauna_amplitude() > a.cycle->fauna_amplitude() &&
               c.cycle->period < b.cycle->period && c.cycle->fauna_amplitude() < b.cycle->fauna_amplitude();
  }
  auto info = [&](const char* l, const AttractorResult& r) {
    std::string s = std::string(l) + " " + describe(r);
    if (r.cycle) s += " amplitude " + fmt("%.5g", r.cycle->fauna_amplitude());
    return s;
  };
  res.detail = info("I=0,l=0.0116:", a) + "; " + info("I=0,l=0.01425:", b) + "; " + info("I=0.1:", c) + "; " +
               info("I=1:", e);
  return res;
}

std::size_t coexistence_cells(const BifurcationGrid& g) {
  return static_cast<std::size_t>(std::count_if(g.cells.begin(), g.cells.end(), [](const GridCell& c) {
    return c.verdict == Verdict::CoexistenceGAS || c.verdict == Verdict::LimitCycle;
  }));
}

Result c8_bifurcation() {
  const std::size_t n = 50;
  auto grid = [&](double imm, BetaSpec b) { return bifurcation_grid(baseline(0.0, imm), 0.0005, 0.1, n, 0.0, 0.99, n, b); };
  const BifurcationGrid g0 = grid(0.0, {}), g01 = grid(0.1, {}), g1 = grid(1.0, {});
  const BifurcationGrid g1b = grid(1.0, {BetaSpec::Mode::FactorOfStar, 0.9});
  Result res;

  // (a)
  const bool a = std::none_of(g0.cells.begin(), g0.cells.end(),
                              [](const GridCell& c) { return c.verdict == Verdict::HumanOnlyGAS; });

  // (b) one frontier per scanline, bracketing lambda_max(alpha).
  bool b = true;
  for (std::size_t ia = 0; ia < n; ++ia) {
    ModelParams mp = baseline(0.01, 1.0);
    mp.anthropisation = g1.alpha_axis[ia];
    const double lmax = *lambda_bounds(validate(mp)).lambda_max;
    std::size_t switches = 0;
    bool bracketed = false;
    for (std::size_t il = 0; il + 1 < n; ++il) {
      const bool h0 = g1.at(il, ia).verdict == Verdict::HumanOnlyGAS;
      const bool h1 = g1.at(il + 1, ia).verdict == Verdict::HumanOnlyGAS;
      if (h0 != h1) {
        ++switches;
        bracketed = !h0 && g1.lambda_axis[il] <= lmax && lmax <= g1.lambda_axis[il + 1];
      }
    }
    if (switches != 1 || !bracketed) b = false;
  }

  // (c)
  const std::size_t n0 = coexistence_cells(g0), n01 = coexistence_cells(g01), n1 = coexistence_cells(g1);
  const bool c = n0 > n01 && n01 > n1;

  // (d) cells at alpha >= 0.95 with coexistence under the boost but not without.
  std::size_t gained = 0;
  for (std::size_t ia = 0; ia < n; ++ia) {
    if (g1.alpha_axis[ia] < 0.95) continue;
    for (std::size_t il = 0; il < n; ++il) {
      auto co = [](Verdict v) { return v == Verdict::CoexistenceGAS || v == Verdict::LimitCycle; };
      if (co(g1b.at(il, ia).verdict) && !co(g1.at(il, ia).verdict)) ++gained;
    }
  }
  const bool dd = gained > 0;

  res.pass = a && b && c && dd;
  std::ostringstream s;
  s << "(a) " << (a ? "ok" : "fail") << " (b) " << (b ? "ok" : "fail") << " (c) " << (c ? "ok" : "fail")
    << " coexistence cells " << n0 << " > " << n01 << " > " << n1 << " (d) " << (dd ? "ok" : "fail") << ", "
    << gained << " cells gained at alpha >= 0.95";
  res.detail = s.str();
  return res;
}

Result c9_invariant_region() {
  Draw d(1009);
  std::size_t exits = 0;
  double worst = -INFINITY;
  const double imms[] = {0.0, 0.1, 1.0};
  for (int i = 0; i < 500; ++i) {
    ModelParams mp = baseline(0.01425, imms[i % 3]);
    mp.human_boost = i % 2 ? 0.9 * beta_star(mp) : 0.0;
    const Params p = validate(mp);
    const RegionBounds rb = region_bounds(p);
    const double fw = d.uniform(0, rb.fauna_max), hd = d.uniform(0, rb.s_max - p.e() * fw);
    IntegrationConfig ic;
    ic.t_end = 200.0;
    ic.region_tol = kRegionTol;
    const Trajectory tr = integrate(p, Formulation::Full, {hd, fw, d.uniform(0, rb.h_wild_max)}, ic);
    exits += tr.count_events(EventKind::RegionExit);
    for (const Vec3& x : tr.states) {
      const RegionCheck rc = check_region(p, rb, {x[0], x[1], x[2]});
      worst = std::max({worst, rc.component_excess, rc.joint_excess});
      if (!rc.nonnegative) ++exits;
    }
  }
  return {exits == 0 && worst <= kRegionTol,
          "500 starts, exit events " + std::to_string(exits) + ", worst relative excess " + fmt("%.3g", worst)};
}

// Slowest decay rate of the reduced linearisation at `s`.
double slowest_rate(const Params& p, const StateFull& s) {
  const CharPoly c = char_poly(jacobian(p, StateReduced{s.h_domestic, s.fauna}));
  const double tr = c.trace(), det = c.det(), disc = tr * tr - 4 * det;
  if (disc < 0) return -tr / 2;
  return -(tr + std::sqrt(disc)) / 2;
}

Result c10_reduced_no_cycle() {
  Draw d(1010);
  int runs = 0, drawn = 0, equilibria = 0, cycles = 0;
  while (runs < 100) {
    ++drawn;
    ModelParams mp = drawn % 2 ? d.coexistence_params() : d.any_params();
    const Params p = validate(mp);
    const OutcomeClass oc = classify(p);
    if (oc.verdict == Verdict::Boundary || std::abs(oc.thresholds.n_threshold - 1) < 0.05) continue;
    // Attracting equilibrium of the reduced system and its decay rate fix the horizon.
    const EquilibriumKind target = oc.verdict == Verdict::FaunaOnlyGAS   ? EquilibriumKind::FaunaOnly
                                   : oc.verdict == Verdict::HumanOnlyGAS ? EquilibriumKind::HumanOnly
                                                                         : EquilibriumKind::Coexistence;
    double rate = 0.0;
    for (const auto& e : oc.equilibria) {
      if (e.kind == target) rate = slowest_rate(p, e.state);
    }
    if (!(rate > 0.0)) continue;
    const double horizon = std::max(1000.0, 80.0 / rate);
    if (horizon > 2e6) continue;
    ++runs;
    const Vec3 x0 = random_initial_state(p, Formulation::Reduced, 5000 + static_cast<std::uint64_t>(runs));
    AttractorConfig cfg;
    cfg.integration.abs_tol = 1e-12;
    const AttractorResult r = detect_attractor(p, Formulation::Reduced, x0, horizon, cfg);
    if (r.kind == AttractorKind::Equilibrium) ++equilibria;
    if (r.kind == AttractorKind::Cycle) ++cycles;
  }
  std::ostringstream s;
  s << runs << " runs (" << drawn << " drawn), equilibrium " << equilibria << ", cycle " << cycles;
  return {equilibria == runs && cycles == 0, s.str()};
}

Result c11_tikhonov() {
  const auto gaps = qssa_compare(slow_fast_example(), {1e-2, 1e-3, 1e-4}, {100.0, 3000.0}, 50.0);
  bool ok = true;
  std::ostringstream s;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    s << (i ? "; " : "") << "eps " << gaps[i].epsilon << ": " << gaps[i].sup_gap_hd << ", " << gaps[i].sup_gap_fw
      << ", " << gaps[i].sup_gap_hw;
    if (i > 0) {
      ok = ok && gaps[i].sup_gap_hd < gaps[i - 1].sup_gap_hd && gaps[i].sup_gap_fw < gaps[i - 1].sup_gap_fw &&
           gaps[i].sup_gap_hw < gaps[i - 1].sup_gap_hw;
    }
  }
  return {ok, "sup gaps (H_D, F_W, H_W) " + s.str()};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "equilibrium residuals", 5, c1_residuals},
      {2, "stability discriminant oracle", 5, c2_delta_oracle},
      {3, "lambda* sign equivalence", 0, c3_lambda_star},
      {4, "beta* values", 0, c4_beta_star},
      {5, "P_F identity", 0, c5_pf_identity},
      {6, "slow-fast example attractors", 60, c6_slow_fast},
      {7, "baseline simulations", 120, c7_baseline_runs},
      {8, "bifurcation structure", 600, c8_bifurcation},
      {9, "invariant region", 60, c9_invariant_region},
      {10, "reduced system has no cycles", 30, c10_reduced_no_cycle},
      {11, "fast-migration trend", 60, c11_tikhonov},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  for (const Criterion& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.body();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      r.pass = false;
      r.detail += "; over the " + fmt("%.0f", c.time_limit) + " s limit";
    }
    std::printf("criterion %d (%s): %s  [%.2f s]  %s\n", c.id, c.name, r.pass ? "PASS" : "FAIL", secs,
                r.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}
