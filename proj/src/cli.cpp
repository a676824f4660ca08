#include "ecodyn/cli.hpp"

#include <fstream>
#include <iostream>
#include <random>

#include "ecodyn/analysis.hpp"

namespace ecodyn {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "absent"; }

void print_thresholds(const ThresholdReport& t, std::ostream& o) {
  o << "n_threshold = " << format_double(t.n_threshold) << '\n'
    << "delta_stab = " << opt(t.delta_stab) << '\n'
    << "delta_stab_closed_form = " << opt(t.delta_stab_closed_form) << '\n'
    << "lambda_min = " << opt(t.lambda_min) << '\n'
    << "lambda_max = " << opt(t.lambda_max) << '\n'
    << "lambda_star = " << opt(t.lambda_star) << '\n'
    << "beta_star = " << format_double(t.beta_star) << '\n';
}

void print_equilibria(const std::vector<EquilibriumReport>& eqs, std::ostream& o) {
  o << "kind,H_D,F_W,H_W,stability,a2,a1,a0\n";
  for (const auto& e : eqs) {
    o << to_string(e.kind) << ',' << format_double(e.state.h_domestic) << ','
      << format_double(e.state.fauna) << ',' << format_double(e.state.h_wild) << ','
      << to_string(e.local_stability) << ',' << format_double(e.char_poly.a2) << ','
      << format_double(e.char_poly.a1) << ',' << format_double(e.char_poly.a0) << '\n';
  }
}

void write_trajectory(const Trajectory& tr, std::ostream& o) {
  switch (tr.formulation) {
    case Formulation::Full: o << "t,H_D,F_W,H_W\n"; break;
    case Formulation::Reduced: o << "t,H_D,F_W\n"; break;
    case Formulation::Compet: o << "t,h_D,f_W,h_W\n"; break;
  }
  for (std::size_t i = 0; i < tr.size(); ++i) {
    o << format_double(tr.times[i]);
    for (int k = 0; k < tr.dim; ++k) o << ',' << format_double(tr.states[i][k]);
    o << '\n';
  }
}

void write_grid(const BifurcationGrid& g, std::ostream& o) {
  o << "lambda_F,alpha,N,delta_stab,verdict\n";
  for (std::size_t ia = 0; ia < g.alpha_axis.size(); ++ia) {
    for (std::size_t il = 0; il < g.lambda_axis.size(); ++il) {
      const GridCell& c = g.at(il, ia);
      o << format_double(g.lambda_axis[il]) << ',' << format_double(g.alpha_axis[ia]) << ','
        << format_double(c.n_threshold) << ','
        << (c.delta_stab ? format_double(*c.delta_stab) : std::string("nan")) << ','
        << to_token(c.verdict) << '\n';
    }
  }
}

}  // namespace

Vec3 random_initial_state(const Params& p, Formulation f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return std::generate_canonical<double, 53>(rng); };
  const RegionBounds b = region_bounds(p);
  const double fauna = b.fauna_max * unit();
  const double h = (b.s_max - p.e() * fauna) * unit();
  StateFull s{h, fauna, f == Formulation::Reduced ? p.m() * h : b.h_wild_max * unit()};
  return project(f, s, p.m());
}

int run(const std::string& sub, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostream* o = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output, std::ios::binary);
    if (!file) {
      err << "error: cannot open output file '" << cfg.output << "'\n";
      return kExitValidation;
    }
    o = &file;
  }
  try {
    if (sub == "bifurcate") {
      require_keys(cfg, {"immigration", "human_boost"});
      BetaSpec beta;
      if (cfg.beta_factor) beta = {BetaSpec::Mode::FactorOfStar, *cfg.beta_factor};
      else beta = {BetaSpec::Mode::Fixed, cfg.model.human_boost};
      ModelParams base = effective_model(cfg);
      const BifurcationGrid g =
          bifurcation_grid(base, cfg.lambda_range.first, cfg.lambda_range.second, cfg.grid_lambda,
                           cfg.alpha_range.first, cfg.alpha_range.second, cfg.grid_alpha, beta);
      write_grid(g, *o);
      return kExitOk;
    }
    if (sub == "qssa-compare") {
      require_keys(cfg, {"hunting_rate", "anthropisation", "human_boost", "immigration"});
      ModelParams tilde = cfg.model;
      if (cfg.beta_factor) tilde.human_boost = *cfg.beta_factor * beta_star(tilde);
      const Params slow = validate(tilde);
      Vec3 init = cfg.initial_state ? *cfg.initial_state
                                    : random_initial_state(slow, Formulation::Reduced, cfg.seed);
      QssaConfig qc;
      qc.integration.rel_tol = std::min(qc.integration.rel_tol, cfg.integration.rel_tol);
      qc.integration.max_steps = cfg.integration.max_steps;
      const auto gaps = qssa_compare(tilde, cfg.eps_list, {init[0], init[1]}, cfg.horizon, qc);
      *o << "epsilon,sup_gap_HD,sup_gap_FW,sup_gap_HW\n";
      for (const auto& g : gaps) {
        *o << format_double(g.epsilon) << ',' << format_double(g.sup_gap_hd) << ','
           << format_double(g.sup_gap_fw) << ',' << format_double(g.sup_gap_hw) << '\n';
      }
      return kExitOk;
    }

    require_keys(cfg, {"hunting_rate", "anthropisation", "human_boost", "immigration"});
    const Params p = validate(effective_model(cfg));
    if (sub == "thresholds") {
      print_thresholds(thresholds(p), *o);
    } else if (sub == "equilibria") {
      print_equilibria(equilibria_all(p), *o);
    } else if (sub == "classify") {
      const OutcomeClass oc = classify(p);
      *o << "verdict = " << to_string(oc.verdict) << '\n'
         << "token = " << to_token(oc.verdict) << '\n';
      if (!oc.reason.empty()) *o << "reason = " << oc.reason << '\n';
      if (oc.closed_form_mismatch) {
        err << "warning: closed-form and Jacobian stability discriminants disagree; "
               "the Jacobian value is used\n";
      }
      print_thresholds(oc.thresholds, *o);
    } else if (sub == "simulate") {
      IntegrationConfig ic = cfg.integration;
      ic.t_end = cfg.horizon;
      const Vec3 init =
          cfg.initial_state ? *cfg.initial_state : random_initial_state(p, cfg.formulation, cfg.seed);
      const Trajectory tr = integrate(p, cfg.formulation, init, ic);
      for (const Event& e : tr.events) {
        err << "event " << to_string(e.kind) << " t = " << format_double(e.t) << '\n';
      }
      write_trajectory(tr, *o);
    } else {
      err << "error: unknown subcommand '" << sub << "'\n";
      return kExitValidation;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SignError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace ecodyn
