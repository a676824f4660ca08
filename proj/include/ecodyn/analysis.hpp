// Long-term classification, numerical attractor detection, bifurcation sweeps
// and the fast-migration (QSSA) comparison.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecodyn/equilibria.hpp"
#include "ecodyn/integrate.hpp"
#include "ecodyn/model.hpp"

namespace ecodyn {

enum class Verdict { FaunaOnlyGAS, HumanOnlyGAS, CoexistenceGAS, LimitCycle, Boundary };

/// Stable lowercase token used in CSV output ("fauna_only_gas", ...).
const char* to_token(Verdict v);
const char* to_string(Verdict v);

struct OutcomeClass {
  Verdict verdict = Verdict::Boundary;
  ThresholdReport thresholds;
  std::vector<EquilibriumReport> equilibria;
  std::string reason;  // why the verdict is Boundary, if it is
  /// Closed-form and Jacobian stability discriminants disagree beyond 1e-8.
  bool closed_form_mismatch = false;
};

inline constexpr double kDeltaStabAgreementTol = 1e-8;

OutcomeClass classify(const Params& p);

struct CycleInfo {
  double period = 0.0;
  Vec3 min{};  // per variable over the last cycle, full-system coordinates
  Vec3 max{};
  double min_fauna = 0.0;
  bool converged = false;
  std::vector<double> peak_times;
  std::vector<double> peak_values;

  double fauna_amplitude() const { return max[1] - min[1]; }
};

struct CycleConfig {
  std::size_t peaks = 8;
  double peak_tol = 1e-3;
};

/// Local maxima of F_W, located on the Hermite interpolant.
void fauna_peaks(const Trajectory& tr, std::vector<double>& times, std::vector<double>& values);

/// Throws std::runtime_error if fewer than cfg.peaks maxima are present.
CycleInfo cycle_metrics(const Trajectory& tr, const CycleConfig& cfg = {});

struct AttractorConfig {
  double transient_fraction = 0.5;
  double final_fraction = 0.1;
  double equilibrium_tol = 1e-6;
  /// A cycle must stay at least this far (distance_to) from every equilibrium.
  double equilibrium_separation = 1e-3;
  CycleConfig cycle;
  IntegrationConfig integration = default_integration();

  static IntegrationConfig default_integration() {
    IntegrationConfig c;
    c.rel_tol = 1e-10;
    // Cycle troughs of F_W reach 1e-40 and below; error control must stay
    // relative there.
    c.abs_tol = 1e-100;
    c.max_steps = 50'000'000;
    return c;
  }
};

enum class AttractorKind { Equilibrium, Cycle, Undecided };
const char* to_string(AttractorKind k);

struct AttractorResult {
  AttractorKind kind = AttractorKind::Undecided;
  std::optional<EquilibriumKind> equilibrium;
  std::optional<CycleInfo> cycle;
  /// Smallest distance_to any equilibrium after the transient.
  double min_equilibrium_distance = 0.0;
  Trajectory trajectory;  // post-transient part only
};

AttractorResult detect_attractor(const Params& p, Formulation f, const Vec3& initial,
                                 double horizon, const AttractorConfig& cfg = {});

struct BetaSpec {
  enum class Mode { Fixed, FactorOfStar } mode = Mode::Fixed;
  double value = 0.0;  // beta itself, or the factor c in beta = c beta*_alpha
};

struct GridCell {
  Verdict verdict = Verdict::Boundary;
  double n_threshold = 0.0;
  std::optional<double> delta_stab;
  std::string reason;
};

struct BifurcationGrid {
  std::vector<double> lambda_axis;
  std::vector<double> alpha_axis;
  /// Row-major in alpha: cells[ia * lambda_axis.size() + il].
  std::vector<GridCell> cells;

  const GridCell& at(std::size_t il, std::size_t ia) const {
    return cells[ia * lambda_axis.size() + il];
  }
};

/// Uniform grid over [lambda_lo, lambda_hi] x [alpha_lo, alpha_hi], endpoints
/// included. Parallel over cells; `threads` = 0 reads ECODYN_THREADS, falling
/// back to the hardware concurrency.
BifurcationGrid bifurcation_grid(const ModelParams& base, double lambda_lo, double lambda_hi,
                                 std::size_t n_lambda, double alpha_lo, double alpha_hi,
                                 std::size_t n_alpha, BetaSpec beta, unsigned threads = 0);

struct QssaGap {
  double epsilon = 0.0;
  double sup_gap_hd = 0.0;
  double sup_gap_fw = 0.0;
  double sup_gap_hw = 0.0;  // H_W (full) against m H_D (reduced)
};

struct QssaConfig {
  std::size_t samples = 2000;
  IntegrationConfig integration = qssa_integration();

  static IntegrationConfig qssa_integration() {
    IntegrationConfig c;
    c.rel_tol = 1e-11;
    c.abs_tol = 1e-12;
    return c;
  }
};

/// `tilde` carries the slow-time migration rates m~_D, m~_W. The full system
/// starts on the slow manifold H_W(0) = m H_D(0).
std::vector<QssaGap> qssa_compare(const ModelParams& tilde, const std::vector<double>& eps,
                                  const StateReduced& initial, double t_end,
                                  const QssaConfig& cfg = {});

}  // namespace ecodyn
