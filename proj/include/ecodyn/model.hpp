// Human-wildlife resource-consumer model: parameters, phase-space points,
// vector fields for the full, reduced (fast-migration) and competitive
// formulations, and the invariant-region bounds.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace ecodyn {

/// Raw parameter set. Rates are per year, populations in individuals.
/// The defaults are the baseline used for simulations; the four "varying"
/// parameters (hunting rate, anthropisation, human boost, immigration) have no
/// meaningful default and start at zero.
struct ModelParams {
  double immigration = 0.0;         // individuals / year
  double diet_fraction = 0.4;       // share of wild meat in the diet, (0, 1]
  double food_production = 0.005;   // 1 / year
  double mortality = 0.02;          // 1 / year
  double mig_to_wild = 0.826;       // domestic -> wild, 1 / year
  double mig_to_domestic = 4.13;    // wild -> domestic, 1 / year
  double fauna_growth = 0.8;        // 1 / year
  double carrying_capacity = 7200;  // individuals
  double anthropisation = 0.0;      // [0, 1)
  double human_boost = 0.0;         // 1 / individual
  double hunting_rate = 0.0;        // 1 / (individual * year)
  double epsilon = 1.0;             // time-scale ratio, only used for fast-migration scaling

  bool operator==(const ModelParams&) const = default;
};

enum class ValidationErrorKind {
  NonPositiveRate,
  MortalityNotAboveFood,
  AnthropisationOutOfRange,
  DietFractionOutOfRange,
  BetaAboveThreshold,
  NonPositiveEpsilon,
};

class ValidationError : public std::invalid_argument {
 public:
  ValidationError(ValidationErrorKind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}
  ValidationErrorKind kind() const noexcept { return kind_; }

 private:
  ValidationErrorKind kind_;
};

/// Upper bound on human_boost that keeps the invariant region bounded:
/// 4 (mu_D - f_D) / (m e r_F (1 - alpha)^2 K_F). Evaluated without validation.
double beta_star(const ModelParams& p);

/// A parameter set that passed validate(). Every downstream formula assumes
/// validity, so all library entry points take this type.
class Params {
 public:
  const ModelParams& raw() const noexcept { return raw_; }

  double beta_star() const noexcept { return beta_star_; }
  /// m = m_D / m_W
  double m() const noexcept { return m_; }
  /// mu_D - f_D, strictly positive
  double net_mortality() const noexcept { return raw_.mortality - raw_.food_production; }
  /// (1 - alpha) K_F, the anthropised carrying capacity
  double capacity() const noexcept { return (1.0 - raw_.anthropisation) * raw_.carrying_capacity; }
  /// (1 - alpha) r_F
  double growth() const noexcept { return (1.0 - raw_.anthropisation) * raw_.fauna_growth; }

  double immigration() const noexcept { return raw_.immigration; }
  double e() const noexcept { return raw_.diet_fraction; }
  double m_d() const noexcept { return raw_.mig_to_wild; }
  double m_w() const noexcept { return raw_.mig_to_domestic; }
  double r() const noexcept { return raw_.fauna_growth; }
  double k() const noexcept { return raw_.carrying_capacity; }
  double alpha() const noexcept { return raw_.anthropisation; }
  double beta() const noexcept { return raw_.human_boost; }
  double lambda() const noexcept { return raw_.hunting_rate; }

 private:
  friend Params validate(const ModelParams& p);
  Params(const ModelParams& raw, double beta_star);

  ModelParams raw_;
  double beta_star_;
  double m_;
};

/// Throws ValidationError naming the first violated constraint.
Params validate(const ModelParams& p);

/// Returns a copy with both migration rates divided by eps (fast-migration
/// scaling m = m~ / eps); `tilde` holds the slow-time rates m~_D, m~_W.
ModelParams with_fast_migration(ModelParams tilde, double eps);

/// Components smaller in magnitude than this are treated as roundoff and
/// clamped to zero when a state is constructed through the checked factories.
inline constexpr double kRoundoffFloor = 1e-30;

struct StateFull {
  double h_domestic = 0.0;
  double fauna = 0.0;
  double h_wild = 0.0;

  /// Rejects negative components beyond kRoundoffFloor, clamps the rest.
  static StateFull checked(double h_domestic, double fauna, double h_wild);
  bool operator==(const StateFull&) const = default;
};

struct StateReduced {
  double h_domestic = 0.0;
  double fauna = 0.0;

  static StateReduced checked(double h_domestic, double fauna);
  bool operator==(const StateReduced&) const = default;
};

/// Competitive coordinates: h_d = H_D, f_w = -F_W, h_w = -H_W.
struct StateCompet {
  double h_d = 0.0;
  double f_w = 0.0;
  double h_w = 0.0;

  static StateCompet checked(double h_d, double f_w, double h_w);
  bool operator==(const StateCompet&) const = default;
};

class SignError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

StateCompet to_compet(const StateFull& s);
StateFull from_compet(const StateCompet& s);

// Rates share the state layout but carry no sign constraint.
StateFull rhs_full(const Params& p, const StateFull& s);
StateReduced rhs_reduced(const Params& p, const StateReduced& s);
StateCompet rhs_compet(const Params& p, const StateCompet& s);

struct RegionBounds {
  double s_max = 0.0;       // bound on H_D + e F_W
  double fauna_max = 0.0;   // (1 - alpha) K_F
  double h_wild_max = 0.0;  // m s_max
  /// Fauna level below which the competitive system is competitive; present
  /// only when lambda_F < (1 - alpha) beta r_F.
  std::optional<double> absorbing_fauna_bound;
};

RegionBounds region_bounds(const Params& p);

struct RegionCheck {
  /// Largest relative violation over the per-component bounds (<= 0 inside).
  double component_excess = 0.0;
  /// Relative violation of the joint bound H_D + e F_W <= s_max.
  double joint_excess = 0.0;
  bool nonnegative = true;

  bool inside(double tol) const {
    return nonnegative && component_excess <= tol && joint_excess <= tol;
  }
};

/// Violations of the joint constraint are reported separately; callers decide
/// whether to reject or only flag them.
RegionCheck check_region(const Params& p, const RegionBounds& b, const StateFull& s);

}  // namespace ecodyn
