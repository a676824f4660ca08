// Closed-form equilibria, Jacobians, Routh-Hurwitz classification and the
// existence / stability thresholds of the model.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "ecodyn/model.hpp"

namespace ecodyn {

enum class EquilibriumKind { Trivial, FaunaOnly, HumanOnly, Coexistence };
enum class Stability { LAS, Unstable, Indeterminate };

const char* to_string(EquilibriumKind k);
const char* to_string(Stability s);

/// Monic characteristic polynomial X^3 + a2 X^2 + a1 X + a0 (dim 3), or
/// X^2 - trace X + det (dim 2, stored as a1 = -trace, a0 = det, a2 unused).
struct CharPoly {
  int dim = 3;
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  double trace() const { return dim == 3 ? -a2 : -a1; }
  double det() const { return dim == 3 ? -a0 : a0; }
};

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::Trivial;
  StateFull state;
  Stability local_stability = Stability::Indeterminate;
  CharPoly char_poly;  // of the full-system Jacobian at `state`
};

struct PFRoots {
  double discriminant = 0.0;
  double root_low = 0.0;
  double root_high = 0.0;
};

struct ThresholdReport {
  double n_threshold = 0.0;
  /// Only when the coexistence equilibrium exists; Jacobian route.
  std::optional<double> delta_stab;
  /// Closed-form value, kept for the diagnostic comparison.
  std::optional<double> delta_stab_closed_form;
  std::optional<double> lambda_min;  // immigration == 0
  std::optional<double> lambda_max;  // immigration > 0
  std::optional<double> lambda_star; // immigration == 0 and beta == 0
  double beta_star = 0.0;
};

class NoCoexistenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coefficients of P_F(X) = a X^2 - b X + c, whose low root is the fauna level
/// of the coexistence equilibrium when immigration > 0.
struct PFCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double operator()(double x) const { return (a * x - b) * x + c; }
};
PFCoefficients pf_coefficients(const Params& p);

/// P_F(x) evaluated in extended precision. Near x = (1 - alpha) K_F and for
/// small lambda_F its terms cancel by many orders of magnitude, so even the
/// rounding of x to double matters there.
long double pf_value(const Params& p, long double x);

/// Both roots of P_F. With zero immigration the factorised roots
/// {(1-alpha) K_F, (mu_D - f_D) / (e lambda_F m)} are returned exactly.
PFRoots pf_roots(const Params& p);

/// N_{I=0} or N_{I>0}, selected by the immigration value.
double threshold_n(const Params& p);

struct LambdaBounds {
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
};
LambdaBounds lambda_bounds(const Params& p);

/// N must exceed 1 by this relative margin for the coexistence equilibrium to
/// be reported; closer to 1 it is indistinguishable from the boundary one.
inline constexpr double kExistenceTol = 1e-12;

/// The coexistence equilibrium if it exists (N > 1).
std::optional<StateFull> coexistence_state(const Params& p);

/// All equilibria, in the order TE, EE^F, EE^H, EE^HF (absent ones skipped).
std::vector<EquilibriumReport> equilibria_all(const Params& p);

enum class Formulation { Full, Reduced, Compet };
const char* to_string(Formulation f);

struct Matrix3 {
  int dim = 3;
  double a[3][3] = {};
};

/// `x` holds the state in the formulation's own coordinates (first `dim` used).
Matrix3 jacobian(const Params& p, Formulation f, const double* x);
Matrix3 jacobian(const Params& p, const StateFull& s);
Matrix3 jacobian(const Params& p, const StateReduced& s);
Matrix3 jacobian(const Params& p, const StateCompet& s);

CharPoly char_poly(const Matrix3& j);

/// Relative tolerance under which a tested quantity counts as zero.
inline constexpr double kRouthHurwitzTol = 1e-12;

Stability routh_hurwitz(const CharPoly& c);

/// a2 a1 - a0 from the competitive Jacobian at the coexistence equilibrium.
double delta_stab_jacobian(const Params& p);
/// Closed-form stability discriminant at the coexistence equilibrium, in
/// competitive coordinates. Throws NoCoexistenceError when N <= 1.
double delta_stab(const Params& p);

enum class LambdaStarVariant {
  QuadraticRoot,      // positive root of the quadratic in lambda_F
  DietScaledBracket,  // variant with (mu_D - f_D) / e inside the square-root bracket
};

/// Requires immigration == 0 and beta == 0, else std::invalid_argument.
/// The hunting rate in `p` is ignored.
double lambda_star(const Params& p, LambdaStarVariant v = LambdaStarVariant::QuadraticRoot);

/// P_Delta(X): negative exactly where the coexistence equilibrium is stable
/// (immigration == 0, beta == 0).
double p_delta(const Params& p, double lambda);

ThresholdReport thresholds(const Params& p);

}  // namespace ecodyn
