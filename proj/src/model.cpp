#include "ecodyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ecodyn {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(ValidationErrorKind::NonPositiveRate,
                          std::string(name) + " must be finite and > 0 (got " + fmt(v) + ")");
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError(ValidationErrorKind::NonPositiveRate,
                          std::string(name) + " must be finite and >= 0 (got " + fmt(v) + ")");
  }
}

double clamp_roundoff(double v, const char* name) {
  if (std::isnan(v)) throw SignError(std::string(name) + " is NaN");
  if (v < -kRoundoffFloor) throw SignError(std::string(name) + " must be >= 0 (got " + fmt(v) + ")");
  return v < 0.0 ? 0.0 : v;
}

double clamp_roundoff_nonpositive(double v, const char* name) {
  if (std::isnan(v)) throw SignError(std::string(name) + " is NaN");
  if (v > kRoundoffFloor) throw SignError(std::string(name) + " must be <= 0 (got " + fmt(v) + ")");
  return v > 0.0 ? 0.0 : v;
}

}  // namespace

double beta_star(const ModelParams& p) {
  const double m = p.mig_to_wild / p.mig_to_domestic;
  const double one_minus_alpha = 1.0 - p.anthropisation;
  return 4.0 * (p.mortality - p.food_production) /
         (m * p.diet_fraction * p.fauna_growth * one_minus_alpha * one_minus_alpha *
          p.carrying_capacity);
}

Params::Params(const ModelParams& raw, double beta_star)
    : raw_(raw), beta_star_(beta_star), m_(raw.mig_to_wild / raw.mig_to_domestic) {}

Params validate(const ModelParams& p) {
  require_nonnegative(p.immigration, "immigration");
  require_positive(p.diet_fraction, "diet_fraction");
  require_nonnegative(p.food_production, "food_production");
  require_positive(p.mortality, "mortality");
  require_positive(p.mig_to_wild, "mig_to_wild");
  require_positive(p.mig_to_domestic, "mig_to_domestic");
  require_positive(p.fauna_growth, "fauna_growth");
  require_positive(p.carrying_capacity, "carrying_capacity");
  require_nonnegative(p.human_boost, "human_boost");
  require_nonnegative(p.hunting_rate, "hunting_rate");

  if (p.diet_fraction > 1.0) {
    throw ValidationError(ValidationErrorKind::DietFractionOutOfRange,
                          "diet_fraction must lie in (0, 1] (got " + fmt(p.diet_fraction) + ")");
  }
  if (!(p.mortality > p.food_production)) {
    throw ValidationError(ValidationErrorKind::MortalityNotAboveFood,
                          "mortality must exceed food_production (mu_D - f_D > 0); got mu_D = " +
                              fmt(p.mortality) + ", f_D = " + fmt(p.food_production));
  }
  if (!(p.anthropisation >= 0.0 && p.anthropisation < 1.0)) {
    throw ValidationError(ValidationErrorKind::AnthropisationOutOfRange,
                          "anthropisation must lie in [0, 1) (got " + fmt(p.anthropisation) + ")");
  }
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
    throw ValidationError(ValidationErrorKind::NonPositiveEpsilon,
                          "epsilon must be finite and > 0 (got " + fmt(p.epsilon) + ")");
  }
  const double m = p.mig_to_wild / p.mig_to_domestic;
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw ValidationError(ValidationErrorKind::NonPositiveRate,
                          "mig_to_wild / mig_to_domestic must be finite and > 0");
  }
  const double bstar = beta_star(p);
  if (!(p.human_boost < bstar)) {
    throw ValidationError(ValidationErrorKind::BetaAboveThreshold,
                          "human_boost must be below beta* = " + fmt(bstar) + " (got " +
                              fmt(p.human_boost) + ")");
  }
  return Params(p, bstar);
}

ModelParams with_fast_migration(ModelParams tilde, double eps) {
  tilde.mig_to_wild /= eps;
  tilde.mig_to_domestic /= eps;
  tilde.epsilon = eps;
  return tilde;
}

StateFull StateFull::checked(double h_domestic, double fauna, double h_wild) {
  return {clamp_roundoff(h_domestic, "H_D"), clamp_roundoff(fauna, "F_W"),
          clamp_roundoff(h_wild, "H_W")};
}

StateReduced StateReduced::checked(double h_domestic, double fauna) {
  return {clamp_roundoff(h_domestic, "H_D"), clamp_roundoff(fauna, "F_W")};
}

StateCompet StateCompet::checked(double h_d, double f_w, double h_w) {
  return {clamp_roundoff(h_d, "h_D"), clamp_roundoff_nonpositive(f_w, "f_W"),
          clamp_roundoff_nonpositive(h_w, "h_W")};
}

StateCompet to_compet(const StateFull& s) {
  const StateFull c = StateFull::checked(s.h_domestic, s.fauna, s.h_wild);
  return {c.h_domestic, -c.fauna, -c.h_wild};
}

StateFull from_compet(const StateCompet& s) {
  const StateCompet c = StateCompet::checked(s.h_d, s.f_w, s.h_w);
  return {c.h_d, -c.f_w, -c.h_w};
}

StateFull rhs_full(const Params& p, const StateFull& s) {
  const double hd = s.h_domestic, f = s.fauna, hw = s.h_wild;
  const double migration = p.m_w() * hw - p.m_d() * hd;
  return {
      p.immigration() + p.e() * p.lambda() * hw * f - p.net_mortality() * hd + migration,
      p.growth() * (1.0 + p.beta() * hw) * (1.0 - f / p.capacity()) * f - p.lambda() * f * hw,
      -migration,
  };
}

StateReduced rhs_reduced(const Params& p, const StateReduced& s) {
  const double hd = s.h_domestic, f = s.fauna;
  const double m = p.m();
  const double share = 1.0 / (1.0 + m);
  return {
      share * (p.immigration() - p.net_mortality() * hd + p.e() * m * p.lambda() * f * hd),
      p.growth() * (1.0 + p.beta() * m * hd) * (1.0 - f / p.capacity()) * f -
          m * p.lambda() * f * hd,
  };
}

StateCompet rhs_compet(const Params& p, const StateCompet& s) {
  const double hd = s.h_d, f = s.f_w, hw = s.h_w;
  return {
      p.immigration() + p.e() * p.lambda() * hw * f - p.net_mortality() * hd - p.m_d() * hd -
          p.m_w() * hw,
      p.growth() * (1.0 - p.beta() * hw) * (1.0 + f / p.capacity()) * f + p.lambda() * f * hw,
      -p.m_d() * hd - p.m_w() * hw,
  };
}

RegionBounds region_bounds(const Params& p) {
  RegionBounds b;
  const double denom = p.net_mortality() -
                       p.e() * p.r() * (1.0 - p.alpha()) * (1.0 - p.alpha()) * p.k() * p.m() *
                           p.beta() / 4.0;
  b.s_max = (p.immigration() + (p.net_mortality() + p.growth() / 4.0) * p.e() * p.capacity()) /
            denom;
  b.fauna_max = p.capacity();
  b.h_wild_max = p.m() * b.s_max;
  if (p.lambda() < p.growth() * p.beta()) {
    b.absorbing_fauna_bound = p.k() * (1.0 - p.alpha() - p.lambda() / (p.beta() * p.r()));
  }
  return b;
}

RegionCheck check_region(const Params& p, const RegionBounds& b, const StateFull& s) {
  RegionCheck c;
  c.nonnegative = s.h_domestic >= -kRoundoffFloor && s.fauna >= -kRoundoffFloor &&
                  s.h_wild >= -kRoundoffFloor;
  c.component_excess = std::max(s.fauna / b.fauna_max - 1.0, s.h_wild / b.h_wild_max - 1.0);
  c.joint_excess = (s.h_domestic + p.e() * s.fauna) / b.s_max - 1.0;
  return c;
}

}  // namespace ecodyn
