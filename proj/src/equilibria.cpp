#include "ecodyn/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecodyn {

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Trivial: return "TE";
    case EquilibriumKind::FaunaOnly: return "EE_F";
    case EquilibriumKind::HumanOnly: return "EE_H";
    case EquilibriumKind::Coexistence: return "EE_HF";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::LAS: return "LAS";
    case Stability::Unstable: return "unstable";
    case Stability::Indeterminate: return "indeterminate";
  }
  return "?";
}

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::Full: return "full";
    case Formulation::Reduced: return "reduced";
    case Formulation::Compet: return "compet";
  }
  return "?";
}

namespace {

// P_F multiplied through by lambda_F. Same roots, and finite at lambda_F = 0.
PFCoefficients pf_scaled(const Params& p) {
  const double r = p.r(), k = p.k(), e = p.e(), lam = p.lambda();
  const double mu = p.net_mortality(), m = p.m(), imm = p.immigration(), beta = p.beta();
  const double oma = 1.0 - p.alpha();
  PFCoefficients c;
  c.a = lam * e * r / k;
  c.b = lam * e * oma * r + mu * r / (m * k) + imm * beta * r / k;
  c.c = mu * oma * r / m - imm * lam + imm * oma * beta * r;
  return c;
}

}  // namespace

PFCoefficients pf_coefficients(const Params& p) {
  PFCoefficients s = pf_scaled(p);
  const double lam = p.lambda();
  return {s.a / lam, s.b / lam, s.c / lam};
}

long double pf_value(const Params& p, long double x) {
  using L = long double;
  const L r = p.r(), k = p.k(), e = p.e(), lam = p.lambda();
  const L mu = p.net_mortality(), m = p.m(), imm = p.immigration(), beta = p.beta();
  const L oma = 1.0L - p.alpha(), X = x;
  const L a = lam * e * r / k;
  const L b = lam * e * oma * r + mu * r / (m * k) + imm * beta * r / k;
  const L c = mu * oma * r / m - imm * lam + imm * oma * beta * r;
  return ((a * X - b) * X + c) / lam;
}

PFRoots pf_roots(const Params& p) {
  const double lam = p.lambda();
  PFRoots out;
  if (p.immigration() == 0.0) {
    const double k1 = p.capacity();
    const double k2 = p.net_mortality() / (p.e() * lam * p.m());
    out.root_low = std::min(k1, k2);
    out.root_high = std::max(k1, k2);
    const PFCoefficients c = pf_coefficients(p);
    out.discriminant = c.b * c.b - 4.0 * c.a * c.c;
    return out;
  }
  const PFCoefficients s = pf_scaled(p);
  const double disc_scaled = s.b * s.b - 4.0 * s.a * s.c;
  if (!(disc_scaled > 0.0)) {
    throw std::logic_error("P_F discriminant is not positive");
  }
  const double sq = std::sqrt(disc_scaled);
  // b > 0 always, so (b + sqrt) has no cancellation.
  const double q = 0.5 * (s.b + sq);
  out.root_low = s.c / q;
  out.root_high = s.a > 0.0 ? q / s.a : std::numeric_limits<double>::infinity();
  out.discriminant = lam > 0.0 ? disc_scaled / (lam * lam) : std::numeric_limits<double>::infinity();
  return out;
}

double threshold_n(const Params& p) {
  const double mu = p.net_mortality();
  if (p.immigration() == 0.0) {
    return p.m() * p.e() * p.lambda() * p.capacity() / mu;
  }
  const double num = p.growth() * (mu / (p.m() * p.immigration()) + p.beta());
  return p.lambda() > 0.0 ? num / p.lambda() : std::numeric_limits<double>::infinity();
}

LambdaBounds lambda_bounds(const Params& p) {
  LambdaBounds b;
  const double mu = p.net_mortality();
  if (p.immigration() == 0.0) {
    b.lambda_min = mu / ((1.0 - p.alpha()) * p.e() * p.m() * p.k());
  } else {
    b.lambda_max = p.growth() * (mu / (p.m() * p.immigration()) + p.beta());
  }
  return b;
}

namespace {

// H_D on the fauna nullcline: (1-alpha) r (1 - F/K') / (m (lambda - beta (1-alpha) r (1 - F/K'))).
double nullcline_h(const Params& p, double f) {
  const double slack = 1.0 - f / p.capacity();
  return p.growth() * slack / (p.m() * (p.lambda() - p.beta() * p.growth() * slack));
}

}  // namespace

std::optional<StateFull> coexistence_state(const Params& p) {
  if (!(threshold_n(p) > 1.0 + kExistenceTol)) return std::nullopt;
  const double mu = p.net_mortality(), m = p.m();
  double f = 0.0, h = 0.0;
  if (p.immigration() == 0.0) {
    f = mu / (p.lambda() * m * p.e());
    h = nullcline_h(p, f);
  } else if (p.lambda() == 0.0) {
    f = p.capacity();
    h = p.immigration() / mu;
  } else {
    f = pf_roots(p).root_low;
    // Two exact expressions for H_D; use the one whose leading factor suffers
    // less cancellation.
    const double d_human = mu - p.e() * p.lambda() * m * f;
    const double d_fauna = 1.0 - f / p.capacity();
    if (std::abs(d_human) / mu >= std::abs(d_fauna)) {
      h = p.immigration() / d_human;
    } else {
      h = nullcline_h(p, f);
    }
  }
  if (!(f > 0.0) || !(h > 0.0) || !std::isfinite(h)) return std::nullopt;
  return StateFull{h, f, m * h};
}

Matrix3 jacobian(const Params& p, Formulation form, const double* x) {
  Matrix3 j;
  const double g = p.growth(), kc = p.capacity(), lam = p.lambda(), beta = p.beta();
  const double e = p.e(), mu = p.net_mortality(), md = p.m_d(), mw = p.m_w();
  switch (form) {
    case Formulation::Full: {
      const double hd = x[0], f = x[1], hw = x[2];
      (void)hd;
      j.dim = 3;
      j.a[0][0] = -mu - md;
      j.a[0][1] = e * lam * hw;
      j.a[0][2] = e * lam * f + mw;
      j.a[1][0] = 0.0;
      j.a[1][1] = g * (1.0 + beta * hw) * (1.0 - 2.0 * f / kc) - lam * hw;
      j.a[1][2] = g * beta * (1.0 - f / kc) * f - lam * f;
      j.a[2][0] = md;
      j.a[2][1] = 0.0;
      j.a[2][2] = -mw;
      break;
    }
    case Formulation::Reduced: {
      const double hd = x[0], f = x[1];
      const double m = p.m(), share = 1.0 / (1.0 + m);
      j.dim = 2;
      j.a[0][0] = share * (-mu + e * m * lam * f);
      j.a[0][1] = share * e * m * lam * hd;
      j.a[1][0] = g * beta * m * (1.0 - f / kc) * f - m * lam * f;
      j.a[1][1] = g * (1.0 + beta * m * hd) * (1.0 - 2.0 * f / kc) - m * lam * hd;
      break;
    }
    case Formulation::Compet: {
      const double f = x[1], hw = x[2];
      j.dim = 3;
      j.a[0][0] = -mu - md;
      j.a[0][1] = e * lam * hw;
      j.a[0][2] = e * lam * f - mw;
      j.a[1][0] = 0.0;
      j.a[1][1] = g * (1.0 - beta * hw) * (1.0 + 2.0 * f / kc) + lam * hw;
      j.a[1][2] = (lam - g * beta - beta * p.r() * f / p.k()) * f;
      j.a[2][0] = -md;
      j.a[2][1] = 0.0;
      j.a[2][2] = -mw;
      break;
    }
  }
  return j;
}

Matrix3 jacobian(const Params& p, const StateFull& s) {
  const double x[3] = {s.h_domestic, s.fauna, s.h_wild};
  return jacobian(p, Formulation::Full, x);
}

Matrix3 jacobian(const Params& p, const StateReduced& s) {
  const double x[3] = {s.h_domestic, s.fauna, 0.0};
  return jacobian(p, Formulation::Reduced, x);
}

Matrix3 jacobian(const Params& p, const StateCompet& s) {
  const double x[3] = {s.h_d, s.f_w, s.h_w};
  return jacobian(p, Formulation::Compet, x);
}

CharPoly char_poly(const Matrix3& j) {
  CharPoly c;
  c.dim = j.dim;
  const auto& a = j.a;
  if (j.dim == 2) {
    c.a1 = -(a[0][0] + a[1][1]);
    c.a0 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return c;
  }
  c.a2 = -(a[0][0] + a[1][1] + a[2][2]);
  c.a1 = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) + (a[0][0] * a[2][2] - a[0][2] * a[2][0]) +
         (a[1][1] * a[2][2] - a[1][2] * a[2][1]);
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  c.a0 = -det;
  return c;
}

Stability routh_hurwitz(const CharPoly& c) {
  struct Test {
    double value;
    double tol;
  };
  std::vector<Test> tests;
  if (c.dim == 2) {
    // LAS iff trace < 0 and det > 0; monic X^2 + a1 X + a0 with a1 = -trace.
    const double s = std::max(std::abs(c.a1), std::sqrt(std::abs(c.a0)));
    tests = {{c.a1, kRouthHurwitzTol * s}, {c.a0, kRouthHurwitzTol * s * s}};
  } else {
    const double s = std::max({std::abs(c.a2), std::sqrt(std::abs(c.a1)), std::cbrt(std::abs(c.a0))});
    const double prod = c.a2 * c.a1;
    tests = {{c.a2, kRouthHurwitzTol * s},
             {c.a1, kRouthHurwitzTol * s * s},
             {c.a0, kRouthHurwitzTol * s * s * s},
             {prod - c.a0, kRouthHurwitzTol * std::max(std::abs(prod), std::abs(c.a0))}};
  }
  bool zero = false;
  for (const Test& t : tests) {
    if (!std::isfinite(t.value)) return Stability::Indeterminate;
    if (t.value < -t.tol) return Stability::Unstable;
    if (std::abs(t.value) <= t.tol) zero = true;
  }
  return zero ? Stability::Indeterminate : Stability::LAS;
}

std::vector<EquilibriumReport> equilibria_all(const Params& p) {
  std::vector<EquilibriumReport> out;
  auto add = [&](EquilibriumKind kind, const StateFull& s) {
    EquilibriumReport r;
    r.kind = kind;
    r.state = s;
    r.char_poly = char_poly(jacobian(p, s));
    r.local_stability = routh_hurwitz(r.char_poly);
    out.push_back(r);
  };
  if (p.immigration() == 0.0) {
    add(EquilibriumKind::Trivial, {0.0, 0.0, 0.0});
    add(EquilibriumKind::FaunaOnly, {0.0, p.capacity(), 0.0});
  } else {
    const double h = p.immigration() / p.net_mortality();
    add(EquilibriumKind::HumanOnly, {h, 0.0, p.m() * h});
  }
  if (auto s = coexistence_state(p)) add(EquilibriumKind::Coexistence, *s);
  return out;
}

double delta_stab_jacobian(const Params& p) {
  const auto s = coexistence_state(p);
  if (!s) throw NoCoexistenceError("coexistence equilibrium does not exist (N <= 1)");
  const CharPoly c = char_poly(jacobian(p, to_compet(*s)));
  return c.a2 * c.a1 - c.a0;
}

double delta_stab(const Params& p) {
  const auto s = coexistence_state(p);
  if (!s) throw NoCoexistenceError("coexistence equilibrium does not exist (N <= 1)");
  const StateCompet x = to_compet(*s);
  const double f = x.f_w, h = x.h_w;
  const double mu = p.net_mortality(), md = p.m_d(), mw = p.m_w();
  const double r = p.r(), k = p.k(), e = p.e(), lam = p.lambda(), beta = p.beta();
  const double sigma = mu + md + mw;
  const double boost = r * (1.0 - beta * h);
  const double a2 = sigma - boost * f / k;

  if (p.immigration() == 0.0) {
    return a2 * sigma * boost * (-f / k) +
           md * e * lam * (1.0 - p.alpha()) * r * (1.0 + f / p.capacity()) * f;
  }
  // The bracketed factors ((mu - f_D) / (e lambda m) + f_W) and sqrt(Delta_F)
  // are multiplied through by lambda so the expression stays finite at lambda = 0.
  const double imm = p.immigration();
  const double lam_bracket = mu / (e * p.m()) + lam * f;  // lambda * (...)
  const PFCoefficients sc = pf_scaled(p);
  const double lam_sqrt_disc = std::sqrt(sc.b * sc.b - 4.0 * sc.a * sc.c);  // lambda * sqrt(Delta_F)
  const double first = a2 * (-sigma * boost * f / k + lam_bracket * e * md);
  const double second =
      md * e * r *
      (lam_sqrt_disc / (e * r) - imm * beta / (k * e) - beta * h / k * lam_bracket) * f;
  return first + second;
}

namespace {

void require_lambda_star_domain(const Params& p) {
  if (p.immigration() != 0.0 || p.beta() != 0.0) {
    throw std::invalid_argument("lambda_star requires immigration = 0 and human_boost = 0");
  }
}

struct PDelta {
  double a, b, c;  // A X^2 - B X - C
};

PDelta p_delta_coefficients(const Params& p) {
  const double mu = p.net_mortality(), md = p.m_d(), mw = p.m_w();
  const double sigma = mu + md + mw;
  PDelta q;
  q.a = (1.0 - p.alpha()) * p.k() * md * p.e();
  q.b = sigma * sigma + mu * mw;
  q.c = p.r() * mu * sigma / (p.k() * p.m() * p.e());
  return q;
}

}  // namespace

double p_delta(const Params& p, double lambda) {
  require_lambda_star_domain(p);
  const PDelta q = p_delta_coefficients(p);
  return (q.a * lambda - q.b) * lambda - q.c;
}

double lambda_star(const Params& p, LambdaStarVariant v) {
  require_lambda_star_domain(p);
  const double mu = p.net_mortality(), md = p.m_d(), mw = p.m_w();
  const double sigma = mu + md + mw;
  const double oma = 1.0 - p.alpha();
  const double outer = mw * mu + sigma * sigma;
  const double inner = v == LambdaStarVariant::QuadraticRoot ? outer : mw * mu / p.e() + sigma * sigma;
  const double ratio = 4.0 * oma * mw * p.r() * mu * sigma / (inner * inner);
  return outer * (1.0 + std::sqrt(1.0 + ratio)) / (2.0 * p.e() * md * oma * p.k());
}

ThresholdReport thresholds(const Params& p) {
  ThresholdReport t;
  t.n_threshold = threshold_n(p);
  const LambdaBounds b = lambda_bounds(p);
  t.lambda_min = b.lambda_min;
  t.lambda_max = b.lambda_max;
  t.beta_star = p.beta_star();
  if (coexistence_state(p)) {
    t.delta_stab = delta_stab_jacobian(p);
    t.delta_stab_closed_form = delta_stab(p);
  }
  if (p.immigration() == 0.0 && p.beta() == 0.0) t.lambda_star = lambda_star(p);
  return t;
}

}  // namespace ecodyn
