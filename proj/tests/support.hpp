// Shared helpers for the test suites: seeded parameter draws over the
// documented parameter ranges.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "ecodyn/equilibria.hpp"
#include "ecodyn/model.hpp"

namespace ecodyn::test {

inline ModelParams baseline() { return ModelParams{}; }

inline ModelParams baseline(double lambda, double immigration) {
  ModelParams p;
  p.hunting_rate = lambda;
  p.immigration = immigration;
  return p;
}

/// Parameter set of the slow-fast example; the migration rates are slow-time
/// ones, to be divided by epsilon.
inline ModelParams slow_fast_example() {
  ModelParams p;
  p.immigration = 0.0;
  p.human_boost = 0.0;
  p.fauna_growth = 0.6;
  p.carrying_capacity = 7250;
  p.anthropisation = 0.1;
  p.hunting_rate = 0.015;
  p.diet_fraction = 0.2;
  p.mortality = 0.02;
  p.food_production = 0.0;
  p.mig_to_wild = 0.0019;
  p.mig_to_domestic = 0.066;
  return p;
}

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  bool coin() { return uniform(0.0, 1.0) < 0.5; }

  /// Fixed parameters from the field-range table; beta, alpha, lambda and
  /// immigration drawn separately by the caller or left at zero.
  ModelParams fixed_params() {
    ModelParams p;
    p.mortality = 0.02;
    p.food_production = uniform(0.0, 0.0164);
    p.mig_to_domestic = uniform(2.28, 73.0);
    p.mig_to_wild = uniform(0.17, 0.52) * p.mig_to_domestic;
    p.fauna_growth = uniform(0.44, 0.84);
    p.carrying_capacity = uniform(900.0, 34000.0);
    p.diet_fraction = uniform(0.05, 1.0);
    return p;
  }

  /// Any valid parameter set: both immigration regimes, beta in [0, 0.99 beta*).
  ModelParams any_params() {
    ModelParams p = fixed_params();
    p.anthropisation = uniform(0.0, 0.99);
    p.immigration = coin() ? 0.0 : log_uniform(1e-3, 10.0);
    p.human_boost = coin() ? 0.0 : uniform(0.0, 0.99) * beta_star(p);
    p.hunting_rate = log_uniform(1e-6, 1.0);
    return p;
  }

  /// Valid parameters with the coexistence equilibrium present: lambda is
  /// placed at a random distance N in [1.01, 1000] past the existence bound.
  ModelParams coexistence_params() {
    ModelParams p = any_params();
    const double n = log_uniform(1.01, 1000.0);
    p.hunting_rate = 1.0;
    const LambdaBounds b = lambda_bounds(validate(p));
    p.hunting_rate = b.lambda_min ? *b.lambda_min * n : *b.lambda_max / n;
    return p;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(double a, double b, double floor = 1.0) {
  return std::abs(a - b) / std::max({floor, std::abs(a), std::abs(b)});
}

}  // namespace ecodyn::test
