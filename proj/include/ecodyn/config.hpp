// Line-oriented `key = value` run configuration.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecodyn/equilibria.hpp"
#include "ecodyn/integrate.hpp"
#include "ecodyn/model.hpp"

namespace ecodyn {

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(int line, const std::string& what)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class MigrationScaling {
  Annual,  // mig_to_wild / mig_to_domestic are the rates used directly
  Tilde,   // they are slow-time rates, divided by epsilon
};

struct RunConfig {
  /// Model parameters as written; with Tilde scaling the migration rates are
  /// the slow-time ones.
  ModelParams model;
  // The four varying parameters have no default and must be given.
  bool has_hunting_rate = false;
  bool has_anthropisation = false;
  bool has_human_boost = false;
  bool has_immigration = false;
  std::optional<double> beta_factor;  // human_boost = factor * beta*_alpha

  MigrationScaling migration_scaling = MigrationScaling::Annual;
  IntegrationConfig integration;
  Formulation formulation = Formulation::Full;

  std::size_t grid_lambda = 50;
  std::size_t grid_alpha = 50;
  std::pair<double, double> lambda_range{0.0005, 0.1};
  std::pair<double, double> alpha_range{0.0, 0.99};
  std::vector<double> eps_list{1e-2, 1e-3, 1e-4};
  std::optional<Vec3> initial_state;
  double horizon = 1000.0;
  std::uint64_t seed = 1;
  std::string output;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError (line-numbered) on unknown keys, unparsable values or
/// parameter-invariant violations of the varying parameters given.
RunConfig parse_config(const std::string& text);

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& c);

/// Exact, locale-independent 17-significant-digit formatting.
std::string format_double(double v);

/// The model parameters the system is run with: beta_factor resolved and, for
/// Tilde scaling, migration divided by epsilon. Not validated.
ModelParams effective_model(const RunConfig& c);

/// Appends `overrides` (config text) to `base`, blanking lines of `base` that
/// set the same keys so that line numbers of `base` are preserved. Setting
/// human_boost also drops beta_factor and vice versa.
std::string merge_config_text(const std::string& base, const std::string& overrides);

/// Throws ConfigError naming each missing varying parameter among those in
/// `needed` ("hunting_rate", "anthropisation", "human_boost", "immigration").
void require_keys(const RunConfig& c, const std::vector<std::string>& needed);

}  // namespace ecodyn
