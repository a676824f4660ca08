#include "ecodyn/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace ecodyn {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, int line, const std::string& key) {
  const std::string t = trim(s);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(line, "cannot parse number for '" + key + "': '" + t + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& s, int line, const std::string& key) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(line, "cannot parse non-negative integer for '" + key + "': '" + t + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& s, int line, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line, key));
  if (out.empty()) throw ConfigError(line, "empty list for '" + key + "'");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

const char* formulation_token(Formulation f) { return to_string(f); }

}  // namespace

ModelParams effective_model(const RunConfig& c) {
  ModelParams m = c.model;
  if (c.migration_scaling == MigrationScaling::Tilde) m = with_fast_migration(m, m.epsilon);
  if (c.beta_factor) m.human_boost = *c.beta_factor * beta_star(m);
  return m;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, int> seen;  // canonical key -> line

  using Setter = std::function<void(const std::string&, int)>;
  std::map<std::string, std::pair<std::string, Setter>> keys;
  auto num = [&](const std::string& name, double* target, bool* flag = nullptr) {
    return std::pair<std::string, Setter>{name, [=](const std::string& v, int line) {
                                            *target = parse_number(v, line, name);
                                            if (flag) *flag = true;
                                          }};
  };
  ModelParams& mp = c.model;
  keys["immigration"] = num("immigration", &mp.immigration, &c.has_immigration);
  keys["diet_fraction"] = num("diet_fraction", &mp.diet_fraction);
  keys["food_production"] = num("food_production", &mp.food_production);
  keys["mortality"] = num("mortality", &mp.mortality);
  keys["mig_to_wild"] = num("mig_to_wild", &mp.mig_to_wild);
  keys["mig_to_domestic"] = num("mig_to_domestic", &mp.mig_to_domestic);
  keys["fauna_growth"] = num("fauna_growth", &mp.fauna_growth);
  keys["carrying_capacity"] = num("carrying_capacity", &mp.carrying_capacity);
  keys["anthropisation"] = num("anthropisation", &mp.anthropisation, &c.has_anthropisation);
  keys["human_boost"] = num("human_boost", &mp.human_boost, &c.has_human_boost);
  keys["hunting_rate"] = num("hunting_rate", &mp.hunting_rate, &c.has_hunting_rate);
  keys["epsilon"] = num("epsilon", &mp.epsilon);
  keys["alpha"] = keys["anthropisation"];
  keys["beta"] = keys["human_boost"];
  keys["lambda"] = keys["hunting_rate"];

  keys["beta_factor"] = {"beta_factor", [&](const std::string& v, int line) {
                           c.beta_factor = parse_number(v, line, "beta_factor");
                         }};
  keys["migration_scaling"] = {"migration_scaling", [&](const std::string& v, int line) {
                                 if (v == "annual") c.migration_scaling = MigrationScaling::Annual;
                                 else if (v == "tilde") c.migration_scaling = MigrationScaling::Tilde;
                                 else throw ConfigError(line, "migration_scaling must be 'annual' or 'tilde'");
                               }};
  keys["formulation"] = {"formulation", [&](const std::string& v, int line) {
                           if (v == "full") c.formulation = Formulation::Full;
                           else if (v == "reduced") c.formulation = Formulation::Reduced;
                           else if (v == "compet") c.formulation = Formulation::Compet;
                           else throw ConfigError(line, "formulation must be full, reduced or compet");
                         }};
  IntegrationConfig& ic = c.integration;
  keys["rel_tol"] = num("rel_tol", &ic.rel_tol);
  keys["abs_tol"] = num("abs_tol", &ic.abs_tol);
  keys["min_step"] = num("min_step", &ic.min_step);
  keys["equilibrium_tol"] = num("equilibrium_tol", &ic.equilibrium_tol);
  keys["max_steps"] = {"max_steps", [&](const std::string& v, int line) {
                         ic.max_steps = parse_count(v, line, "max_steps");
                       }};
  keys["record_stride"] = {"record_stride", [&](const std::string& v, int line) {
                             ic.record_stride = parse_count(v, line, "record_stride");
                             if (ic.record_stride == 0) throw ConfigError(line, "record_stride must be >= 1");
                           }};
  keys["grid"] = {"grid", [&](const std::string& v, int line) {
                    const auto x = v.find('x');
                    if (x == std::string::npos) throw ConfigError(line, "grid must be NxM");
                    c.grid_lambda = parse_count(v.substr(0, x), line, "grid");
                    c.grid_alpha = parse_count(v.substr(x + 1), line, "grid");
                    if (c.grid_lambda < 2 || c.grid_alpha < 2) {
                      throw ConfigError(line, "grid resolution must be >= 2 per axis");
                    }
                  }};
  auto range = [&](const std::string& name, std::pair<double, double>* target) {
    return std::pair<std::string, Setter>{name, [=](const std::string& v, int line) {
                                            const auto l = parse_list(v, line, name);
                                            if (l.size() != 2 || !(l[1] > l[0])) {
                                              throw ConfigError(line, name + " must be 'lo,hi' with lo < hi");
                                            }
                                            *target = {l[0], l[1]};
                                          }};
  };
  keys["lambda_range"] = range("lambda_range", &c.lambda_range);
  keys["alpha_range"] = range("alpha_range", &c.alpha_range);
  keys["eps_list"] = {"eps_list", [&](const std::string& v, int line) {
                        c.eps_list = parse_list(v, line, "eps_list");
                        for (double e : c.eps_list) {
                          if (!(e > 0.0)) throw ConfigError(line, "eps_list entries must be > 0");
                        }
                      }};
  keys["initial_state"] = {"initial_state", [&](const std::string& v, int line) {
                             const auto l = parse_list(v, line, "initial_state");
                             if (l.size() < 2 || l.size() > 3) {
                               throw ConfigError(line, "initial_state takes 2 or 3 components");
                             }
                             c.initial_state = Vec3{l[0], l[1], l.size() == 3 ? l[2] : 0.0};
                           }};
  keys["horizon"] = {"horizon", [&](const std::string& v, int line) {
                       c.horizon = parse_number(v, line, "horizon");
                       if (!(c.horizon > 0.0)) throw ConfigError(line, "horizon must be > 0");
                     }};
  keys["seed"] = {"seed", [&](const std::string& v, int line) { c.seed = parse_count(v, line, "seed"); }};
  keys["output"] = {"output", [&](const std::string& v, int) { c.output = v; }};

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(line, "unknown key '" + key + "'");
    const std::string& canonical = it->second.first;
    if (seen.count(canonical)) {
      throw ConfigError(line, "duplicate key '" + canonical + "' (first on line " +
                                  std::to_string(seen[canonical]) + ")");
    }
    if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");
    seen[canonical] = line;
    it->second.second(value, line);
  }
  if (c.beta_factor && c.has_human_boost) {
    throw ConfigError(seen["beta_factor"], "human_boost and beta_factor are mutually exclusive");
  }
  if (c.beta_factor && !(*c.beta_factor >= 0.0 && *c.beta_factor < 1.0)) {
    throw ConfigError(seen["beta_factor"], "beta_factor must lie in [0, 1)");
  }

  try {
    validate(effective_model(c));
  } catch (const ValidationError& e) {
    const char* key = "";
    switch (e.kind()) {
      case ValidationErrorKind::AnthropisationOutOfRange: key = "anthropisation"; break;
      case ValidationErrorKind::BetaAboveThreshold: key = c.beta_factor ? "beta_factor" : "human_boost"; break;
      case ValidationErrorKind::MortalityNotAboveFood: key = "food_production"; break;
      case ValidationErrorKind::DietFractionOutOfRange: key = "diet_fraction"; break;
      case ValidationErrorKind::NonPositiveEpsilon: key = "epsilon"; break;
      case ValidationErrorKind::NonPositiveRate: key = ""; break;
    }
    const auto it = seen.find(key);
    throw ConfigError(it == seen.end() ? 0 : it->second, e.what());
  }
  return c;
}

std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  const ModelParams& m = c.model;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  auto kd = [&](const char* k, double v) { kv(k, format_double(v)); };
  o << "# model (rates per year, populations in individuals)\n";
  if (c.has_immigration) kd("immigration", m.immigration);
  kd("diet_fraction", m.diet_fraction);
  kd("food_production", m.food_production);
  kd("mortality", m.mortality);
  kd("mig_to_wild", m.mig_to_wild);
  kd("mig_to_domestic", m.mig_to_domestic);
  kd("fauna_growth", m.fauna_growth);
  kd("carrying_capacity", m.carrying_capacity);
  if (c.has_anthropisation) kd("anthropisation", m.anthropisation);
  if (c.has_human_boost) kd("human_boost", m.human_boost);
  if (c.beta_factor) kd("beta_factor", *c.beta_factor);
  if (c.has_hunting_rate) kd("hunting_rate", m.hunting_rate);
  kd("epsilon", m.epsilon);
  kv("migration_scaling", c.migration_scaling == MigrationScaling::Tilde ? "tilde" : "annual");
  o << "# integration\n";
  kv("formulation", formulation_token(c.formulation));
  kd("rel_tol", c.integration.rel_tol);
  kd("abs_tol", c.integration.abs_tol);
  kd("min_step", c.integration.min_step);
  kd("equilibrium_tol", c.integration.equilibrium_tol);
  kv("max_steps", std::to_string(c.integration.max_steps));
  kv("record_stride", std::to_string(c.integration.record_stride));
  kd("horizon", c.horizon);
  if (c.initial_state) {
    const Vec3& s = *c.initial_state;
    kv("initial_state", join({s[0], s[1], s[2]}));
  }
  kv("seed", std::to_string(c.seed));
  o << "# sweeps\n";
  kv("grid", std::to_string(c.grid_lambda) + "x" + std::to_string(c.grid_alpha));
  kv("lambda_range", join({c.lambda_range.first, c.lambda_range.second}));
  kv("alpha_range", join({c.alpha_range.first, c.alpha_range.second}));
  kv("eps_list", join(c.eps_list));
  if (!c.output.empty()) kv("output", c.output);
  return o.str();
}

namespace {

std::string canonical_key(const std::string& k) {
  if (k == "alpha") return "anthropisation";
  if (k == "beta") return "human_boost";
  if (k == "lambda") return "hunting_rate";
  return k;
}

std::string line_key(const std::string& raw) {
  const auto hash = raw.find('#');
  const std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
  const auto eq = body.find('=');
  return eq == std::string::npos ? "" : canonical_key(trim(body.substr(0, eq)));
}

}  // namespace

std::string merge_config_text(const std::string& base, const std::string& overrides) {
  std::map<std::string, bool> replaced;
  std::istringstream ov(overrides);
  std::string raw;
  while (std::getline(ov, raw)) {
    const std::string k = line_key(raw);
    if (k.empty()) continue;
    replaced[k] = true;
    if (k == "human_boost") replaced["beta_factor"] = true;
    if (k == "beta_factor") replaced["human_boost"] = true;
  }
  std::ostringstream out;
  std::istringstream in(base);
  while (std::getline(in, raw)) {
    const std::string k = line_key(raw);
    out << (!k.empty() && replaced.count(k) ? "# overridden: " + raw : raw) << '\n';
  }
  out << overrides;
  return out.str();
}

void require_keys(const RunConfig& c, const std::vector<std::string>& needed) {
  std::string missing;
  for (const std::string& k : needed) {
    bool ok = true;
    if (k == "hunting_rate") ok = c.has_hunting_rate;
    else if (k == "anthropisation") ok = c.has_anthropisation;
    else if (k == "human_boost") ok = c.has_human_boost || c.beta_factor.has_value();
    else if (k == "immigration") ok = c.has_immigration;
    if (!ok) missing += (missing.empty() ? "" : ", ") + k;
  }
  if (!missing.empty()) {
    throw ConfigError(0, "missing required parameter(s) with no default: " + missing);
  }
}

}  // namespace ecodyn
