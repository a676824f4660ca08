// ecodyn: command-line front end.
//
//   ecodyn <subcommand> [--config PATH] [--out PATH] [overrides...]
//
// Subcommands: thresholds, equilibria, classify, simulate, bifurcate,
// qssa-compare. Exit status: 0 ok, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ecodyn/cli.hpp"
#include "ecodyn/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Human-wildlife resource-consumer model: thresholds, equilibria, simulation"};
  app.require_subcommand(1, 1);

  std::string config_path, out_path, grid, eps_list;
  std::optional<double> lambda, alpha, immigration, beta, horizon;
  std::optional<std::uint64_t> seed;
  bool dump = false;

  const char* subs[][2] = {
      {"thresholds", "Print N, the stability discriminant, hunting-rate bounds, lambda* and beta*"},
      {"equilibria", "Print every equilibrium with its local stability"},
      {"classify", "Print the long-term outcome class"},
      {"simulate", "Integrate and write the trajectory as CSV"},
      {"bifurcate", "Sweep the (hunting rate, anthropisation) plane and write CSV"},
      {"qssa-compare", "Compare the full and reduced systems for each epsilon"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s[0], s[1]);
    sub->add_option("--config", config_path, "Parameter file (key = value)");
    sub->add_option("--out", out_path, "Output file (default stdout)");
    sub->add_option("--lambda", lambda, "Hunting rate lambda_F");
    sub->add_option("--alpha", alpha, "Anthropisation alpha");
    sub->add_option("--immigration", immigration, "Immigration I");
    sub->add_option("--beta", beta, "Human boost beta");
    sub->add_option("--grid", grid, "Grid resolution NxM (lambda x alpha)");
    sub->add_option("--eps-list", eps_list, "Comma-separated epsilon values");
    sub->add_option("--horizon", horizon, "Integration horizon in years");
    sub->add_option("--seed", seed, "Seed for random initial states");
    sub->add_flag("--dump-config", dump, "Print the resolved configuration and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ecodyn::kExitValidation;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  std::string text;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config '" << config_path << "'\n";
      return ecodyn::kExitValidation;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  // Command-line overrides are appended as config lines so they go through
  // the same parser and validation; later keys replace earlier ones.
  std::ostringstream extra;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) extra << key << " = " << ecodyn::format_double(*v) << '\n';
  };
  put("hunting_rate", lambda);
  put("anthropisation", alpha);
  put("immigration", immigration);
  put("human_boost", beta);
  put("horizon", horizon);
  if (seed) extra << "seed = " << *seed << '\n';
  if (!grid.empty()) extra << "grid = " << grid << '\n';
  if (!eps_list.empty()) extra << "eps_list = " << eps_list << '\n';
  if (!out_path.empty()) extra << "output = " << out_path << '\n';

  ecodyn::RunConfig cfg;
  try {
    cfg = ecodyn::parse_config(ecodyn::merge_config_text(text, extra.str()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ecodyn::kExitValidation;
  }
  if (dump) {
    std::cout << ecodyn::render_config(cfg);
    return ecodyn::kExitOk;
  }
  return ecodyn::run(subcommand, cfg, std::cout, std::cerr);
}
