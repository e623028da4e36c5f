// fiscal-ipw: multi-category fiscal policy effects via inverse
// probability weighting, with a Monte Carlo harness for estimator
// checks. Subcommands: estimate, simulate, inspect-data.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ipw/baseline.hpp"
#include "ipw/effects.hpp"
#include "ipw/errors.hpp"
#include "ipw/macro_table.hpp"
#include "ipw/mc.hpp"
#include "ipw/panel.hpp"
#include "ipw/propensity.hpp"
#include "ipw/treatment.hpp"

namespace {

// Write-to-temp-then-rename so failures never leave partial files.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out)
      throw ipw::Error(ipw::ErrorCode::data_not_found,
                       "cannot write '" + tmp + "'");
    out << content;
    if (!out)
      throw ipw::Error(ipw::ErrorCode::internal,
                       "write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ipw::Error(ipw::ErrorCode::internal,
                     "cannot rename '" + tmp + "' to '" + path + "'");
  }
}

struct EstimateArgs {
  std::string data;
  std::string format = "text";
  std::string out;
  std::string variant = "all";
  std::string param = "ref";
  double e_min = 0.01;
  std::string baseline = "full";
  bool robust = false;
  bool quiet = false;

  std::string date_col = "date";
  std::string y_col = "rgdp";
  std::string g_col = "gov_spend";
  std::vector<std::string> z_cols = {"rgdp", "ted", "commodity", "unemp"};
  std::vector<std::string> z_log_cols = {"rgdp", "commodity", "unemp"};
  std::vector<std::string> x_recipe = {"rgdp:log_diff", "commodity:log_diff",
                                       "unemp:diff_log"};
};

ipw::PanelConfig panel_config(const EstimateArgs& args) {
  ipw::PanelConfig config;
  config.y_col = args.y_col;
  config.g_col = args.g_col;
  config.z_cols = args.z_cols;
  config.z_log_cols = args.z_log_cols;
  config.x_recipe.clear();
  for (const auto& entry : args.x_recipe) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos)
      throw ipw::Error(ipw::ErrorCode::bad_spec,
                       "x-recipe entry '" + entry + "' is not col:kind");
    config.x_recipe.push_back(
        {entry.substr(0, colon),
         ipw::parse_covariate_kind(entry.substr(colon + 1))});
  }
  return config;
}

int run_estimate(const EstimateArgs& args) {
  const ipw::MacroTable table = ipw::load_csv(args.data, args.date_col);
  const ipw::Panel panel = ipw::assemble_panel(table, panel_config(args));
  const ipw::TreatmentAssignment assignment = ipw::classify(panel.g);
  const ipw::BaselineFit baseline =
      ipw::fit_baseline(panel, ipw::parse_baseline_mode(args.baseline));
  const ipw::PropensityFit propensity =
      ipw::fit_gps(panel.x, assignment, args.e_min);

  std::vector<ipw::Variant> variants;
  if (args.variant == "all")
    variants = {ipw::Variant::wls_a2, ipw::Variant::ols_a2,
                ipw::Variant::wls_a1};
  else
    variants = {ipw::parse_variant(args.variant)};

  ipw::EstimateOptions options;
  options.robust_se = args.robust;
  std::vector<ipw::EstimationResult> results;
  for (ipw::Variant v : variants)
    results.push_back(ipw::estimate(panel, baseline, propensity, v,
                                    ipw::parse_parameterization(args.param),
                                    options));

  if (!args.quiet)
    std::cerr << ipw::check_no_empty_cell(propensity, args.e_min).text();
  write_output(args.out,
               ipw::render_table(results,
                                 ipw::parse_table_format(args.format)));
  return 0;
}

struct SimulateArgs {
  int n = 2000;
  int reps = 200;
  std::uint64_t seed = 1;
  double theta = 0.0;
  double noise_sd = 1.0;
  double g_scale = 1.0;
  std::vector<double> mu = {-1.0, 0.0, 1.0, 2.0};
  std::string format = "csv";
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  ipw::DgpSpec spec = ipw::DgpSpec::default_spec();
  spec.n = args.n;
  spec.seed = args.seed;
  spec.theta = args.theta;
  spec.noise_sd = args.noise_sd;
  spec.g_scale = args.g_scale;
  if (args.mu.size() != 4)
    throw ipw::Error(ipw::ErrorCode::bad_spec, "--mu needs 4 values");
  spec.mu = Eigen::Map<const Eigen::Vector4d>(args.mu.data());

  const ipw::McReport report = ipw::run_experiment(spec, args.reps);
  write_output(args.out,
               args.format == "json" ? report.json() : report.csv());
  return 0;
}

int run_inspect(const std::string& data, const std::string& date_col) {
  const ipw::MacroTable table = ipw::load_csv(data, date_col);
  std::cout << "rows: " << table.rows() << '\n';
  if (!table.dates.empty())
    std::cout << "range: " << table.dates.front().str() << " .. "
              << table.dates.back().str() << '\n';
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    const auto& col = table.columns[c];
    double lo = col.front(), hi = col.front();
    for (double v : col) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    std::cout << "column " << table.names[c] << ": min " << lo << ", max "
              << hi << '\n';
  }
  std::cout << "validation: ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fiscal policy effects via inverse probability weighting"};
  app.require_subcommand(1);
  app.set_config("--config")->envname("FISCAL_IPW_CONFIG");

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand(
      "estimate", "Estimate treatment effects from a quarterly CSV");
  cmd_est->add_option("--data", est.data, "input CSV path")
      ->required()
      ->configurable(true);
  cmd_est->add_option("--format", est.format, "text|csv|json");
  cmd_est->add_option("--out", est.out, "output path (default stdout)");
  cmd_est->add_option("--variant", est.variant,
                      "wls-a2|ols-a2|wls-a1|all");
  cmd_est->add_option("--param", est.param, "ref|cell");
  cmd_est->add_option("--e-min", est.e_min, "propensity floor");
  cmd_est->add_option("--baseline", est.baseline, "full|expanding");
  cmd_est->add_flag("--robust", est.robust, "HC1 standard errors");
  cmd_est->add_flag("--quiet", est.quiet, "suppress overlap diagnostics");
  cmd_est->add_option("--date-col", est.date_col);
  cmd_est->add_option("--y-col", est.y_col);
  cmd_est->add_option("--g-col", est.g_col);
  cmd_est->add_option("--z-cols", est.z_cols)->delimiter(',');
  cmd_est->add_option("--z-log-cols", est.z_log_cols)->delimiter(',');
  cmd_est->add_option("--x-recipe", est.x_recipe, "col:kind entries")
      ->delimiter(',');

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand(
      "simulate", "Monte Carlo bias/coverage experiment");
  cmd_sim->add_option("--n", sim.n, "rows per replication");
  cmd_sim->add_option("--reps", sim.reps, "replications (>= 50)");
  cmd_sim->add_option("--seed", sim.seed, "base RNG seed");
  cmd_sim->add_option("--theta", sim.theta,
                      "mechanical-inclusion coefficient");
  cmd_sim->add_option("--noise-sd", sim.noise_sd);
  cmd_sim->add_option("--g-scale", sim.g_scale);
  cmd_sim->add_option("--mu", sim.mu, "true effects (4 values)")
      ->delimiter(',');
  cmd_sim->add_option("--format", sim.format, "csv|json");
  cmd_sim->add_option("--out", sim.out, "output path (default stdout)");

  std::string inspect_data, inspect_date_col = "date";
  auto* cmd_ins = app.add_subcommand(
      "inspect-data", "Validate a CSV and print a summary");
  cmd_ins->add_option("--data", inspect_data, "input CSV path")->required();
  cmd_ins->add_option("--date-col", inspect_date_col);

  try {
    app.parse(argc, argv);
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_sim->parsed()) return run_simulate(sim);
    if (cmd_ins->parsed()) return run_inspect(inspect_data, inspect_date_col);
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ipw::Error& e) {
    std::cerr << ipw::error_code_name(e.code()) << ": " << e.what() << '\n';
    return e.code() == ipw::ErrorCode::internal ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "E_INTERNAL: " << e.what() << '\n';
    return 2;
  }
}
