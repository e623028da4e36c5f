#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ipw/macro_table.hpp"

namespace ipw {

// One row per usable quarter t:
//   y       log output level at t
//   y_next  log output level at t+1
//   g       policy-spending growth (log-difference) at t
//   x       covariates dated t-1 (log-diff output, log-diff commodity,
//           diff unemployment)
//   z       macro levels dated t-1, forecaster inputs
struct Panel {
  std::vector<Quarter> t;
  Eigen::VectorXd y;
  Eigen::VectorXd y_next;
  Eigen::VectorXd g;
  Eigen::MatrixXd x;  // n x k
  Eigen::MatrixXd z;  // n x l

  Eigen::Index rows() const { return y.size(); }
};

// Recipe for one covariate: the named level column is reduced to a
// stationary series dated t-1.
enum class CovariateKind {
  log_diff,  // log(c_{t-1}) - log(c_{t-2})
  diff,      // c_{t-1} - c_{t-2}
  diff_log,  // log(c_{t-1}) - log(c_{t-2}), alias kept for config clarity
};

CovariateKind parse_covariate_kind(const std::string& text);

struct CovariateSpec {
  std::string column;
  CovariateKind kind;
};

struct PanelConfig {
  std::string y_col = "rgdp";        // level, logged to form y
  std::string g_col = "gov_spend";   // level, log-differenced to form g
  std::vector<std::string> z_cols = {"rgdp", "ted", "commodity", "unemp"};
  std::vector<std::string> z_log_cols = {"rgdp", "commodity", "unemp"};
  std::vector<CovariateSpec> x_recipe = {
      {"rgdp", CovariateKind::log_diff},
      {"commodity", CovariateKind::log_diff},
      {"unemp", CovariateKind::diff_log},
  };
};

// Builds (y_t, y_{t+1}, g_t, x_{t-1}, z_{t-1}) rows; rows whose lags or
// lead fall outside the sample are dropped from both ends.
Panel assemble_panel(const MacroTable& table, const PanelConfig& config);

}  // namespace ipw
