#pragma once

#include <array>
#include <string>
#include <vector>

#include "ipw/baseline.hpp"
#include "ipw/panel.hpp"
#include "ipw/propensity.hpp"

namespace ipw {

enum class Variant { wls_a2, ols_a2, wls_a1 };
enum class Parameterization { reference_coded, cell_means };
enum class TableFormat { text, csv, json };

Variant parse_variant(const std::string& text);
Parameterization parse_parameterization(const std::string& text);
TableFormat parse_table_format(const std::string& text);
std::string variant_name(Variant v);

// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, else "".
std::string stars_for(double p_value);

struct EstimationResult {
  Variant variant = Variant::wls_a2;
  Parameterization parameterization = Parameterization::reference_coded;
  std::array<double, 4> betas{};
  std::array<double, 4> std_errors{};
  std::array<double, 4> p_values{};
  std::array<std::string, 4> stars{};
  double r_squared = 0.0;
  int n = 0;
};

struct EstimateOptions {
  bool robust_se = false;  // heteroskedasticity-robust (HC1) errors
};

// Fits equation-style dummy regressions of the chosen response:
//   wls_a2: y_{t+1} - yhat_t, inverse-propensity weights
//   ols_a2: y_{t+1} - yhat_t, unit weights
//   wls_a1: y_{t+1} - y_t, inverse-propensity weights
// reference_coded reports (intercept, offsets vs class 1); cell_means
// reports per-class means. Two-sided t p-values with dof = n - 4.
EstimationResult estimate(const Panel& panel, const BaselineFit& baseline,
                          const PropensityFit& propensity, Variant variant,
                          Parameterization parameterization =
                              Parameterization::reference_coded,
                          const EstimateOptions& options = {});

// Shared kernel: response and weights supplied directly. Used by the
// Monte Carlo harness with synthetic panels.
EstimationResult estimate_dummy_regression(
    const Eigen::VectorXd& response, const TreatmentAssignment& assignment,
    const Eigen::VectorXd& weights, Variant variant,
    Parameterization parameterization, const EstimateOptions& options = {});

std::string render_table(const std::vector<EstimationResult>& results,
                         TableFormat format);

}  // namespace ipw
