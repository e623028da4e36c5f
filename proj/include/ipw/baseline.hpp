#pragma once

#include <Eigen/Dense>
#include <string>

#include "ipw/panel.hpp"
#include "ipw/regress.hpp"

namespace ipw {

enum class BaselineMode { full_sample, expanding };

BaselineMode parse_baseline_mode(const std::string& text);

// Counterfactual baseline: a forecast of log output at t built only from
// the lagged macro vector z_{t-1}. Never reads g or the treatment.
struct BaselineFit {
  FitResult projection;  // full-sample regression of y on (1, z)
  Eigen::VectorXd fitted;
  bool in_sample = true;
};

// full_sample: one projection over all rows, fitted values in-sample.
// expanding: row t forecast from rows < t; the first window (20 rows)
// gets in-sample fits from the window projection.
BaselineFit fit_baseline(const Panel& panel,
                         BaselineMode mode = BaselineMode::full_sample);

// r_t = y_{t+1} - yhat_t, the dependent variable under the modified CIA.
Eigen::VectorXd response_a2(const Panel& panel, const BaselineFit& fit);

// r_t = y_{t+1} - y_t, the dependent variable under the standard CIA.
Eigen::VectorXd response_a1(const Panel& panel);

}  // namespace ipw
