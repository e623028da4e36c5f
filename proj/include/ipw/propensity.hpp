#pragma once

#include <Eigen/Dense>
#include <string>

#include "ipw/regress.hpp"
#include "ipw/treatment.hpp"

namespace ipw {

// Generalized propensity score fit plus inverse-probability weights.
struct PropensityFit {
  MnlFit model;
  Eigen::MatrixXd probs;      // n x J, clipped and renormalized
  Eigen::MatrixXd raw_probs;  // n x J, pre-clip fitted probabilities
  double e_min = 0.0;
  int clipped_count = 0;
  Eigen::VectorXd weights;  // 1 / p_{q_t}(x_{t-1})
};

// Floors every entry at e_min; rows stay exact distributions: floored
// entries sit at e_min and the remaining mass is rescaled onto the rest.
// Idempotent. Requires 0 < e_min < 1/J.
Eigen::MatrixXd clip_probs(const Eigen::MatrixXd& probs, double e_min,
                           int* clipped_count = nullptr);

PropensityFit fit_gps(const Eigen::MatrixXd& x_lagged,
                      const TreatmentAssignment& assignment,
                      double e_min = 0.01);

struct OverlapReport {
  Eigen::VectorXd min_prob_per_class;  // pre-clip
  Eigen::VectorXi below_floor_per_class;
  int clipped_count = 0;
  double max_weight = 0.0;
  double e_min = 0.0;
  bool violated = false;

  std::string text() const;
  std::string key_values() const;  // one "key=value" per line
};

// Never throws.
OverlapReport check_no_empty_cell(const PropensityFit& fit, double e_min);

}  // namespace ipw
