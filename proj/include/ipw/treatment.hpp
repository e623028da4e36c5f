#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ipw {

// J = 4 policy-growth classes split at (-sigma, 0, sigma):
//   1: g <= -sigma     2: -sigma < g <= 0
//   3: 0 < g <= sigma  4: sigma < g
inline constexpr int kTreatmentClasses = 4;

struct TreatmentAssignment {
  std::vector<int> labels;  // entries in 1..4
  double sigma = 0.0;
  Eigen::MatrixXd dummies;  // n x 4, one 1 per row

  std::vector<int> class_counts() const;
};

// sigma = sample standard deviation of g (denominator n-1).
TreatmentAssignment classify(const Eigen::VectorXd& g);

// Interval logic with an injected sigma, for tests and diagnostics.
TreatmentAssignment classify_with_sigma(const Eigen::VectorXd& g,
                                        double sigma);

Eigen::MatrixXd dummies(const std::vector<int>& labels, int n_classes);

}  // namespace ipw
