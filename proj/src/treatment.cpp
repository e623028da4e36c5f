#include "ipw/treatment.hpp"

#include <cmath>
#include <string>

#include "ipw/errors.hpp"

namespace ipw {

std::vector<int> TreatmentAssignment::class_counts() const {
  std::vector<int> counts(kTreatmentClasses, 0);
  for (int q : labels) ++counts[q - 1];
  return counts;
}

Eigen::MatrixXd dummies(const std::vector<int>& labels, int n_classes) {
  Eigen::MatrixXd d =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()),
                            n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > n_classes)
      throw Error(ErrorCode::bad_spec,
                  "label " + std::to_string(labels[i]) + " outside 1.." +
                      std::to_string(n_classes));
    d(static_cast<Eigen::Index>(i), labels[i] - 1) = 1.0;
  }
  return d;
}

TreatmentAssignment classify_with_sigma(const Eigen::VectorXd& g,
                                        double sigma) {
  if (!(sigma > 0.0))
    throw Error(ErrorCode::bad_spec, "sigma must be positive");
  TreatmentAssignment a;
  a.sigma = sigma;
  a.labels.reserve(static_cast<std::size_t>(g.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double v = g(i);
    int label;
    if (v <= -sigma)
      label = 1;
    else if (v <= 0.0)
      label = 2;
    else if (v <= sigma)
      label = 3;
    else
      label = 4;
    a.labels.push_back(label);
  }
  a.dummies = dummies(a.labels, kTreatmentClasses);
  return a;
}

TreatmentAssignment classify(const Eigen::VectorXd& g) {
  const Eigen::Index n = g.size();
  if (n < 2)
    throw Error(ErrorCode::bad_spec, "need at least 2 growth rates");
  const double mean = g.mean();
  const double ss = (g.array() - mean).square().sum();
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sigma > 0.0))
    throw Error(ErrorCode::bad_data,
                "growth rates have zero variance; bins are degenerate");
  return classify_with_sigma(g, sigma);
}

}  // namespace ipw
