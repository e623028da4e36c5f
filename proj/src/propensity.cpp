#include "ipw/propensity.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

#include "ipw/errors.hpp"

namespace ipw {

Eigen::MatrixXd clip_probs(const Eigen::MatrixXd& probs, double e_min,
                           int* clipped_count) {
  const Eigen::Index J = probs.cols();
  if (!(e_min > 0.0) || e_min >= 1.0 / static_cast<double>(J))
    throw Error(ErrorCode::bad_spec,
                "e_min must lie in (0, 1/J); got " + std::to_string(e_min));

  Eigen::MatrixXd out = probs;
  int clipped = 0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    // Fixed point: floored entries sit at e_min, the rest carry the
    // remaining mass. Rescaling can drag a further entry below the
    // floor, so repeat; the floored set only grows (at most J passes).
    std::vector<bool> floored(static_cast<std::size_t>(J), false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (Eigen::Index j = 0; j < J; ++j)
        if (!floored[static_cast<std::size_t>(j)] && out(i, j) < e_min) {
          floored[static_cast<std::size_t>(j)] = true;
          changed = true;
        }
      if (!changed) break;
      int n_floored = 0;
      double free_mass = 0.0;
      for (Eigen::Index j = 0; j < J; ++j)
        if (floored[static_cast<std::size_t>(j)])
          ++n_floored;
        else
          free_mass += probs(i, j);
      const double scale =
          (1.0 - static_cast<double>(n_floored) * e_min) / free_mass;
      for (Eigen::Index j = 0; j < J; ++j)
        out(i, j) = floored[static_cast<std::size_t>(j)]
                        ? e_min
                        : probs(i, j) * scale;
    }
    for (bool f : floored) clipped += f ? 1 : 0;
  }
  if (clipped_count) *clipped_count = clipped;
  return out;
}

PropensityFit fit_gps(const Eigen::MatrixXd& x_lagged,
                      const TreatmentAssignment& assignment,
                      double e_min) {
  PropensityFit fit;
  fit.e_min = e_min;
  fit.model = mnl_fit(x_lagged, assignment.labels, kTreatmentClasses);
  if (!fit.model.converged)
    throw Error(ErrorCode::nonconvergence,
                "propensity logit did not converge after " +
                    std::to_string(fit.model.iterations) +
                    " iterations (gradient max-norm " +
                    std::to_string(fit.model.gradient_norm) + ")");
  fit.raw_probs = mnl_predict(fit.model, x_lagged);
  fit.probs = clip_probs(fit.raw_probs, e_min, &fit.clipped_count);

  const Eigen::Index n = fit.probs.rows();
  fit.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    fit.weights(i) =
        1.0 / fit.probs(i, assignment.labels[static_cast<std::size_t>(i)] - 1);
  return fit;
}

OverlapReport check_no_empty_cell(const PropensityFit& fit, double e_min) {
  OverlapReport report;
  report.e_min = e_min;
  report.clipped_count = fit.clipped_count;
  const Eigen::Index J = fit.raw_probs.cols();
  report.min_prob_per_class = fit.raw_probs.colwise().minCoeff();
  report.below_floor_per_class.resize(J);
  for (Eigen::Index j = 0; j < J; ++j)
    report.below_floor_per_class(j) =
        static_cast<int>((fit.raw_probs.col(j).array() < e_min).count());
  report.max_weight =
      fit.weights.size() > 0 ? fit.weights.maxCoeff() : 0.0;
  report.violated = report.below_floor_per_class.sum() > 0;
  return report;
}

std::string OverlapReport::text() const {
  std::ostringstream out;
  out << "Overlap diagnostics (e_min = " << e_min << ")\n";
  for (Eigen::Index j = 0; j < min_prob_per_class.size(); ++j) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "  class %ld: min propensity %.6f, below floor %d\n",
                  static_cast<long>(j + 1), min_prob_per_class(j),
                  below_floor_per_class(j));
    out << buf;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "  max weight %.4f, clipped entries %d\n",
                max_weight, clipped_count);
  out << buf;
  out << (violated ? "  WARNING: overlap floor violated in-sample\n"
                   : "  overlap floor satisfied\n");
  return out.str();
}

std::string OverlapReport::key_values() const {
  std::ostringstream out;
  out << "e_min=" << e_min << '\n';
  for (Eigen::Index j = 0; j < min_prob_per_class.size(); ++j) {
    out << "min_prob_class_" << (j + 1) << '=' << min_prob_per_class(j)
        << '\n';
    out << "below_floor_class_" << (j + 1) << '='
        << below_floor_per_class(j) << '\n';
  }
  out << "clipped_count=" << clipped_count << '\n';
  out << "max_weight=" << max_weight << '\n';
  out << "violated=" << (violated ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace ipw
