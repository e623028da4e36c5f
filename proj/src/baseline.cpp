#include "ipw/baseline.hpp"

#include "ipw/errors.hpp"

namespace ipw {

namespace {

constexpr Eigen::Index kFirstWindow = 20;

Eigen::MatrixXd design(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd D(z.rows(), z.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(z.cols()) = z;
  return D;
}

}  // namespace

BaselineMode parse_baseline_mode(const std::string& text) {
  if (text == "full" || text == "full_sample") return BaselineMode::full_sample;
  if (text == "expanding") return BaselineMode::expanding;
  throw Error(ErrorCode::bad_spec, "unknown baseline mode '" + text + "'");
}

BaselineFit fit_baseline(const Panel& panel, BaselineMode mode) {
  const Eigen::Index n = panel.rows();
  if (n == 0) throw Error(ErrorCode::bad_data, "empty panel");
  const Eigen::MatrixXd D = design(panel.z);

  BaselineFit fit;
  if (mode == BaselineMode::full_sample) {
    fit.projection = ols_fit(D, panel.y);
    fit.fitted = D * fit.projection.coefficients;
    fit.in_sample = true;
    return fit;
  }

  if (n <= kFirstWindow)
    throw Error(ErrorCode::bad_data,
                "expanding baseline needs more than " +
                    std::to_string(kFirstWindow) + " rows");
  fit.in_sample = false;
  fit.fitted.resize(n);
  const FitResult head =
      ols_fit(D.topRows(kFirstWindow), panel.y.head(kFirstWindow));
  fit.fitted.head(kFirstWindow) = D.topRows(kFirstWindow) * head.coefficients;
  for (Eigen::Index t = kFirstWindow; t < n; ++t) {
    const FitResult window = ols_fit(D.topRows(t), panel.y.head(t));
    fit.fitted(t) = D.row(t) * window.coefficients;
  }
  // full-sample projection kept for diagnostics
  fit.projection = ols_fit(D, panel.y);
  return fit;
}

Eigen::VectorXd response_a2(const Panel& panel, const BaselineFit& fit) {
  if (fit.fitted.size() != panel.rows())
    throw Error(ErrorCode::bad_spec, "baseline fit is for a different panel");
  return panel.y_next - fit.fitted;
}

Eigen::VectorXd response_a1(const Panel& panel) {
  return panel.y_next - panel.y;
}

}  // namespace ipw
