#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ipw {

struct FitResult {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  // p x p, symmetric PSD
  Eigen::VectorXd residuals;
  Eigen::Index dof = 0;  // n - p
  double rss = 0.0;
  bool weighted = false;
  double r_squared = 0.0;

  Eigen::VectorXd std_errors() const {
    return covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
};

// Classical covariance s^2 (X'X)^-1 by default; robust = HC1 sandwich.
FitResult ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  bool robust = false);

// Minimizes sum w_t (y_t - X_t b)^2. Covariance s^2 (X'WX)^-1 with
// s^2 = sum w_t e_t^2 / dof; R^2 against the weighted mean.
FitResult wls_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& w, bool robust = false);

struct MnlFit {
  // (J-1) x (k+1): class 1 is the reference, column 0 the intercept.
  Eigen::MatrixXd coefficients;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct MnlOptions {
  double tolerance = 1e-8;  // max-norm of the gradient
  int max_iterations = 100;
  double divergence_norm = 1e4;  // separation guard on ||B||
};

// Multinomial-logit log-likelihood and its gradient at coefficients B,
// exposed for oracle/finite-difference checks. X is n x k (no intercept
// column; one is prepended internally), labels in {1..J}.
double mnl_loglik(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                  int n_classes, const Eigen::MatrixXd& B);
Eigen::MatrixXd mnl_gradient(const Eigen::MatrixXd& X,
                             const std::vector<int>& labels, int n_classes,
                             const Eigen::MatrixXd& B);

// Newton-Raphson with step halving from B = 0.
MnlFit mnl_fit(const Eigen::MatrixXd& X, const std::vector<int>& labels,
               int n_classes, const MnlOptions& options = {});

// Row-wise softmax class probabilities, m x J.
Eigen::MatrixXd mnl_predict(const MnlFit& fit, const Eigen::MatrixXd& X);

}  // namespace ipw
