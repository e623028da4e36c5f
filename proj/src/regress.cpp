#include "ipw/regress.hpp"

#include <cmath>
#include <string>

#include "ipw/errors.hpp"

namespace ipw {

namespace {

// Rank check via singular values of the (scaled) design.
void check_conditioning(const Eigen::MatrixXd& X) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0 || s(0) / smin > 1e10)
    throw Error(ErrorCode::rank_deficient,
                "design matrix rank-deficient (condition number " +
                    std::to_string(smin <= 0.0 ? INFINITY : s(0) / smin) +
                    ")");
}

FitResult lstsq(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                const Eigen::VectorXd& w, bool weighted, bool robust) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n <= p)
    throw Error(ErrorCode::bad_spec,
                "need n > p (n=" + std::to_string(n) +
                    ", p=" + std::to_string(p) + ")");
  if (weighted && (w.array() <= 0.0).any())
    throw Error(ErrorCode::bad_spec, "nonpositive weight");

  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd Xs = sw.asDiagonal() * X;
  const Eigen::VectorXd ys = sw.asDiagonal() * y;
  check_conditioning(Xs);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  FitResult fit;
  fit.coefficients = qr.solve(ys);
  fit.residuals = y - X * fit.coefficients;
  fit.dof = n - p;
  fit.weighted = weighted;

  const Eigen::VectorXd we2 = w.cwiseProduct(fit.residuals.cwiseAbs2());
  fit.rss = we2.sum();
  const double s2 = fit.rss / static_cast<double>(fit.dof);

  const Eigen::MatrixXd xtwx_inv =
      (Xs.transpose() * Xs)
          .ldlt()
          .solve(Eigen::MatrixXd::Identity(p, p));
  if (robust) {
    // HC1: (X'WX)^-1 X'W diag(e^2) WX (X'WX)^-1 * n/(n-p)
    const Eigen::MatrixXd meat =
        X.transpose() *
        (w.cwiseProduct(w).cwiseProduct(fit.residuals.cwiseAbs2()))
            .asDiagonal() *
        X;
    fit.covariance = xtwx_inv * meat * xtwx_inv *
                     (static_cast<double>(n) / static_cast<double>(fit.dof));
  } else {
    fit.covariance = s2 * xtwx_inv;
  }
  fit.covariance = ((fit.covariance + fit.covariance.transpose()) / 2.0).eval();

  const double wsum = w.sum();
  const double ymean = w.dot(y) / wsum;
  const double tss = w.dot((y.array() - ymean).square().matrix());
  fit.r_squared = tss > 0.0 ? 1.0 - fit.rss / tss : 0.0;
  return fit;
}

}  // namespace

FitResult ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  bool robust) {
  FitResult fit =
      lstsq(X, y, Eigen::VectorXd::Ones(X.rows()), false, robust);
  return fit;
}

FitResult wls_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& w, bool robust) {
  return lstsq(X, y, w, true, robust);
}

namespace {

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd D(X.rows(), X.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(X.cols()) = X;
  return D;
}

// Row-wise class probabilities for design D (intercept included) under
// coefficients B, reference class 1 pinned at score zero.
Eigen::MatrixXd softmax_probs(const Eigen::MatrixXd& D,
                              const Eigen::MatrixXd& B) {
  const Eigen::Index n = D.rows(), J = B.rows() + 1;
  Eigen::MatrixXd scores(n, J);
  scores.col(0).setZero();
  scores.rightCols(J - 1) = D * B.transpose();
  const Eigen::VectorXd rowmax = scores.rowwise().maxCoeff();
  Eigen::MatrixXd probs =
      (scores.colwise() - rowmax).array().exp().matrix();
  const Eigen::VectorXd rowsum = probs.rowwise().sum();
  probs.array().colwise() /= rowsum.array();
  return probs;
}

void check_labels(const std::vector<int>& labels, int n_classes,
                  Eigen::Index n) {
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw Error(ErrorCode::bad_spec, "label/covariate length mismatch");
  std::vector<int> counts(n_classes, 0);
  for (int q : labels) {
    if (q < 1 || q > n_classes)
      throw Error(ErrorCode::bad_spec,
                  "label " + std::to_string(q) + " outside 1.." +
                      std::to_string(n_classes));
    ++counts[q - 1];
  }
  for (int j = 0; j < n_classes; ++j)
    if (counts[j] == 0)
      throw Error(ErrorCode::empty_cell,
                  "class " + std::to_string(j + 1) + " is empty");
}

}  // namespace

double mnl_loglik(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                  int n_classes, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd D = with_intercept(X);
  const Eigen::MatrixXd P = softmax_probs(D, B);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    ll += std::log(P(i, labels[static_cast<std::size_t>(i)] - 1));
  return ll;
}

Eigen::MatrixXd mnl_gradient(const Eigen::MatrixXd& X,
                             const std::vector<int>& labels, int n_classes,
                             const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd D = with_intercept(X);
  const Eigen::MatrixXd P = softmax_probs(D, B);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_classes - 1, D.cols());
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (int j = 2; j <= n_classes; ++j) {
      const double d = (labels[static_cast<std::size_t>(i)] == j ? 1.0 : 0.0) -
                       P(i, j - 1);
      G.row(j - 2) += d * D.row(i);
    }
  return G;
}

MnlFit mnl_fit(const Eigen::MatrixXd& X, const std::vector<int>& labels,
               int n_classes, const MnlOptions& options) {
  const Eigen::Index n = X.rows(), k = X.cols();
  check_labels(labels, n_classes, n);
  const Eigen::Index p = (n_classes - 1) * (k + 1);
  if (n <= p)
    throw Error(ErrorCode::bad_spec,
                "need n > (J-1)(k+1) observations for the logit");

  const Eigen::MatrixXd D = with_intercept(X);
  MnlFit fit;
  fit.coefficients = Eigen::MatrixXd::Zero(n_classes - 1, k + 1);
  fit.log_likelihood = mnl_loglik(X, labels, n_classes, fit.coefficients);

  bool stalled = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    fit.iterations = it;
    const Eigen::MatrixXd G =
        mnl_gradient(X, labels, n_classes, fit.coefficients);
    fit.gradient_norm = G.cwiseAbs().maxCoeff();
    if (fit.gradient_norm < options.tolerance) {
      // a maximum at zero likelihood means every class is fitted
      // perfectly, i.e. the data are separated and the MLE diverges
      if (fit.log_likelihood > -1e-6)
        throw Error(ErrorCode::separation,
                    "log-likelihood saturated at zero; classes appear "
                    "perfectly separated");
      fit.converged = true;
      return fit;
    }

    // Hessian of the log-likelihood, block ((j,a),(m,b)):
    //   -sum_i p_ij (1{j=m} - p_im) D_ia D_ib
    const Eigen::MatrixXd P = softmax_probs(D, fit.coefficients);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
    for (int j = 2; j <= n_classes; ++j)
      for (int m = 2; m <= n_classes; ++m) {
        Eigen::VectorXd s(n);
        for (Eigen::Index i = 0; i < n; ++i)
          s(i) = P(i, j - 1) * ((j == m ? 1.0 : 0.0) - P(i, m - 1));
        H.block((j - 2) * (k + 1), (m - 2) * (k + 1), k + 1, k + 1) -=
            D.transpose() * s.asDiagonal() * D;
      }

    Eigen::VectorXd g(p);
    for (int j = 0; j < n_classes - 1; ++j)
      g.segment(j * (k + 1), k + 1) = G.row(j).transpose();
    // small ridge keeps the solve well-posed near separation
    H.diagonal().array() -= 1e-10;
    const Eigen::VectorXd step = (-H).ldlt().solve(g);

    // step halving: accept the first step that improves the likelihood
    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half, scale /= 2.0) {
      Eigen::MatrixXd trial = fit.coefficients;
      for (int j = 0; j < n_classes - 1; ++j)
        trial.row(j) += scale * step.segment(j * (k + 1), k + 1).transpose();
      const double ll = mnl_loglik(X, labels, n_classes, trial);
      if (ll > fit.log_likelihood || (half == 39 && ll == fit.log_likelihood)) {
        stalled = ll - fit.log_likelihood <=
                  1e-13 * (1.0 + std::abs(fit.log_likelihood));
        fit.coefficients = trial;
        fit.log_likelihood = ll;
        accepted = true;
        break;
      }
    }
    if (!accepted || stalled) {
      // stationary up to floating-point resolution
      break;
    }
    if (fit.coefficients.norm() > options.divergence_norm)
      throw Error(ErrorCode::separation,
                  "coefficients diverging; classes appear perfectly "
                  "separated");
  }

  // same saturation test on the stalled path
  if (fit.log_likelihood > -1e-6)
    throw Error(ErrorCode::separation,
                "log-likelihood saturated at zero; classes appear "
                "perfectly separated");

  const Eigen::MatrixXd G =
      mnl_gradient(X, labels, n_classes, fit.coefficients);
  fit.gradient_norm = G.cwiseAbs().maxCoeff();
  // once the likelihood can no longer improve in double precision, a
  // near-zero gradient is as converged as the arithmetic allows; the
  // gradient is a sum over n scores, so the stall bound scales with n
  fit.converged =
      fit.gradient_norm < options.tolerance ||
      (stalled && fit.gradient_norm < 1e-7 * static_cast<double>(n));
  return fit;
}

Eigen::MatrixXd mnl_predict(const MnlFit& fit, const Eigen::MatrixXd& X) {
  if (X.cols() + 1 != fit.coefficients.cols())
    throw Error(ErrorCode::bad_spec,
                "covariate dimension mismatch: fit expects " +
                    std::to_string(fit.coefficients.cols() - 1) +
                    " columns, got " + std::to_string(X.cols()));
  return softmax_probs(with_intercept(X), fit.coefficients);
}

}  // namespace ipw
