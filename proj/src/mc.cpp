#include "ipw/mc.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "ipw/baseline.hpp"
#include "ipw/effects.hpp"
#include "ipw/errors.hpp"
#include "ipw/propensity.hpp"

namespace ipw {

namespace {

// Fixed forecastable structure of the synthetic output level.
const Eigen::Vector2d kZLoadings(0.5, -0.5);

double class_g_value(int label, int n_classes) {
  if (n_classes == 4) {
    static const double m[4] = {-2.0, -0.5, 0.5, 2.0};
    return m[label - 1];
  }
  return static_cast<double>(label) -
         (static_cast<double>(n_classes) + 1.0) / 2.0;
}

int draw_class(const Eigen::MatrixXd& prop_coeffs, const Eigen::VectorXd& x,
               double uniform, Eigen::VectorXd* probs_out) {
  const int J = static_cast<int>(prop_coeffs.rows()) + 1;
  Eigen::VectorXd scores(J);
  scores(0) = 0.0;
  for (int j = 1; j < J; ++j)
    scores(j) = prop_coeffs(j - 1, 0) +
                prop_coeffs.row(j - 1).tail(x.size()).dot(x);
  const double mx = scores.maxCoeff();
  Eigen::VectorXd p = (scores.array() - mx).exp();
  p /= p.sum();
  if (probs_out) *probs_out = p;
  double cum = 0.0;
  for (int j = 0; j < J; ++j) {
    cum += p(j);
    if (uniform <= cum) return j + 1;
  }
  return J;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t base_seed, int replication) {
  return splitmix64(base_seed ^
                    splitmix64(static_cast<std::uint64_t>(replication) + 1));
}

void DgpSpec::validate() const {
  if (n_classes < 2) throw Error(ErrorCode::bad_spec, "need J >= 2");
  if (n < 10 * n_classes)
    throw Error(ErrorCode::bad_spec,
                "need n >= 10 J (n=" + std::to_string(n) + ")");
  if (mu.size() != n_classes)
    throw Error(ErrorCode::bad_spec, "mu must have J entries");
  if (prop_coeffs.rows() != n_classes - 1 || prop_coeffs.cols() < 1)
    throw Error(ErrorCode::bad_spec, "prop_coeffs must be (J-1) x (k+1)");
  if (!(noise_sd > 0.0) || !(level_noise_sd > 0.0))
    throw Error(ErrorCode::bad_spec, "noise sds must be positive");
  if (!(g_scale > 0.0)) throw Error(ErrorCode::bad_spec, "g_scale > 0");
  if (outcome_x_coeffs.size() != 0 &&
      outcome_x_coeffs.size() != prop_coeffs.cols() - 1)
    throw Error(ErrorCode::bad_spec, "outcome_x_coeffs must have k entries");
}

DgpSpec DgpSpec::default_spec() {
  DgpSpec spec;
  spec.mu = Eigen::Vector4d(-1.0, 0.0, 1.0, 2.0);
  spec.prop_coeffs.resize(3, 4);
  spec.prop_coeffs << 0.0, 0.2, 0.0, 0.0,   // class 2
                      0.0, 0.4, 0.0, 0.0,   // class 3
                      0.0, 0.6, 0.0, 0.0;   // class 4
  return spec;
}

McSample simulate_dgp(const DgpSpec& spec) {
  spec.validate();
  const int n = spec.n, J = spec.n_classes;
  const int k = static_cast<int>(spec.prop_coeffs.cols()) - 1;
  Eigen::VectorXd c = spec.outcome_x_coeffs;
  if (c.size() == 0) c = Eigen::VectorXd::Zero(k);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  McSample sample;
  sample.panel.y.resize(n);
  sample.panel.y_next.resize(n);
  sample.panel.g.resize(n);
  sample.panel.x.resize(n, k);
  sample.panel.z.resize(n, 2);
  sample.true_probs.resize(n, J);
  sample.assignment.labels.reserve(static_cast<std::size_t>(n));
  sample.panel.t.reserve(static_cast<std::size_t>(n));

  Quarter t{1900, 1};
  for (int i = 0; i < n; ++i, t = t.next()) {
    sample.panel.t.push_back(t);
    Eigen::VectorXd x(k);
    for (int a = 0; a < k; ++a) x(a) = normal(rng);
    Eigen::Vector2d z(normal(rng), normal(rng));

    Eigen::VectorXd probs;
    const int q = draw_class(spec.prop_coeffs, x, uniform(rng), &probs);
    const double g = spec.g_scale * class_g_value(q, J);
    const double u = spec.level_noise_sd * normal(rng);
    const double eps = spec.noise_sd * normal(rng);
    const double zpart = kZLoadings.dot(z);

    sample.panel.x.row(i) = x.transpose();
    sample.panel.z.row(i) = z.transpose();
    sample.panel.g(i) = g;
    sample.panel.y(i) = zpart + spec.theta * g + u;
    sample.panel.y_next(i) = zpart + spec.mu(q - 1) + c.dot(x) + eps;
    sample.true_probs.row(i) = probs.transpose();
    sample.assignment.labels.push_back(q);
  }
  {
    // sigma of the realized g, for parity with classify()
    const double mean = sample.panel.g.mean();
    sample.assignment.sigma = std::sqrt(
        (sample.panel.g.array() - mean).square().sum() / (n - 1));
  }
  sample.assignment.dummies = dummies(sample.assignment.labels, J);
  return sample;
}

Eigen::VectorXd true_effects(const DgpSpec& spec) {
  spec.validate();
  if (spec.theta == 0.0) return spec.mu;

  // E[y_{t+1}(j) - yhat_t]: the population forecast of y_t from z
  // carries (theta E[g] + E[u]) in its intercept, so the estimand is
  // mu_j + c'E[x] - theta E[g], evaluated by simulation.
  const int k = static_cast<int>(spec.prop_coeffs.cols()) - 1;
  Eigen::VectorXd c = spec.outcome_x_coeffs;
  if (c.size() == 0) c = Eigen::VectorXd::Zero(k);

  constexpr int kDraws = 1000000;
  std::mt19937_64 rng(splitmix64(spec.seed ^ 0x7275746855ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  double g_sum = 0.0, cx_sum = 0.0;
  Eigen::VectorXd x(k);
  for (int i = 0; i < kDraws; ++i) {
    for (int a = 0; a < k; ++a) x(a) = normal(rng);
    const int q = draw_class(spec.prop_coeffs, x, uniform(rng), nullptr);
    g_sum += spec.g_scale * class_g_value(q, spec.n_classes);
    cx_sum += c.dot(x);
  }
  const double shift = cx_sum / kDraws - spec.theta * (g_sum / kDraws);
  return spec.mu.array() + shift;
}

McReport run_experiment(const DgpSpec& spec, int replications) {
  spec.validate();
  if (replications < 50)
    throw Error(ErrorCode::bad_spec,
                "need at least 50 replications, got " +
                    std::to_string(replications));
  if (spec.n_classes != kTreatmentClasses)
    throw Error(ErrorCode::bad_spec,
                "the estimation pipeline requires J = 4");

  const int J = spec.n_classes;
  const Eigen::VectorXd truth = true_effects(spec);

  struct RepResult {
    bool ok = false;
    Eigen::VectorXd beta_a2, se_a2, beta_a1, se_a1;
  };
  std::vector<RepResult> reps(static_cast<std::size_t>(replications));

  for (int r = 0; r < replications; ++r) {
    DgpSpec rep_spec = spec;
    rep_spec.seed = replication_seed(spec.seed, r);
    auto& out = reps[static_cast<std::size_t>(r)];
    try {
      const McSample sample = simulate_dgp(rep_spec);
      const TreatmentAssignment assignment = classify(sample.panel.g);
      const BaselineFit baseline =
          fit_baseline(sample.panel, BaselineMode::full_sample);
      const PropensityFit propensity =
          fit_gps(sample.panel.x, assignment, 0.01);
      // heteroskedasticity-robust errors: the classical WLS variance
      // understates the spread of inverse-probability-weighted means
      // when the weights themselves vary within a class
      EstimateOptions options;
      options.robust_se = true;
      const EstimationResult a2 =
          estimate(sample.panel, baseline, propensity, Variant::wls_a2,
                   Parameterization::cell_means, options);
      const EstimationResult a1 =
          estimate(sample.panel, baseline, propensity, Variant::wls_a1,
                   Parameterization::cell_means, options);
      out.beta_a2 = Eigen::Map<const Eigen::Vector4d>(a2.betas.data());
      out.se_a2 = Eigen::Map<const Eigen::Vector4d>(a2.std_errors.data());
      out.beta_a1 = Eigen::Map<const Eigen::Vector4d>(a1.betas.data());
      out.se_a1 = Eigen::Map<const Eigen::Vector4d>(a1.std_errors.data());
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
  }

  McReport report;
  report.replications = replications;
  report.truth = truth;
  report.mean_bias_a2 = Eigen::VectorXd::Zero(J);
  report.mean_bias_a1 = Eigen::VectorXd::Zero(J);
  report.coverage_a2 = Eigen::VectorXd::Zero(J);
  report.coverage_a1 = Eigen::VectorXd::Zero(J);
  report.mc_std_error_a2 = Eigen::VectorXd::Zero(J);
  report.mc_std_error_a1 = Eigen::VectorXd::Zero(J);
  report.frac_a1_worse = Eigen::VectorXd::Zero(J);

  int ok_count = 0;
  for (const auto& rep : reps) ok_count += rep.ok ? 1 : 0;
  report.failed = replications - ok_count;
  if (ok_count == 0) return report;

  const boost::math::students_t tdist(static_cast<double>(spec.n - J));
  const double tcrit =
      boost::math::quantile(tdist, 0.975);

  for (int j = 0; j < J; ++j) {
    double sum_a2 = 0.0, sum_a1 = 0.0;
    for (const auto& rep : reps) {
      if (!rep.ok) continue;
      sum_a2 += rep.beta_a2(j);
      sum_a1 += rep.beta_a1(j);
      if (std::abs(rep.beta_a2(j) - truth(j)) <= tcrit * rep.se_a2(j))
        report.coverage_a2(j) += 1.0;
      if (std::abs(rep.beta_a1(j) - truth(j)) <= tcrit * rep.se_a1(j))
        report.coverage_a1(j) += 1.0;
      if (std::abs(rep.beta_a1(j) - truth(j)) >
          std::abs(rep.beta_a2(j) - truth(j)))
        report.frac_a1_worse(j) += 1.0;
    }
    const double mean_a2 = sum_a2 / ok_count, mean_a1 = sum_a1 / ok_count;
    report.mean_bias_a2(j) = mean_a2 - truth(j);
    report.mean_bias_a1(j) = mean_a1 - truth(j);
    report.coverage_a2(j) /= ok_count;
    report.coverage_a1(j) /= ok_count;
    report.frac_a1_worse(j) /= ok_count;

    double var_a2 = 0.0, var_a1 = 0.0;
    for (const auto& rep : reps) {
      if (!rep.ok) continue;
      var_a2 += (rep.beta_a2(j) - mean_a2) * (rep.beta_a2(j) - mean_a2);
      var_a1 += (rep.beta_a1(j) - mean_a1) * (rep.beta_a1(j) - mean_a1);
    }
    if (ok_count > 1) {
      report.mc_std_error_a2(j) =
          std::sqrt(var_a2 / (ok_count - 1) / ok_count);
      report.mc_std_error_a1(j) =
          std::sqrt(var_a1 / (ok_count - 1) / ok_count);
    }
  }
  return report;
}

std::string McReport::csv() const {
  std::ostringstream out;
  out << "class,truth,mean_bias_a2,mean_bias_a1,coverage_a2,coverage_a1,"
         "mc_std_error_a2,mc_std_error_a1,frac_a1_worse\n";
  char buf[40];
  auto full = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (Eigen::Index j = 0; j < truth.size(); ++j)
    out << (j + 1) << ',' << full(truth(j)) << ',' << full(mean_bias_a2(j))
        << ',' << full(mean_bias_a1(j)) << ',' << full(coverage_a2(j)) << ','
        << full(coverage_a1(j)) << ',' << full(mc_std_error_a2(j)) << ','
        << full(mc_std_error_a1(j)) << ',' << full(frac_a1_worse(j)) << '\n';
  out << "replications," << replications << "\nfailed," << failed << '\n';
  return out.str();
}

std::string McReport::json() const {
  nlohmann::json doc;
  doc["replications"] = replications;
  doc["failed"] = failed;
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  doc["truth"] = vec(truth);
  doc["mean_bias_a2"] = vec(mean_bias_a2);
  doc["mean_bias_a1"] = vec(mean_bias_a1);
  doc["coverage_a2"] = vec(coverage_a2);
  doc["coverage_a1"] = vec(coverage_a1);
  doc["mc_std_error_a2"] = vec(mc_std_error_a2);
  doc["mc_std_error_a1"] = vec(mc_std_error_a1);
  doc["frac_a1_worse"] = vec(frac_a1_worse);
  return doc.dump(2) + "\n";
}

}  // namespace ipw
