#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ipw/panel.hpp"
#include "ipw/treatment.hpp"

namespace ipw {

// Synthetic data-generating process with known effects.
//
// Per row i (all draws i.i.d.):
//   x_i ~ N(0, I_k), z_i ~ N(0, I_2)
//   q_i ~ multinomial logit on (1, x_i) with prop_coeffs
//   g_i = g_scale * m(q_i), m = (-2, -0.5, 0.5, 2) for J = 4
//   y_i      = b'z_i + theta * g_i + u_i              (log output level)
//   y_next_i = b'z_i + mu_{q_i} + c'x_i + eps_i
// with b fixed, u ~ N(0, level_noise_sd^2), eps ~ N(0, noise_sd^2).
// theta > 0 puts the policy growth mechanically into the output level,
// which contaminates the y_{t+1} - y_t response but not the forecast-
// based one.
struct DgpSpec {
  int n = 2000;
  int n_classes = 4;
  Eigen::VectorXd mu;           // length J
  Eigen::MatrixXd prop_coeffs;  // (J-1) x (k+1)
  double noise_sd = 1.0;
  double theta = 0.0;
  std::uint64_t seed = 0;

  Eigen::VectorXd outcome_x_coeffs;  // c, length k; empty = zero
  double g_scale = 1.0;
  double level_noise_sd = 0.1;

  void validate() const;  // throws Error(bad_spec)
  static DgpSpec default_spec();
};

struct McSample {
  Panel panel;
  TreatmentAssignment assignment;  // the drawn classes
  Eigen::MatrixXd true_probs;      // n x J
};

McSample simulate_dgp(const DgpSpec& spec);

// mu when theta = 0; otherwise a brute-force expectation of
// y_{t+1}(j) - yhat_t over 10^6 draws.
Eigen::VectorXd true_effects(const DgpSpec& spec);

struct McReport {
  int replications = 0;
  int failed = 0;
  Eigen::VectorXd truth;             // J
  Eigen::VectorXd mean_bias_a2;      // J, WLS(A2) cell means
  Eigen::VectorXd mean_bias_a1;      // J, WLS(A1) cell means
  Eigen::VectorXd coverage_a2;       // J
  Eigen::VectorXd coverage_a1;       // J
  Eigen::VectorXd mc_std_error_a2;   // J, sd(beta)/sqrt(R)
  Eigen::VectorXd mc_std_error_a1;   // J
  Eigen::VectorXd frac_a1_worse;     // J, share |bias_A1| > |bias_A2|

  std::string csv() const;
  std::string json() const;
};

// R independent panels through the full pipeline (classify, baseline,
// propensity, WLS(A2) and WLS(A1) cell means). Per-replication streams
// derive from (seed, replication index) via splitmix64, so the report
// is reproducible and order-insensitive. Requires R >= 50 and J = 4.
McReport run_experiment(const DgpSpec& spec, int replications);

// splitmix64 step; the documented replication-stream rule is
// stream(rep) = splitmix64(base_seed ^ splitmix64(rep + 1)).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t replication_seed(std::uint64_t base_seed, int replication);

}  // namespace ipw
