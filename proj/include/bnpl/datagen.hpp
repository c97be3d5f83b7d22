#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "bnpl/rng.hpp"

namespace bnpl {

// Simulation design: AR(1)-correlated Gaussian predictors and a sparse
// coefficient vector with a block of strong and a block of weak signals.
// Defaults reproduce the full-size study (p = 200, 5 x 10, 15 x 2).
struct SimDesign {
  int n = 100;
  int p = 200;
  double rho = 0.3;
  int n_strong = 5;
  double strong_value = 10.0;
  int n_weak = 15;
  double weak_value = 2.0;
  double noise_sd = 1.0;
  int n_test = 1000;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

// Rows are i.i.d. N_p(0, Sigma) with Sigma_ij = rho^|i-j|, built column by
// column as x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j.
Eigen::MatrixXd gen_design_matrix(const SimDesign& design, int rows, RngStream& rng);
inline Eigen::MatrixXd gen_design_matrix(const SimDesign& design, RngStream& rng) {
  return gen_design_matrix(design, design.n, rng);
}

Eigen::VectorXd gen_beta_true(const SimDesign& design);

// y = X beta + eps, eps_i ~ N(0, noise_sd^2).
Eigen::VectorXd gen_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta_true,
                             double noise_sd, RngStream& rng);

// Stream ids used for simulated replicate l; train and test never share one.
inline std::uint64_t train_stream(std::uint64_t replicate) { return 2 * replicate + 1; }
inline std::uint64_t test_stream(std::uint64_t replicate) { return 2 * replicate + 2; }

}  // namespace bnpl
