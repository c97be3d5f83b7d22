#include "bnpl/datagen.hpp"

#include <cmath>
#include <string>

#include "bnpl/error.hpp"

namespace bnpl {

void SimDesign::validate() const {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (p < 1) throw ConfigError("p must be at least 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
  if (n_strong < 0 || n_weak < 0) throw ConfigError("signal counts must be nonnegative");
  if (n_strong + n_weak > p) {
    throw ConfigError("n_strong + n_weak (" + std::to_string(n_strong + n_weak) +
                      ") exceeds p (" + std::to_string(p) + ")");
  }
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw ConfigError("noise_sd must be nonnegative");
  }
  if (n_test < 0) throw ConfigError("n_test must be nonnegative");
}

Eigen::MatrixXd gen_design_matrix(const SimDesign& design, int rows, RngStream& rng) {
  const double rho = design.rho;
  const double innovation = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd X(rows, design.p);
  for (int i = 0; i < rows; ++i) {
    double prev = rng.normal();
    X(i, 0) = prev;
    for (int j = 1; j < design.p; ++j) {
      prev = rho * prev + innovation * rng.normal();
      X(i, j) = prev;
    }
  }
  return X;
}

Eigen::VectorXd gen_beta_true(const SimDesign& design) {
  if (design.n_strong < 0 || design.n_weak < 0 || design.n_strong + design.n_weak > design.p) {
    throw ConfigError("signal counts exceed p");
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.p);
  beta.head(design.n_strong).setConstant(design.strong_value);
  beta.segment(design.n_strong, design.n_weak).setConstant(design.weak_value);
  return beta;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta_true,
                             double noise_sd, RngStream& rng) {
  if (X.cols() != beta_true.size()) {
    throw DataError("gen_response: design has " + std::to_string(X.cols()) +
                    " columns but beta has " + std::to_string(beta_true.size()));
  }
  Eigen::VectorXd y = X * beta_true;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise_sd * rng.normal();
  return y;
}

}  // namespace bnpl
