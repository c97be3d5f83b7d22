#pragma once

#include <Eigen/Dense>

#include "bnpl/rng.hpp"

namespace bnpl {

// Gamma in the shape/rate parameterization: mean = shape / rate.
struct GammaParams {
  double shape;
  double rate;

  GammaParams(double shape, double rate);
};

// Inverse Gaussian in the mean/shape parameterization:
//
//   f(x) = sqrt(shape / (2 pi x^3)) exp(-shape (x - mean)^2 / (2 mean^2 x))
//
// with E[x] = mean and Var[x] = mean^3 / shape.
struct InvGaussParams {
  double mean;
  double shape;

  InvGaussParams(double mean, double shape);
};

double sample_gamma(const GammaParams& params, RngStream& rng);

// Michael, Schucany & Haas transformation with one uniform acceptance step.
double sample_inverse_gaussian(const InvGaussParams& params, RngStream& rng);

// 1 / Gamma(shape, rate = scale). Mean scale / (shape - 1) for shape > 1.
double sample_inv_gamma(double shape, double scale, RngStream& rng);

// Draws from N(precision^{-1} linear, precision^{-1}) using one Cholesky
// factorization and two triangular solves. On a failed factorization the
// diagonal is jittered by 1e-10 * trace / p and the factorization retried
// once; a second failure throws FactorizationError with the pivot index.
Eigen::VectorXd sample_mvn_precision(const Eigen::MatrixXd& precision,
                                     const Eigen::VectorXd& linear, RngStream& rng);

// Double exponential (Laplace) density (rate / 2) exp(-rate |x|).
double de_density(double x, double rate);
double log_de_density(double x, double rate);

double log_normal_density(double x, double mean, double variance);

}  // namespace bnpl
