#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnpl/model.hpp"

namespace bnpl {

// Training-set statistics needed to predict on the original scale:
// y_hat = (x - x_means)' beta + y_mean.
struct Centering {
  Eigen::VectorXd x_means;
  double y_mean = 0.0;

  static Centering of(const Dataset& data) { return {data.x_means, data.y_mean}; }
  static Centering none(Eigen::Index p) { return {Eigen::VectorXd::Zero(p), 0.0}; }
};

// Mean over coefficients of the squared estimation error.
double mse(const Eigen::VectorXd& beta_true, const Eigen::VectorXd& beta_hat);

// Fraction of coefficients whose sign (with sign(0) = 0) matches.
double selection_accuracy(const Eigen::VectorXd& beta_true, const Eigen::VectorXd& beta_hat);

Eigen::VectorXd predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                        const Centering& centering);

double mspe(const Eigen::VectorXd& test_y, const Eigen::MatrixXd& test_X,
            const Eigen::VectorXd& beta_hat, const Centering& centering);

// Mean over test points of log((1/S) sum_s N(y_i | x_i' beta_s, sigma2_s)),
// evaluated with log-sum-exp.
double elppd(const Eigen::VectorXd& test_y, const Eigen::MatrixXd& test_X,
             const PosteriorDraws& draws, const Centering& centering);

// S x n matrix of fitted values, one row per retained draw.
Eigen::MatrixXd fitted_draws(const PosteriorDraws& draws, const Eigen::MatrixXd& X,
                             const Centering& centering);

struct FittedDensity {
  double value = 0.0;
  double bandwidth = 0.0;      // mean Silverman bandwidth across observations
  Eigen::VectorXd densities;   // per observation
  Eigen::VectorXd bandwidths;  // per observation
  std::vector<std::string> warnings;
};

// Density returned for an observation whose fitted draws are all identical
// and equal to the reference value.
inline constexpr double kPointMassDensityCap = 1e12;

// Average over observations of a Gaussian KDE (Silverman bandwidth) of the
// fitted-value draws, evaluated at the reference fit.
FittedDensity avg_fitted_density(const Eigen::MatrixXd& fit_draws,
                                 const Eigen::VectorXd& reference_fits);

struct ReplicateMetrics {
  double mse = 0.0;
  double sel_acc = 0.0;
  double mspe = 0.0;
  double elppd = 0.0;
  std::optional<double> avg_fitted_density;
};

struct EvalReport {
  double mse = 0.0;
  double sel_acc = 0.0;
  double mspe = 0.0;
  double elppd = 0.0;
  std::optional<double> avg_fitted_density;
  std::vector<ReplicateMetrics> replicates;
};

// Arithmetic mean of each metric over replicates.
EvalReport aggregate(std::vector<ReplicateMetrics> replicates);

}  // namespace bnpl
