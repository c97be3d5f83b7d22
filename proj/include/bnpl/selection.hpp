#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bnpl/model.hpp"

namespace bnpl {

struct SelectionResult {
  Eigen::VectorXd beta_hat;
  std::vector<bool> included;
  Eigen::VectorXd neighborhood_prob;
  Eigen::VectorXd posterior_mean;
  Eigen::VectorXd posterior_sd;
};

// Scaled-neighborhood selection. For each coefficient the neighborhood is
// [-sd, sd] with sd the posterior standard deviation (S - 1 denominator);
// a coefficient is zeroed when strictly more than half of its draws fall in
// it, otherwise it is estimated by its posterior mean.
SelectionResult select(const Eigen::MatrixXd& beta_draws);
SelectionResult select(const PosteriorDraws& draws);

struct QuantileTable {
  std::vector<double> levels;
  Eigen::MatrixXd quantiles;  // p x levels
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

// Empirical quantiles (linear interpolation between order statistics) of
// each coefficient's draws.
QuantileTable posterior_summary(const Eigen::MatrixXd& beta_draws,
                                const std::vector<double>& levels);
QuantileTable posterior_summary(const PosteriorDraws& draws, const std::vector<double>& levels);

}  // namespace bnpl
