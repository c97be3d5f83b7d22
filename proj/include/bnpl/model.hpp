#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bnpl/rng.hpp"

namespace bnpl {

enum class Variant {
  kNonparametric,  // BNP-L: Dirichlet process prior on the shrinkage parameters
  kBayesLasso,     // B-L: one shared shrinkage parameter
  kAdaptive,       // BA-L: independent per-coefficient shrinkage parameters
};

// Short CLI names: "bnpl", "bl", "bal".
std::string_view variant_name(Variant v);
// Display labels: "BNP-L", "B-L", "BA-L".
std::string_view variant_label(Variant v);
Variant parse_variant(std::string_view name);

// Centered (and optionally standardized) regression data. Immutable once
// prepared; shared read-only by concurrent chains.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  Eigen::VectorXd x_means;
  Eigen::VectorXd x_scales;  // all ones unless standardized
  double y_mean = 0.0;
  // Degrees of freedom removed by centering (1 when the intercept was
  // integrated out, 0 for raw data used by the simulation tests).
  int absorbed_dof = 1;
  bool standardized = false;
  // Columns that are identically zero after centering.
  std::vector<Eigen::Index> constant_columns;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

// Centers y and every column of X, recording the means. When standardize is
// set, columns are also scaled to unit sample standard deviation.
Dataset prepare(const Eigen::VectorXd& raw_y, const Eigen::MatrixXd& raw_X,
                bool standardize = false);

// Wraps uncentered data as-is (absorbed_dof = 0). Used when data are
// simulated directly from the likelihood without an intercept.
Dataset raw_dataset(Eigen::VectorXd y, Eigen::MatrixXd X);

struct Hyperparams {
  double a = 0.1;       // base-measure shape
  double b = 0.1;       // base-measure rate
  double alpha = 0.01;  // DP concentration
  int n_iter = 6000;
  int burn_in = 1000;
  std::uint64_t seed = 1;
  Variant variant = Variant::kNonparametric;
  // Optional proper InvGamma(shape, scale) prior on sigma^2. Zero for both
  // gives the default p(sigma^2) ∝ 1 / sigma^2.
  double sigma2_prior_shape = 0.0;
  double sigma2_prior_scale = 0.0;
  // Start beta at a ridge solution instead of zero.
  bool ridge_start = false;

  // Throws ConfigError on any violated constraint.
  void validate() const;
  int retained() const { return n_iter - burn_in; }
};

// Current values of every sampled quantity. Cluster labels are 0-based.
struct ChainState {
  Eigen::VectorXd beta;
  Eigen::VectorXd tau2;
  double sigma2 = 1.0;
  std::vector<int> assignment;      // r_j, cluster of coefficient j
  std::vector<double> lambda2_star; // distinct cluster values
  std::vector<int> cluster_size;    // members per cluster

  int clusters() const { return static_cast<int>(lambda2_star.size()); }
  double lambda2(Eigen::Index j) const { return lambda2_star[assignment[j]]; }

  // Throws std::logic_error if any invariant is broken: labels in range,
  // sizes consistent and nonzero, all of tau2, lambda2_star, sigma2 positive.
  void check_invariants() const;
};

ChainState init_state(const Dataset& data, const Hyperparams& hyper, RngStream& rng);

struct PosteriorDraws {
  Variant variant = Variant::kNonparametric;
  Eigen::MatrixXd beta;     // S x p
  Eigen::VectorXd sigma2;   // S
  Eigen::MatrixXd lambda2;  // S x p, per-coefficient shrinkage
  std::vector<int> k_trace; // clusters per retained sweep
  double wall_seconds = 0.0;

  Eigen::Index draws() const { return beta.rows(); }
  Eigen::Index p() const { return beta.cols(); }
};

}  // namespace bnpl
