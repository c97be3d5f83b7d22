#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bnpl/model.hpp"
#include "bnpl/rng.hpp"

namespace bnpl {

// Cross products reused by every beta update.
struct Gram {
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;

  static Gram of(const Dataset& data);
};

// Assignment probabilities for one coefficient: phi0 opens a new cluster,
// phi[k] joins existing cluster k.
struct ClusterWeights {
  double phi0 = 0.0;
  std::vector<double> phi;
  bool normalized = false;
};

// beta | y, tau2, sigma2 ~ N(Phi^{-1} X'y / sigma2, Phi^{-1}),
// Phi = X'X / sigma2 + diag(1 / tau2).
Eigen::VectorXd update_beta(const ChainState& state, const Gram& gram, RngStream& rng);

// 1 / tau2_j ~ InverseGaussian(sqrt(lambda2_j / beta_j^2), lambda2_j).
Eigen::VectorXd update_tau2(const ChainState& state, RngStream& rng);

// sigma2 ~ InvGamma((n - absorbed_dof) / 2 + shape0, ||y - X beta||^2 / 2 + scale0).
double update_sigma2(const ChainState& state, const Dataset& data, const Hyperparams& hyper,
                     RngStream& rng);

// Unnormalized new-cluster weight alpha a b^a / (2 (b + tau2/2)^(a+1)).
double log_phi0(double tau2_j, const Hyperparams& hyper);
double compute_phi0(double tau2_j, const Hyperparams& hyper);

// Unnormalized weight size_excl * (lambda2/2) exp(-lambda2 tau2 / 2) for an
// existing cluster; zero (log: -inf) for an empty cluster.
double log_phik(double tau2_j, double lambda2_star_k, int size_excl);
double compute_phik(double tau2_j, double lambda2_star_k, int size_excl);

// Normalized weights for coefficient j given the other coefficients'
// cluster sizes (j already removed).
ClusterWeights cluster_weights(double tau2_j, const std::vector<double>& lambda2_star,
                               const std::vector<int>& size_excl, const Hyperparams& hyper);

// Inverts the cumulative weights with a single uniform; ties go to the lower
// index. Returns -1 for a new cluster, otherwise the existing cluster index.
int draw_assignment(const ClusterWeights& weights, double u);

// Polya-urn reassignment of every coefficient followed by a conjugate
// refresh of each cluster value. Requires the BNP-L variant.
void update_clusters(ChainState& state, const Hyperparams& hyper, RngStream& rng);

// lambda2*_k ~ Gamma(a + p_k, b + sum_{j in k} tau2_j / 2) for every cluster.
void refresh_cluster_values(ChainState& state, const Hyperparams& hyper, RngStream& rng);

// B-L: shared lambda2 ~ Gamma(a + p, b + sum tau2 / 2).
double update_lambda_bl(const ChainState& state, const Hyperparams& hyper, RngStream& rng);

// BA-L: lambda2_j ~ Gamma(a + 1, b + tau2_j / 2) independently.
Eigen::VectorXd update_lambda_bal(const ChainState& state, const Hyperparams& hyper,
                                  RngStream& rng);

// One full sweep in the order lambda-step, tau2, beta, sigma2.
void gibbs_sweep(ChainState& state, const Dataset& data, const Gram& gram,
                 const Hyperparams& hyper, RngStream& rng);

// Runs hyper.n_iter sweeps from init_state and keeps the post-burn-in draws.
// The chain's random stream is (hyper.seed, stream_id).
PosteriorDraws run_chain(const Dataset& data, const Hyperparams& hyper,
                         std::uint64_t stream_id = 0);

}  // namespace bnpl
