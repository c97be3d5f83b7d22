#include "bnpl/gibbs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "bnpl/distributions.hpp"
#include "bnpl/error.hpp"

namespace bnpl {

namespace {

constexpr double kBetaFloor = 1e-12;
constexpr double kGammaFloor = 1e-300;

}  // namespace

Gram Gram::of(const Dataset& data) {
  Gram g;
  g.xtx = data.X.transpose() * data.X;
  g.xty = data.X.transpose() * data.y;
  return g;
}

Eigen::VectorXd update_beta(const ChainState& state, const Gram& gram, RngStream& rng) {
  const double inv_sigma2 = 1.0 / state.sigma2;
  Eigen::MatrixXd precision = gram.xtx * inv_sigma2;
  precision.diagonal() += state.tau2.cwiseInverse();
  return sample_mvn_precision(precision, gram.xty * inv_sigma2, rng);
}

Eigen::VectorXd update_tau2(const ChainState& state, RngStream& rng) {
  const Eigen::Index p = state.beta.size();
  Eigen::VectorXd tau2(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double lambda2 = state.lambda2(j);
    const double abs_beta = std::max(std::abs(state.beta(j)), kBetaFloor);
    const double mean = std::sqrt(lambda2) / abs_beta;
    const double gamma = sample_inverse_gaussian(InvGaussParams(mean, lambda2), rng);
    tau2(j) = 1.0 / std::max(gamma, kGammaFloor);
  }
  return tau2;
}

double update_sigma2(const ChainState& state, const Dataset& data, const Hyperparams& hyper,
                     RngStream& rng) {
  const double rss = (data.y - data.X * state.beta).squaredNorm();
  const double shape =
      0.5 * static_cast<double>(data.n() - data.absorbed_dof) + hyper.sigma2_prior_shape;
  const double scale = 0.5 * rss + hyper.sigma2_prior_scale;
  if (!(scale > 0.0)) {
    throw NumericalError("sigma^2 update: residual sum of squares is zero (n=" +
                         std::to_string(data.n()) + "); the fit interpolates the data");
  }
  return sample_inv_gamma(shape, scale, rng);
}

double log_phi0(double tau2_j, const Hyperparams& hyper) {
  const double a = hyper.a;
  const double b = hyper.b;
  return std::log(hyper.alpha) + std::log(a) + a * std::log(b) - std::log(2.0) -
         (a + 1.0) * std::log(b + 0.5 * tau2_j);
}

double compute_phi0(double tau2_j, const Hyperparams& hyper) {
  return std::exp(log_phi0(tau2_j, hyper));
}

double log_phik(double tau2_j, double lambda2_star_k, int size_excl) {
  if (size_excl <= 0) return -std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(size_excl)) + std::log(0.5 * lambda2_star_k) -
         0.5 * lambda2_star_k * tau2_j;
}

double compute_phik(double tau2_j, double lambda2_star_k, int size_excl) {
  return std::exp(log_phik(tau2_j, lambda2_star_k, size_excl));
}

ClusterWeights cluster_weights(double tau2_j, const std::vector<double>& lambda2_star,
                               const std::vector<int>& size_excl, const Hyperparams& hyper) {
  const std::size_t k_count = lambda2_star.size();
  ClusterWeights w;
  w.phi.resize(k_count);
  const double lw0 = log_phi0(tau2_j, hyper);
  double max_log = lw0;
  for (std::size_t k = 0; k < k_count; ++k) {
    w.phi[k] = log_phik(tau2_j, lambda2_star[k], size_excl[k]);
    max_log = std::max(max_log, w.phi[k]);
  }
  w.phi0 = std::exp(lw0 - max_log);
  double total = w.phi0;
  for (double& v : w.phi) {
    v = std::exp(v - max_log);
    total += v;
  }
  w.phi0 /= total;
  for (double& v : w.phi) v /= total;
  w.normalized = true;
  return w;
}

int draw_assignment(const ClusterWeights& weights, double u) {
  double cum = weights.phi0;
  if (u < cum) return -1;
  int last_positive = -1;
  for (std::size_t k = 0; k < weights.phi.size(); ++k) {
    if (weights.phi[k] <= 0.0) continue;
    cum += weights.phi[k];
    last_positive = static_cast<int>(k);
    if (u < cum) return last_positive;
  }
  // u landed in the rounding gap above the final cumulative sum.
  return last_positive;
}

void refresh_cluster_values(ChainState& state, const Hyperparams& hyper, RngStream& rng) {
  const int k_count = state.clusters();
  std::vector<double> tau2_sum(k_count, 0.0);
  for (std::size_t j = 0; j < state.assignment.size(); ++j) {
    tau2_sum[state.assignment[j]] += state.tau2(static_cast<Eigen::Index>(j));
  }
  for (int k = 0; k < k_count; ++k) {
    state.lambda2_star[k] = sample_gamma(
        GammaParams(hyper.a + state.cluster_size[k], hyper.b + 0.5 * tau2_sum[k]), rng);
  }
}

void update_clusters(ChainState& state, const Hyperparams& hyper, RngStream& rng) {
  const auto p = state.assignment.size();
  for (std::size_t j = 0; j < p; ++j) {
    const double tau2_j = state.tau2(static_cast<Eigen::Index>(j));
    const int old = state.assignment[j];
    if (--state.cluster_size[old] == 0) {
      // Drop the emptied cluster by moving the last cluster into its slot.
      const int last = state.clusters() - 1;
      if (old != last) {
        state.lambda2_star[old] = state.lambda2_star[last];
        state.cluster_size[old] = state.cluster_size[last];
        for (int& r : state.assignment) {
          if (r == last) r = old;
        }
      }
      state.lambda2_star.pop_back();
      state.cluster_size.pop_back();
    }

    const ClusterWeights w = cluster_weights(tau2_j, state.lambda2_star, state.cluster_size, hyper);
    const int chosen = draw_assignment(w, rng.uniform());
    if (chosen < 0) {
      state.lambda2_star.push_back(
          sample_gamma(GammaParams(hyper.a + 1.0, hyper.b + 0.5 * tau2_j), rng));
      state.cluster_size.push_back(1);
      state.assignment[j] = state.clusters() - 1;
    } else {
      state.assignment[j] = chosen;
      ++state.cluster_size[chosen];
    }
  }
  refresh_cluster_values(state, hyper, rng);
}

double update_lambda_bl(const ChainState& state, const Hyperparams& hyper, RngStream& rng) {
  const double p = static_cast<double>(state.tau2.size());
  return sample_gamma(GammaParams(hyper.a + p, hyper.b + 0.5 * state.tau2.sum()), rng);
}

Eigen::VectorXd update_lambda_bal(const ChainState& state, const Hyperparams& hyper,
                                  RngStream& rng) {
  const Eigen::Index p = state.tau2.size();
  Eigen::VectorXd lambda2(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    lambda2(j) = sample_gamma(GammaParams(hyper.a + 1.0, hyper.b + 0.5 * state.tau2(j)), rng);
  }
  return lambda2;
}

void gibbs_sweep(ChainState& state, const Dataset& data, const Gram& gram,
                 const Hyperparams& hyper, RngStream& rng) {
  switch (hyper.variant) {
    case Variant::kNonparametric:
      update_clusters(state, hyper, rng);
      break;
    case Variant::kBayesLasso:
      state.lambda2_star[0] = update_lambda_bl(state, hyper, rng);
      break;
    case Variant::kAdaptive: {
      // Coefficient j is pinned to singleton cluster j.
      const Eigen::VectorXd lambda2 = update_lambda_bal(state, hyper, rng);
      for (Eigen::Index j = 0; j < lambda2.size(); ++j) {
        state.lambda2_star[state.assignment[j]] = lambda2(j);
      }
      break;
    }
  }
  state.tau2 = update_tau2(state, rng);
  state.beta = update_beta(state, gram, rng);
  state.sigma2 = update_sigma2(state, data, hyper, rng);
#ifndef NDEBUG
  state.check_invariants();
#endif
}

PosteriorDraws run_chain(const Dataset& data, const Hyperparams& hyper, std::uint64_t stream_id) {
  hyper.validate();
  const auto start = std::chrono::steady_clock::now();
  RngStream rng(hyper.seed, stream_id);
  ChainState state = init_state(data, hyper, rng);
  const Gram gram = Gram::of(data);

  const Eigen::Index p = data.p();
  const int kept = hyper.retained();
  PosteriorDraws out;
  out.variant = hyper.variant;
  out.beta.resize(kept, p);
  out.sigma2.resize(kept);
  out.lambda2.resize(kept, p);
  out.k_trace.resize(kept);

  for (int it = 0; it < hyper.n_iter; ++it) {
    try {
      gibbs_sweep(state, data, gram, hyper, rng);
    } catch (const NumericalError& e) {
      throw NumericalError("chain aborted at sweep " + std::to_string(it) + ": " + e.what());
    }
    const int s = it - hyper.burn_in;
    if (s < 0) continue;
    out.beta.row(s) = state.beta.transpose();
    out.sigma2(s) = state.sigma2;
    for (Eigen::Index j = 0; j < p; ++j) out.lambda2(s, j) = state.lambda2(j);
    out.k_trace[s] = state.clusters();
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace bnpl
