#include "bnpl/model.hpp"

#include <cmath>
#include <stdexcept>

#include "bnpl/distributions.hpp"
#include "bnpl/error.hpp"

namespace bnpl {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kNonparametric: return "bnpl";
    case Variant::kBayesLasso: return "bl";
    case Variant::kAdaptive: return "bal";
  }
  return "?";
}

std::string_view variant_label(Variant v) {
  switch (v) {
    case Variant::kNonparametric: return "BNP-L";
    case Variant::kBayesLasso: return "B-L";
    case Variant::kAdaptive: return "BA-L";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "bnpl" || name == "BNP-L") return Variant::kNonparametric;
  if (name == "bl" || name == "B-L") return Variant::kBayesLasso;
  if (name == "bal" || name == "BA-L") return Variant::kAdaptive;
  throw ConfigError("unknown variant '" + std::string(name) + "' (expected bnpl, bl or bal)");
}

Dataset prepare(const Eigen::VectorXd& raw_y, const Eigen::MatrixXd& raw_X, bool standardize) {
  const Eigen::Index n = raw_X.rows();
  const Eigen::Index p = raw_X.cols();
  if (raw_y.size() != n) {
    throw DataError("response has " + std::to_string(raw_y.size()) + " rows but design has " +
                    std::to_string(n));
  }
  if (n < 2) throw DataError("need at least 2 observations");
  if (p < 1) throw DataError("need at least 1 predictor");
  if (!raw_y.allFinite()) throw DataError("response contains non-finite values");
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!raw_X.col(j).allFinite()) {
      throw DataError("design column " + std::to_string(j + 1) + " contains non-finite values");
    }
  }

  Dataset d;
  d.y_mean = raw_y.mean();
  d.y = raw_y.array() - d.y_mean;
  d.x_means = raw_X.colwise().mean().transpose();
  d.X = raw_X.rowwise() - d.x_means.transpose();
  d.x_scales = Eigen::VectorXd::Ones(p);
  d.absorbed_dof = 1;
  d.standardized = standardize;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double ss = d.X.col(j).squaredNorm();
    if (ss == 0.0) {
      d.constant_columns.push_back(j);
      continue;
    }
    if (standardize) {
      d.x_scales(j) = std::sqrt(ss / static_cast<double>(n - 1));
      d.X.col(j) /= d.x_scales(j);
    }
  }
  return d;
}

Dataset raw_dataset(Eigen::VectorXd y, Eigen::MatrixXd X) {
  if (y.size() != X.rows()) throw DataError("response/design row mismatch");
  Dataset d;
  d.x_means = Eigen::VectorXd::Zero(X.cols());
  d.x_scales = Eigen::VectorXd::Ones(X.cols());
  d.y = std::move(y);
  d.X = std::move(X);
  d.absorbed_dof = 0;
  return d;
}

void Hyperparams::validate() const {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(a)) throw ConfigError("a must be positive");
  if (!positive(b)) throw ConfigError("b must be positive");
  if (!positive(alpha)) throw ConfigError("alpha must be positive");
  if (n_iter < 1) throw ConfigError("iters must be at least 1");
  if (burn_in < 0 || burn_in >= n_iter) throw ConfigError("burnin must lie in [0, iters)");
  if (sigma2_prior_shape < 0.0 || sigma2_prior_scale < 0.0) {
    throw ConfigError("sigma^2 prior parameters must be nonnegative");
  }
}

void ChainState::check_invariants() const {
  const auto p = static_cast<std::size_t>(beta.size());
  if (static_cast<std::size_t>(tau2.size()) != p || assignment.size() != p) {
    throw std::logic_error("chain state: size mismatch");
  }
  if (lambda2_star.empty() || cluster_size.size() != lambda2_star.size()) {
    throw std::logic_error("chain state: cluster tables inconsistent");
  }
  std::vector<int> counted(lambda2_star.size(), 0);
  for (int r : assignment) {
    if (r < 0 || r >= clusters()) throw std::logic_error("chain state: label out of range");
    ++counted[r];
  }
  for (std::size_t k = 0; k < counted.size(); ++k) {
    if (counted[k] == 0 || counted[k] != cluster_size[k]) {
      throw std::logic_error("chain state: empty or miscounted cluster " + std::to_string(k));
    }
    if (!(lambda2_star[k] > 0.0) || !std::isfinite(lambda2_star[k])) {
      throw std::logic_error("chain state: nonpositive cluster value");
    }
  }
  if (!(tau2.array() > 0.0).all() || !tau2.allFinite()) {
    throw std::logic_error("chain state: nonpositive tau2");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::logic_error("chain state: nonpositive sigma2");
  }
}

ChainState init_state(const Dataset& data, const Hyperparams& hyper, RngStream& rng) {
  hyper.validate();
  const Eigen::Index p = data.p();
  const Eigen::Index n = data.n();
  ChainState s;
  s.beta = Eigen::VectorXd::Zero(p);
  s.tau2 = Eigen::VectorXd::Ones(p);
  s.sigma2 = (data.y.array() - data.y.mean()).square().sum() / static_cast<double>(n - 1);
  if (!(s.sigma2 > 0.0)) s.sigma2 = 1.0;

  if (hyper.ridge_start) {
    Eigen::MatrixXd gram = data.X.transpose() * data.X;
    gram.diagonal().array() += 1.0;
    s.beta = gram.llt().solve(data.X.transpose() * data.y);
  }

  const GammaParams base(hyper.a, hyper.b);
  if (hyper.variant == Variant::kAdaptive) {
    s.assignment.resize(p);
    s.lambda2_star.resize(p);
    s.cluster_size.assign(p, 1);
    for (Eigen::Index j = 0; j < p; ++j) {
      s.assignment[j] = static_cast<int>(j);
      s.lambda2_star[j] = sample_gamma(base, rng);
    }
  } else {
    s.assignment.assign(p, 0);
    s.lambda2_star = {sample_gamma(base, rng)};
    s.cluster_size = {static_cast<int>(p)};
  }
  return s;
}

}  // namespace bnpl
