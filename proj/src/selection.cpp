#include "bnpl/selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bnpl/error.hpp"

namespace bnpl {

namespace {

void require_draws(Eigen::Index s) {
  if (s < 2) {
    throw DataError("need at least 2 posterior draws, got " + std::to_string(s));
  }
}

}  // namespace

SelectionResult select(const Eigen::MatrixXd& beta_draws) {
  const Eigen::Index s = beta_draws.rows();
  const Eigen::Index p = beta_draws.cols();
  require_draws(s);

  SelectionResult out;
  out.posterior_mean = beta_draws.colwise().mean().transpose();
  out.posterior_sd.resize(p);
  out.neighborhood_prob.resize(p);
  out.beta_hat.resize(p);
  out.included.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = beta_draws.col(j).array();
    const double var = (col - out.posterior_mean(j)).square().sum() / static_cast<double>(s - 1);
    const double sd = std::sqrt(var);
    out.posterior_sd(j) = sd;
    const auto inside = (col.abs() <= sd).count();
    out.neighborhood_prob(j) = static_cast<double>(inside) / static_cast<double>(s);
    const bool keep = !(out.neighborhood_prob(j) > 0.5);
    out.included[j] = keep;
    out.beta_hat(j) = keep ? out.posterior_mean(j) : 0.0;
  }
  return out;
}

SelectionResult select(const PosteriorDraws& draws) { return select(draws.beta); }

QuantileTable posterior_summary(const Eigen::MatrixXd& beta_draws,
                                const std::vector<double>& levels) {
  const Eigen::Index s = beta_draws.rows();
  const Eigen::Index p = beta_draws.cols();
  require_draws(s);
  for (double q : levels) {
    if (!(q > 0.0 && q < 1.0)) {
      throw ConfigError("quantile level must lie in (0, 1), got " + std::to_string(q));
    }
  }
  QuantileTable t;
  t.levels = levels;
  t.quantiles.resize(p, static_cast<Eigen::Index>(levels.size()));
  t.mean = beta_draws.colwise().mean().transpose();
  t.sd.resize(p);
  std::vector<double> sorted(static_cast<std::size_t>(s));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < s; ++i) sorted[i] = beta_draws(i, j);
    std::sort(sorted.begin(), sorted.end());
    t.sd(j) = std::sqrt((beta_draws.col(j).array() - t.mean(j)).square().sum() /
                        static_cast<double>(s - 1));
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double h = levels[l] * static_cast<double>(s - 1);
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const auto hi = std::min(lo + 1, sorted.size() - 1);
      t.quantiles(j, static_cast<Eigen::Index>(l)) =
          sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    }
  }
  return t;
}

QuantileTable posterior_summary(const PosteriorDraws& draws, const std::vector<double>& levels) {
  return posterior_summary(draws.beta, levels);
}

}  // namespace bnpl
