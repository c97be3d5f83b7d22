#include "bnpl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bnpl/distributions.hpp"
#include "bnpl/error.hpp"

namespace bnpl {

namespace {

void require_same_length(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DataError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
  }
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

double interquartile_range(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  auto q = [&](double level) {
    const double h = level * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
  };
  return q(0.75) - q(0.25);
}

}  // namespace

double mse(const Eigen::VectorXd& beta_true, const Eigen::VectorXd& beta_hat) {
  require_same_length(beta_true.size(), beta_hat.size(), "mse");
  return (beta_true - beta_hat).squaredNorm() / static_cast<double>(beta_true.size());
}

double selection_accuracy(const Eigen::VectorXd& beta_true, const Eigen::VectorXd& beta_hat) {
  require_same_length(beta_true.size(), beta_hat.size(), "selection_accuracy");
  Eigen::Index hits = 0;
  for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
    hits += sign(beta_true(j)) == sign(beta_hat(j));
  }
  return static_cast<double>(hits) / static_cast<double>(beta_true.size());
}

Eigen::VectorXd predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                        const Centering& centering) {
  require_same_length(X.cols(), beta.size(), "predict");
  require_same_length(X.cols(), centering.x_means.size(), "predict centering");
  return ((X.rowwise() - centering.x_means.transpose()) * beta).array() + centering.y_mean;
}

double mspe(const Eigen::VectorXd& test_y, const Eigen::MatrixXd& test_X,
            const Eigen::VectorXd& beta_hat, const Centering& centering) {
  require_same_length(test_y.size(), test_X.rows(), "mspe");
  if (test_y.size() == 0) throw DataError("mspe: empty test set");
  return (test_y - predict(test_X, beta_hat, centering)).squaredNorm() /
         static_cast<double>(test_y.size());
}

double elppd(const Eigen::VectorXd& test_y, const Eigen::MatrixXd& test_X,
             const PosteriorDraws& draws, const Centering& centering) {
  require_same_length(test_y.size(), test_X.rows(), "elppd");
  const Eigen::Index s_count = draws.draws();
  if (s_count < 1) throw DataError("elppd: no posterior draws");
  const Eigen::MatrixXd mu = fitted_draws(draws, test_X, centering);  // S x m
  const Eigen::Index m = test_y.size();
  double total = 0.0;
  Eigen::VectorXd logp(s_count);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index s = 0; s < s_count; ++s) {
      logp(s) = log_normal_density(test_y(i), mu(s, i), draws.sigma2(s));
    }
    const double top = logp.maxCoeff();
    total += top + std::log((logp.array() - top).exp().sum()) -
             std::log(static_cast<double>(s_count));
  }
  return total / static_cast<double>(m);
}

Eigen::MatrixXd fitted_draws(const PosteriorDraws& draws, const Eigen::MatrixXd& X,
                             const Centering& centering) {
  require_same_length(X.cols(), draws.p(), "fitted_draws");
  const Eigen::MatrixXd xc = X.rowwise() - centering.x_means.transpose();
  Eigen::MatrixXd out = draws.beta * xc.transpose();
  out.array() += centering.y_mean;
  return out;
}

FittedDensity avg_fitted_density(const Eigen::MatrixXd& fit_draws,
                                 const Eigen::VectorXd& reference_fits) {
  require_same_length(fit_draws.cols(), reference_fits.size(), "avg_fitted_density");
  const Eigen::Index s = fit_draws.rows();
  const Eigen::Index n = fit_draws.cols();
  if (s < 2) throw DataError("avg_fitted_density: need at least 2 draws");
  if (n == 0) throw DataError("avg_fitted_density: no observations");

  FittedDensity out;
  out.densities.resize(n);
  out.bandwidths.resize(n);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto col = fit_draws.col(i);
    const double sd = sample_sd(col);
    const double iqr = interquartile_range(col);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    const double h = 0.9 * spread * std::pow(static_cast<double>(s), -0.2);
    out.bandwidths(i) = h;
    if (!(h > 0.0)) {
      const bool hit = (col.array() == reference_fits(i)).all();
      out.densities(i) = hit ? kPointMassDensityCap : 0.0;
      out.warnings.push_back("observation " + std::to_string(i) +
                             ": fitted draws have zero variance; treated as a point mass");
      continue;
    }
    const double acc = (-0.5 * ((col.array() - reference_fits(i)) / h).square()).exp().sum();
    out.densities(i) = norm * acc / (static_cast<double>(s) * h);
  }
  out.value = out.densities.mean();
  out.bandwidth = out.bandwidths.mean();
  return out;
}

EvalReport aggregate(std::vector<ReplicateMetrics> replicates) {
  if (replicates.empty()) throw DataError("aggregate: no replicates");
  EvalReport r;
  const double l = static_cast<double>(replicates.size());
  bool all_density = true;
  double density = 0.0;
  for (const auto& m : replicates) {
    r.mse += m.mse;
    r.sel_acc += m.sel_acc;
    r.mspe += m.mspe;
    r.elppd += m.elppd;
    if (m.avg_fitted_density) {
      density += *m.avg_fitted_density;
    } else {
      all_density = false;
    }
  }
  r.mse /= l;
  r.sel_acc /= l;
  r.mspe /= l;
  r.elppd /= l;
  if (all_density) r.avg_fitted_density = density / l;
  r.replicates = std::move(replicates);
  return r;
}

}  // namespace bnpl
