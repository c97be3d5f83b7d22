#include "bnpl/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bnpl/error.hpp"

namespace bnpl {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// Marsaglia & Tsang (2000) for shape >= 1, unit rate.
double gamma_unit_rate(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Returns the index of the first failing pivot, or -1 on success.
Eigen::Index failing_pivot(const Eigen::MatrixXd& a) {
  const Eigen::Index p = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) return j;
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < p; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return -1;
}

}  // namespace

GammaParams::GammaParams(double shape_, double rate_) : shape(shape_), rate(rate_) {
  if (!positive_finite(shape) || !positive_finite(rate)) {
    throw ParameterDomainError("Gamma parameters must be positive and finite (shape=" +
                               std::to_string(shape) + ", rate=" + std::to_string(rate) + ")");
  }
}

InvGaussParams::InvGaussParams(double mean_, double shape_) : mean(mean_), shape(shape_) {
  if (!positive_finite(mean) || !positive_finite(shape)) {
    throw ParameterDomainError("inverse Gaussian parameters must be positive and finite (mean=" +
                               std::to_string(mean) + ", shape=" + std::to_string(shape) + ")");
  }
}

double sample_gamma(const GammaParams& params, RngStream& rng) {
  if (params.shape >= 1.0) return gamma_unit_rate(params.shape, rng) / params.rate;
  // Boost: Gamma(shape) = Gamma(shape + 1) * U^{1/shape}, assembled in log
  // space because U^{1/shape} underflows quickly for small shapes.
  const double g = gamma_unit_rate(params.shape + 1.0, rng);
  const double log_draw = std::log(g) + std::log(rng.uniform()) / params.shape - std::log(params.rate);
  return std::max(std::exp(log_draw), std::numeric_limits<double>::min());
}

double sample_inverse_gaussian(const InvGaussParams& params, RngStream& rng) {
  const double mu = params.mean;
  const double lambda = params.shape;
  const double z = rng.normal();
  const double w = mu * z * z / (2.0 * lambda);
  // Smaller root mu (1 + w - sqrt(w (w + 2))), rewritten to avoid cancellation.
  const double x = mu / (1.0 + w + std::sqrt(w * (w + 2.0)));
  if (rng.uniform() * (mu + x) <= mu) return x;
  return mu * (mu / x);
}

double sample_inv_gamma(double shape, double scale, RngStream& rng) {
  return 1.0 / sample_gamma(GammaParams(shape, scale), rng);
}

Eigen::VectorXd sample_mvn_precision(const Eigen::MatrixXd& precision,
                                     const Eigen::VectorXd& linear, RngStream& rng) {
  const Eigen::Index p = precision.rows();
  if (precision.cols() != p || linear.size() != p) {
    throw ParameterDomainError("sample_mvn_precision: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd jittered = precision;
    const double jitter = 1e-10 * precision.trace() / static_cast<double>(p);
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) {
      const Eigen::Index pivot = failing_pivot(jittered);
      throw FactorizationError(static_cast<std::size_t>(pivot < 0 ? 0 : pivot),
                               "precision matrix is not positive definite (pivot " +
                                   std::to_string(pivot) + ")");
    }
  }
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < p; ++i) z(i) = rng.normal();
  // L w = b, then L' x = w + z gives x ~ N(Phi^{-1} b, Phi^{-1}).
  Eigen::VectorXd w = llt.matrixL().solve(linear);
  w += z;
  return llt.matrixU().solve(w);
}

double de_density(double x, double rate) { return 0.5 * rate * std::exp(-rate * std::abs(x)); }

double log_de_density(double x, double rate) {
  return std::log(0.5 * rate) - rate * std::abs(x);
}

double log_normal_density(double x, double mean, double variance) {
  const double r = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + r * r / variance);
}

}  // namespace bnpl
