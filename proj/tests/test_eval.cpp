#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bnpl/error.hpp"
#include "bnpl/eval.hpp"
#include "bnpl/rng.hpp"

using namespace bnpl;

namespace {

PosteriorDraws make_draws(const Eigen::MatrixXd& beta, const Eigen::VectorXd& sigma2) {
  PosteriorDraws d;
  d.variant = Variant::kNonparametric;
  d.beta = beta;
  d.sigma2 = sigma2;
  d.lambda2 = Eigen::MatrixXd::Ones(beta.rows(), beta.cols());
  d.k_trace.assign(static_cast<std::size_t>(beta.rows()), 1);
  return d;
}

}  // namespace

TEST_CASE("mean squared estimation error") {
  Eigen::VectorXd truth(5), est(5);
  truth << 3, 0, 0, 1, 2;
  est << 1, 1, 0, 0, 4;
  // Squared errors 4, 1, 0, 1, 4.
  CHECK(mse(truth, est) == doctest::Approx(2.0));
  est << 3, 0, 0, 1, 2 + std::sqrt(14.0);
  CHECK(mse(truth, est) == doctest::Approx(2.8));
  CHECK_THROWS_AS(mse(truth, Eigen::VectorXd::Zero(4)), DataError);
}

TEST_CASE("selection accuracy compares signs") {
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(10), est = Eigen::VectorXd::Zero(10);
  truth.head(3) << 2, -1, 5;
  est.head(3) << 0.1, -3, 4;
  est(9) = 0.2;
  CHECK(selection_accuracy(truth, est) == doctest::Approx(0.9));
  est(0) = -0.1;
  CHECK(selection_accuracy(truth, est) == doctest::Approx(0.8));
}

TEST_CASE("prediction error of the null predictor is the mean square of y") {
  Eigen::VectorXd y(4);
  y << 1, -2, 3, 0;
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(4, 3);
  CHECK(mspe(y, X, Eigen::VectorXd::Zero(3), Centering::none(3)) == doctest::Approx(3.5));
  // Centering adds the training mean back.
  Centering c{Eigen::VectorXd::Zero(3), 0.5};
  CHECK(mspe(y, X, Eigen::VectorXd::Zero(3), c) == doctest::Approx(3.5 - 2 * 0.5 * 0.5 + 0.25));
}

TEST_CASE("elppd examples") {
  const double s2 = 1.0 / (2.0 * std::numbers::pi);
  Eigen::MatrixXd X(2, 1);
  X << 1, 2;
  Eigen::VectorXd y(2);
  y << 0.5, 1.0;
  SUBCASE("a single exact draw at unit density") {
    const PosteriorDraws d = make_draws(Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::VectorXd::Constant(1, s2));
    CHECK(std::abs(elppd(y, X, d, Centering::none(1))) < 1e-12);
  }
  SUBCASE("duplicating the draws leaves elppd unchanged") {
    Eigen::MatrixXd b(2, 1);
    b << 0.3, 0.7;
    Eigen::VectorXd s(2);
    s << 0.4, 1.3;
    Eigen::MatrixXd bb(4, 1);
    bb << b, b;
    Eigen::VectorXd ss(4);
    ss << s, s;
    CHECK(elppd(y, X, make_draws(bb, ss), Centering::none(1)) ==
          doctest::Approx(elppd(y, X, make_draws(b, s), Centering::none(1))).epsilon(1e-14));
  }
  SUBCASE("log-sum-exp agrees with the direct average") {
    RngStream rng(8, 0);
    Eigen::MatrixXd b(50, 1);
    Eigen::VectorXd s(50);
    for (int i = 0; i < 50; ++i) {
      b(i, 0) = 0.5 + 0.2 * rng.normal();
      s(i) = 0.5 + rng.uniform();
    }
    double direct = 0.0;
    for (int i = 0; i < 2; ++i) {
      double avg = 0.0;
      for (int k = 0; k < 50; ++k) {
        const double r = y(i) - X(i, 0) * b(k, 0);
        avg += std::exp(-0.5 * r * r / s(k)) / std::sqrt(2 * std::numbers::pi * s(k));
      }
      direct += std::log(avg / 50.0);
    }
    CHECK(std::abs(elppd(y, X, make_draws(b, s), Centering::none(1)) - direct / 2.0) < 1e-10);
  }
  SUBCASE("far outliers stay finite") {
    Eigen::VectorXd far(2);
    far << 1e4, -1e4;
    const PosteriorDraws d = make_draws(Eigen::MatrixXd::Constant(3, 1, 0.0), Eigen::VectorXd::Constant(3, 1e-3));
    CHECK(std::isfinite(elppd(far, X, d, Centering::none(1))));
  }
}

TEST_CASE("average fitted density of a Gaussian sample") {
  RngStream rng(9, 0);
  const int S = 20000;
  Eigen::MatrixXd fits(S, 1);
  for (int s = 0; s < S; ++s) fits(s, 0) = 0.1 * rng.normal();
  const FittedDensity at_center = avg_fitted_density(fits, Eigen::VectorXd::Zero(1));
  // The KDE of N(0, 0.1^2) at 0 has expectation N(0 | 0, 0.1^2 + h^2).
  const double h = at_center.bandwidth;
  const double oracle = 1.0 / std::sqrt(2 * std::numbers::pi * (0.01 + h * h));
  CHECK(at_center.value == doctest::Approx(oracle).epsilon(0.02));
  CHECK(h == doctest::Approx(0.9 * 0.1 * std::pow(S, -0.2)).epsilon(0.05));
  const FittedDensity far = avg_fitted_density(fits, Eigen::VectorXd::Constant(1, 5.0));
  CHECK(far.value < 1e-12);
}

TEST_CASE("identical fitted draws at the reference hit the point-mass cap") {
  const Eigen::MatrixXd fits = Eigen::MatrixXd::Constant(10, 2, 1.5);
  Eigen::VectorXd ref(2);
  ref << 1.5, 1.5;
  const FittedDensity d = avg_fitted_density(fits, ref);
  CHECK(d.value == kPointMassDensityCap);
  CHECK_FALSE(d.warnings.empty());
  ref(1) = 2.0;
  CHECK(avg_fitted_density(fits, ref).densities(1) == 0.0);
}

TEST_CASE("fitted draws are one row per retained draw") {
  Eigen::MatrixXd b(2, 2);
  b << 1, 0, 0, 1;
  const PosteriorDraws d = make_draws(b, Eigen::VectorXd::Ones(2));
  Eigen::MatrixXd X(3, 2);
  X << 1, 2, 3, 4, 5, 6;
  const Eigen::MatrixXd f = fitted_draws(d, X, Centering{Eigen::Vector2d(1, 1), 10.0});
  REQUIRE(f.rows() == 2);
  REQUIRE(f.cols() == 3);
  CHECK(f(0, 0) == 10.0);
  CHECK(f(1, 2) == 15.0);
}

TEST_CASE("aggregate averages replicates and is order invariant") {
  std::vector<ReplicateMetrics> reps{{1.0, 0.5, 2.0, -1.0, {}}, {3.0, 1.0, 4.0, -3.0, {}},
                                     {2.0, 0.0, 0.0, -2.0, {}}};
  const EvalReport a = aggregate(reps);
  CHECK(a.mse == doctest::Approx(2.0));
  CHECK(a.sel_acc == doctest::Approx(0.5));
  CHECK(a.mspe == doctest::Approx(2.0));
  CHECK(a.elppd == doctest::Approx(-2.0));
  CHECK_FALSE(a.avg_fitted_density.has_value());
  std::reverse(reps.begin(), reps.end());
  const EvalReport b = aggregate(reps);
  CHECK(a.mse == b.mse);
  CHECK(a.elppd == b.elppd);
  CHECK_THROWS(aggregate({}));
}

TEST_CASE("length mismatches are data errors") {
  const PosteriorDraws d = make_draws(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Ones(3));
  CHECK_THROWS_AS(elppd(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(3, 2), d, Centering::none(2)),
                  DataError);
  CHECK_THROWS_AS(avg_fitted_density(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3)), DataError);
  CHECK_THROWS_AS(selection_accuracy(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), DataError);
}
