#include <doctest.h>

#include <cmath>
#include <limits>

#include "bnpl/error.hpp"
#include "bnpl/model.hpp"

using namespace bnpl;

TEST_CASE("prepare centers response and design") {
  Eigen::VectorXd y(2);
  y << 1, 3;
  Eigen::MatrixXd X(2, 1);
  X << 2, 4;
  const Dataset d = prepare(y, X);
  CHECK(d.y(0) == -1.0);
  CHECK(d.y(1) == 1.0);
  CHECK(d.X(0, 0) == -1.0);
  CHECK(d.X(1, 0) == 1.0);
  CHECK(d.y_mean == 2.0);
  CHECK(d.x_means(0) == 3.0);
  CHECK(d.absorbed_dof == 1);
}

TEST_CASE("prepare is idempotent") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(30, 4);
  Eigen::VectorXd y = Eigen::VectorXd::Random(30);
  const Dataset once = prepare(y, X);
  const Dataset twice = prepare(once.y, once.X);
  CHECK((twice.X - once.X).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((twice.y - once.y).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(once.y.mean()) < 1e-10);
  CHECK(once.X.colwise().mean().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("prepare rejects bad input") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(3, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  SUBCASE("NaN in design") {
    X(1, 1) = std::nan("");
    CHECK_THROWS_AS(prepare(y, X), DataError);
  }
  SUBCASE("infinite response") {
    y(0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(prepare(y, X), DataError);
  }
  SUBCASE("dimension mismatch") { CHECK_THROWS_AS(prepare(Eigen::VectorXd::Ones(2), X), DataError); }
  SUBCASE("single row") {
    CHECK_THROWS_AS(prepare(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 2)), DataError);
  }
}

TEST_CASE("constant columns are flagged, not rejected") {
  Eigen::MatrixXd X(4, 3);
  X << 1, 5, 2, 2, 5, 2, 3, 5, 1, 4, 5, 9;
  const Dataset d = prepare(Eigen::VectorXd::LinSpaced(4, 0, 3), X);
  REQUIRE(d.constant_columns.size() == 1);
  CHECK(d.constant_columns[0] == 1);
}

TEST_CASE("standardize scales columns to unit sample variance") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 10, 2, 30, 3, 50, 4, 70;
  const Dataset d = prepare(Eigen::VectorXd::LinSpaced(4, 0, 3), X, true);
  for (int j = 0; j < 2; ++j) {
    CHECK(d.X.col(j).squaredNorm() / 3.0 == doctest::Approx(1.0));
  }
  CHECK(d.x_scales(1) == doctest::Approx(std::sqrt(2000.0 / 3.0)));
}

TEST_CASE("hyperparameter validation") {
  Hyperparams h;
  CHECK_NOTHROW(h.validate());
  CHECK(h.a == 0.1);
  CHECK(h.b == 0.1);
  CHECK(h.alpha == 0.01);
  CHECK(h.n_iter == 6000);
  CHECK(h.burn_in == 1000);
  h.burn_in = h.n_iter;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h = Hyperparams{};
  h.alpha = 0.0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("variant names round-trip") {
  for (Variant v : {Variant::kNonparametric, Variant::kBayesLasso, Variant::kAdaptive}) {
    CHECK(parse_variant(variant_name(v)) == v);
    CHECK(parse_variant(variant_label(v)) == v);
  }
  CHECK_THROWS_AS(parse_variant("ridge"), ConfigError);
}

TEST_CASE("init_state satisfies the chain invariants for every variant") {
  Eigen::VectorXd y(3);
  y << 1, 3, 5;  // sample variance 4
  Eigen::MatrixXd X(3, 4);
  X << 1, 0, 2, 1, 0, 1, 1, 3, 2, 2, 0, 1;
  const Dataset d = prepare(y, X);
  for (Variant v : {Variant::kNonparametric, Variant::kBayesLasso, Variant::kAdaptive}) {
    Hyperparams h;
    h.variant = v;
    RngStream rng(5, 0);
    const ChainState s = init_state(d, h, rng);
    CHECK_NOTHROW(s.check_invariants());
    CHECK(s.sigma2 == doctest::Approx(4.0));
    CHECK(s.beta.isZero());
    CHECK((s.tau2.array() == 1.0).all());
    int total = 0;
    for (int c : s.cluster_size) total += c;
    CHECK(total == 4);
    CHECK(s.clusters() == (v == Variant::kAdaptive ? 4 : 1));
  }
}

TEST_CASE("ridge start solves the penalized normal equations") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(20, 3);
  Eigen::VectorXd y = X * Eigen::Vector3d(1, -2, 0.5);
  const Dataset d = prepare(y, X);
  Hyperparams h;
  h.ridge_start = true;
  RngStream rng(1, 0);
  const ChainState s = init_state(d, h, rng);
  const Eigen::MatrixXd gram = d.X.transpose() * d.X + Eigen::MatrixXd::Identity(3, 3);
  CHECK(((gram * s.beta) - d.X.transpose() * d.y).norm() < 1e-10);
}

TEST_CASE("check_invariants catches broken bookkeeping") {
  ChainState s;
  s.beta = Eigen::VectorXd::Zero(2);
  s.tau2 = Eigen::VectorXd::Ones(2);
  s.sigma2 = 1.0;
  s.assignment = {0, 0};
  s.lambda2_star = {1.0, 2.0};
  s.cluster_size = {2, 0};
  CHECK_THROWS(s.check_invariants());
  s.lambda2_star = {1.0};
  s.cluster_size = {2};
  CHECK_NOTHROW(s.check_invariants());
  s.tau2(1) = 0.0;
  CHECK_THROWS(s.check_invariants());
}
