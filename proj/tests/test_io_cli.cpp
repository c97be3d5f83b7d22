#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>

#include <json.hpp>

#include "bnpl/error.hpp"
#include "bnpl/experiment.hpp"
#include "bnpl/io.hpp"
#include "bnpl/rng.hpp"

using namespace bnpl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("bnpl_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BNPLASSO_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string strip_hash_line(const std::string& text) {
  if (text.rfind(io::kHashPrefix, 0) != 0) return text;
  return text.substr(text.find('\n') + 1);
}

ExperimentConfig small_sim(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.design.p = 12;
  cfg.design.n_strong = 2;
  cfg.design.n_weak = 2;
  cfg.design.n_test = 40;
  cfg.ns = {30};
  cfg.hyper.n_iter = 300;
  cfg.hyper.burn_in = 100;
  cfg.out_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  RngStream rng(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::ldexp(rng.normal(), static_cast<int>(rng.next_u64() % 200) - 100);
    REQUIRE(std::stod(io::format_double(x)) == x);
  }
  CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("content hash is the git blob hash") {
  CHECK(io::content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(io::content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("dataset CSV round-trips exactly") {
  RngStream rng(2, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 30);
    const int p = 1 + static_cast<int>(rng.next_u64() % 10);
    Eigen::VectorXd y(n);
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i) {
      y(i) = 1e3 * rng.normal();
      for (int j = 0; j < p; ++j) X(i, j) = rng.normal() * std::exp(5 * rng.normal());
    }
    const std::string text = io::dataset_csv(y, X, std::string("abc"));
    const io::RawData back = io::parse_dataset(text, std::string_view("abc"));
    REQUIRE(back.y == y);
    REQUIRE(back.X == X);
    REQUIRE(back.manifest_hash == std::optional<std::string>("abc"));
  }
}

TEST_CASE("malformed datasets name the row and column") {
  auto message = [](const std::string& text) {
    try {
      io::parse_dataset(text);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string bad_cell = message("y,x1,x2\n1,2,3\n4,oops,6\n");
  CHECK(bad_cell.find("row 3") != std::string::npos);
  CHECK(bad_cell.find("x1") != std::string::npos);
  CHECK(message("y,x1\n1,2\n3\n").find("row 3") != std::string::npos);
  CHECK(message("y,x2\n1,2\n") != "no error");
  CHECK(message("y,x1\n1,nan\n") != "no error");
  CHECK(message("") != "no error");
  CHECK_THROWS_AS(io::parse_dataset("# manifest_hash=abc\ny,x1\n1,2\n", std::string_view("def")), DataError);
}

TEST_CASE("draw archives round-trip") {
  const fs::path dir = scratch("draws");
  PosteriorDraws d;
  d.variant = Variant::kAdaptive;
  d.beta = Eigen::MatrixXd::Random(7, 3);
  d.lambda2 = Eigen::MatrixXd::Random(7, 3).cwiseAbs();
  d.sigma2 = Eigen::VectorXd::Random(7).cwiseAbs();
  d.k_trace.assign(7, 3);
  io::write_draws(dir, d, std::string("h1"));
  const PosteriorDraws back = io::read_draws(dir, Variant::kAdaptive, std::string_view("h1"));
  CHECK(back.beta == d.beta);
  CHECK(back.lambda2 == d.lambda2);
  CHECK(back.sigma2 == d.sigma2);
  CHECK(back.k_trace == d.k_trace);
  CHECK_THROWS_AS(io::read_draws(dir, Variant::kAdaptive, std::string_view("h2")), DataError);
}

TEST_CASE("reference fits cover every row exactly once") {
  const fs::path dir = scratch("ref");
  Eigen::VectorXd fits(3);
  fits << 0.5, -1.25, 2.0;
  io::write_reference_fits(dir / "ok.csv", fits, std::nullopt);
  CHECK(io::read_reference_fits(dir / "ok.csv", 3) == fits);
  CHECK_THROWS_AS(io::read_reference_fits(dir / "ok.csv", 4), DataError);
  io::write_text_file(dir / "dup.csv", "row_index,fitted_value\n0,1\n0,2\n1,3\n");
  CHECK_THROWS_AS(io::read_reference_fits(dir / "dup.csv", 3), DataError);
  io::write_text_file(dir / "range.csv", "row_index,fitted_value\n0,1\n1,2\n3,3\n");
  CHECK_THROWS_AS(io::read_reference_fits(dir / "range.csv", 3), DataError);
}

TEST_CASE("config JSON round-trips") {
  ExperimentConfig cfg;
  cfg.variants = {Variant::kAdaptive};
  cfg.hyper.a = 0.3;
  cfg.hyper.alpha = 2.5;
  cfg.hyper.seed = 99;
  cfg.rhos = {0.3, 0.7};
  cfg.ns = {50, 100};
  cfg.cv_folds = 5;
  cfg.standardize = true;
  const nlohmann::json j = to_json(cfg);
  CHECK(to_json(config_from_json(j)) == j);
  CHECK(to_json(config_from_json(nlohmann::json{{"config", j}})) == j);
  nlohmann::json bad = j;
  bad["iters"] = "many";
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
}

TEST_CASE("folds partition the rows deterministically") {
  for (int k : {2, 5, 10}) {
    const auto folds = make_folds(37, k, 4);
    REQUIRE(folds.size() == static_cast<std::size_t>(k));
    std::set<int> seen;
    for (const auto& f : folds) {
      CHECK(f.size() >= 37 / k);
      CHECK(f.size() <= 37 / k + 1);
      CHECK(std::is_sorted(f.begin(), f.end()));
      seen.insert(f.begin(), f.end());
    }
    CHECK(seen.size() == 37);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 36);
    CHECK(make_folds(37, k, 4) == folds);
  }
  CHECK(make_folds(37, 5, 4) != make_folds(37, 5, 5));
}

TEST_CASE("cross-validation never looks at the held-out responses") {
  RngStream rng(3, 0);
  io::RawData data;
  data.X = Eigen::MatrixXd(30, 3);
  data.y = Eigen::VectorXd(30);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 3; ++j) data.X(i, j) = rng.normal();
    data.y(i) = 2.0 * data.X(i, 0) + rng.normal();
  }
  Hyperparams h;
  h.n_iter = 200;
  h.burn_in = 50;
  const std::vector<int> test_rows{1, 7, 20};
  const FoldMetrics base = evaluate_fold(data, test_rows, h, false, 5);
  // Moving held-out responses shifts their errors but not the fit: the
  // prediction error changes exactly as a fixed predictor would.
  io::RawData shifted = data;
  for (int r : test_rows) shifted.y(r) += 1000.0;
  const FoldMetrics moved = evaluate_fold(shifted, test_rows, h, false, 5);
  CHECK(moved.mspe > base.mspe + 1e5);
  io::RawData moved_train = data;
  moved_train.y(0) += 5.0;
  CHECK(evaluate_fold(moved_train, test_rows, h, false, 5).mspe != base.mspe);
  // The fit is unchanged: re-evaluating the original data reproduces base.
  const FoldMetrics again = evaluate_fold(data, test_rows, h, false, 5);
  CHECK(again.mspe == base.mspe);
  CHECK(again.elppd == base.elppd);
}

TEST_CASE("simulate writes L train/test pairs and a manifest") {
  const fs::path out = scratch("sim");
  ExperimentConfig cfg = small_sim(out);
  cfg.replicates = 3;
  const SimulateResult r = run_simulate(cfg);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(out)) files += e.is_regular_file();
  CHECK(files == 7);
  CHECK(fs::exists(out / "train_001.csv"));
  CHECK(fs::exists(out / "test_003.csv"));
  const io::RawData train = io::read_dataset(out / "train_002.csv", r.manifest.hash);
  CHECK(train.X.rows() == 30);
  CHECK(train.X.cols() == 12);
  CHECK(io::read_dataset(out / "test_001.csv").X.rows() == 40);
  const auto manifest = nlohmann::json::parse(io::read_text_file(out / "manifest.json"));
  CHECK(manifest.at("manifest_hash") == r.manifest.hash);
  CHECK(manifest.at("replicate_seeds").size() == 3);

  cfg.replicates = 0;
  CHECK_THROWS_AS(run_simulate(cfg), ConfigError);
}

TEST_CASE("a manifest reproduces the run byte for byte") {
  const fs::path first = scratch("rerun_a");
  const fs::path second = scratch("rerun_b");
  REQUIRE(run_cli("simulate --replicates 2 --p 8 --n 20 --n-strong 1 --n-weak 1 --n-test 10 --seed 5 --out " +
                  first.string()) == 0);
  REQUIRE(run_cli("simulate --config " + (first / "manifest.json").string() + " --out " +
                  second.string()) == 0);
  for (const char* name : {"train_001.csv", "test_001.csv", "train_002.csv", "test_002.csv"}) {
    CAPTURE(name);
    CHECK(io::read_text_file(first / name) == io::read_text_file(second / name));
  }
}

TEST_CASE("fit records defaults and selects a strong single predictor") {
  const fs::path dir = scratch("fit");
  RngStream rng(6, 0);
  Eigen::MatrixXd X(40, 1);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = rng.normal();
    y(i) = 3.0 * X(i, 0) + 0.5 * rng.normal();
  }
  io::write_dataset(dir / "data.csv", y, X, std::nullopt);
  REQUIRE(run_cli("fit " + (dir / "data.csv").string() + " --iters 1500 --burnin 500 --out " +
                  (dir / "out").string()) == 0);
  const auto manifest = nlohmann::json::parse(io::read_text_file(dir / "out" / "manifest.json"));
  const auto& hyper = manifest.at("config");
  CHECK(hyper.at("a").get<double>() == 0.1);
  CHECK(hyper.at("b").get<double>() == 0.1);
  CHECK(hyper.at("alpha").get<double>() == 0.01);
  const auto summary = nlohmann::json::parse(io::read_text_file(dir / "out" / "summary.json"));
  for (const auto& v : summary.at("variants")) {
    CHECK(v.at("included").at(0).get<bool>());
    CHECK(std::abs(v.at("beta_hat").at(0).get<double>() - 3.0) < 0.5);
  }
  CHECK(fs::exists(dir / "out" / "bnpl" / "beta.csv"));
  CHECK(fs::exists(dir / "out" / "bl" / "fitted.csv"));
}

TEST_CASE("a one-replicate grid equals the single replicate") {
  const fs::path out = scratch("grid1");
  ExperimentConfig cfg = small_sim(out);
  cfg.variants = {Variant::kNonparametric};
  const GridResult grid = run_replicate(cfg);
  REQUIRE(grid.cells.size() == 1);
  SimDesign design = cfg.design;
  design.n = 30;
  design.rho = 0.3;
  Hyperparams h = cfg.hyper;
  h.seed = derive_seed(cfg.hyper.seed, 0);
  const ReplicateMetrics single = evaluate_replicate(simulate_replicate(design, 0), h, false);
  CHECK(grid.cells[0].report.mse == single.mse);
  CHECK(grid.cells[0].report.mspe == single.mspe);
  CHECK(grid.cells[0].report.elppd == single.elppd);
}

TEST_CASE("grid output is identical across runs and thread counts") {
  const fs::path a = scratch("grid_a");
  const fs::path b = scratch("grid_b");
  ExperimentConfig cfg = small_sim(a);
  cfg.replicates = 2;
  cfg.rhos = {0.3, 0.7};
  run_replicate(cfg);
  cfg.out_dir = b.string();
  cfg.threads = 3;
  run_replicate(cfg);
  CHECK(io::read_text_file(a / "grid.csv") == io::read_text_file(b / "grid.csv"));
  const std::string body = strip_hash_line(io::read_text_file(a / "grid.csv"));
  CHECK(body.rfind("variant,rho,n,mse,sel_acc,mspe,elppd\n", 0) == 0);
  CHECK(std::count(body.begin(), body.end(), '\n') == 1 + 2 * 3);
}

TEST_CASE("CLI exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(run_cli("") == 2);
  CHECK(run_cli("simulate") == 2);
  CHECK(run_cli("simulate --replicates 0 --out " + dir.string()) == 2);
  CHECK(run_cli("simulate --rho 1.5 --out " + dir.string()) == 2);
  CHECK(run_cli("fit " + (dir / "missing.csv").string() + " --out " + dir.string()) == 3);
  io::write_text_file(dir / "bad.csv", "y,x1\n1,zz\n");
  CHECK(run_cli("fit " + (dir / "bad.csv").string() + " --out " + dir.string()) == 3);
  CHECK(run_cli("fit " + (dir / "bad.csv").string() + " --variant nope --out " + dir.string()) == 2);
  io::write_text_file(dir / "flat.csv", "y,x1\n1,0\n1,0\n1,0\n");
  CHECK(run_cli("fit " + (dir / "flat.csv").string() + " --iters 20 --burnin 5 --out " +
                (dir / "flat").string()) == 4);
}
