// Command-line front end: simulate, fit, replicate, cv.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnpl/error.hpp"
#include "bnpl/experiment.hpp"
#include "bnpl/io.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kNumerical = 4 };

struct Flags {
  std::string config_path;
  std::string variants;
  double a = 0, b = 0, alpha = 0;
  int iters = 0, burnin = 0;
  std::uint64_t seed = 0;
  std::string rho, n;
  int p = 0, replicates = 0, folds = 0, threads = 0;
  int n_strong = 0, n_weak = 0, n_test = 0;
  double strong_value = 0, weak_value = 0, noise_sd = 0;
  bool standardize = false;
  std::string out;
  std::string data;
  std::string reference_fits;
};

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    T value{};
    std::istringstream is(item);
    if (!(is >> value) || !is.eof()) throw bnpl::ConfigError("cannot parse list item '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw bnpl::ConfigError("empty list '" + text + "'");
  return out;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config or a previous run's manifest.json");
  cmd->add_option("--variant", f.variants, "Comma-separated subset of bnpl,bl,bal");
  cmd->add_option("--a", f.a, "Base-measure Gamma shape (default 0.1)");
  cmd->add_option("--b", f.b, "Base-measure Gamma rate (default 0.1)");
  cmd->add_option("--alpha", f.alpha, "Dirichlet process concentration (default 0.01)");
  cmd->add_option("--iters", f.iters, "Total Gibbs sweeps (default 6000)");
  cmd->add_option("--burnin", f.burnin, "Discarded initial sweeps (default 1000)");
  cmd->add_option("--seed", f.seed, "Random seed for data and chains");
  cmd->add_option("--threads", f.threads, "Worker pool width");
  cmd->add_flag("--standardize", f.standardize, "Scale predictors to unit variance before fitting");
  cmd->add_option("--out", f.out, "Output directory")->required();
}

void add_design(CLI::App* cmd, Flags& f) {
  cmd->add_option("--rho", f.rho, "AR(1) predictor correlation; comma list for grids");
  cmd->add_option("--n", f.n, "Training sample size; comma list for grids");
  cmd->add_option("--p", f.p, "Number of predictors");
  cmd->add_option("--replicates", f.replicates, "Number of simulated datasets L");
  cmd->add_option("--n-strong", f.n_strong, "Count of strong coefficients");
  cmd->add_option("--strong-value", f.strong_value, "Value of strong coefficients");
  cmd->add_option("--n-weak", f.n_weak, "Count of weak coefficients");
  cmd->add_option("--weak-value", f.weak_value, "Value of weak coefficients");
  cmd->add_option("--noise-sd", f.noise_sd, "Noise standard deviation");
  cmd->add_option("--n-test", f.n_test, "Held-out observations per replicate");
}

bnpl::ExperimentConfig build_config(const CLI::App* cmd, const Flags& f) {
  bnpl::ExperimentConfig cfg;
  if (!f.config_path.empty()) {
    try {
      cfg = bnpl::config_from_json(nlohmann::json::parse(bnpl::io::read_text_file(f.config_path)));
    } catch (const nlohmann::json::exception& e) {
      throw bnpl::ConfigError(f.config_path + ": " + e.what());
    } catch (const bnpl::DataError& e) {
      throw bnpl::ConfigError(e.what());
    }
  }
  auto given = [&](const char* name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--variant")) {
    cfg.variants.clear();
    for (const auto& v : parse_list<std::string>(f.variants)) cfg.variants.push_back(bnpl::parse_variant(v));
  }
  if (given("--a")) cfg.hyper.a = f.a;
  if (given("--b")) cfg.hyper.b = f.b;
  if (given("--alpha")) cfg.hyper.alpha = f.alpha;
  if (given("--iters")) cfg.hyper.n_iter = f.iters;
  if (given("--burnin")) cfg.hyper.burn_in = f.burnin;
  if (given("--seed")) {
    cfg.hyper.seed = f.seed;
    cfg.design.seed = f.seed;
  }
  if (given("--threads")) cfg.threads = f.threads;
  if (given("--standardize")) cfg.standardize = f.standardize;
  cfg.out_dir = f.out;
  if (given("--rho")) cfg.rhos = parse_list<double>(f.rho);
  if (given("--n")) cfg.ns = parse_list<int>(f.n);
  if (given("--p")) cfg.design.p = f.p;
  if (given("--replicates")) cfg.replicates = f.replicates;
  if (given("--n-strong")) cfg.design.n_strong = f.n_strong;
  if (given("--strong-value")) cfg.design.strong_value = f.strong_value;
  if (given("--n-weak")) cfg.design.n_weak = f.n_weak;
  if (given("--weak-value")) cfg.design.weak_value = f.weak_value;
  if (given("--noise-sd")) cfg.design.noise_sd = f.noise_sd;
  if (given("--n-test")) cfg.design.n_test = f.n_test;
  if (given("--folds")) cfg.cv_folds = f.folds;
  if (given("data")) {
    cfg.data_path = f.data;
    cfg.simulated = false;
  }
  if (given("--reference-fits")) cfg.reference_fits_path = f.reference_fits;
  cfg.design.rho = cfg.rhos.front();
  cfg.design.n = cfg.ns.front();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric Bayesian Lasso: Gibbs samplers, selection and evaluation"};
  app.require_subcommand(1);
  Flags f;

  auto* simulate = app.add_subcommand("simulate", "Write L simulated train/test datasets");
  add_common(simulate, f);
  add_design(simulate, f);

  auto* fit = app.add_subcommand("fit", "Fit each variant to a dataset CSV");
  add_common(fit, f);
  fit->add_option("data", f.data, "Training CSV (y,x1,...,xp)")->required();

  auto* replicate = app.add_subcommand("replicate", "Simulation grid over variants, rho and n");
  add_common(replicate, f);
  add_design(replicate, f);

  auto* cv = app.add_subcommand("cv", "K-fold cross validation on a dataset CSV");
  add_common(cv, f);
  cv->add_option("data", f.data, "Dataset CSV (y,x1,...,xp)")->required();
  cv->add_option("--folds", f.folds, "Number of folds (default 10)");
  cv->add_option("--reference-fits", f.reference_fits,
                 "CSV row_index,fitted_value; enables the average fitted density");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (simulate->parsed()) {
      const auto r = bnpl::run_simulate(build_config(simulate, f));
      std::printf("wrote %zu train/test pairs to %s (manifest %s)\n", r.train_files.size(),
                  f.out.c_str(), r.manifest.hash.c_str());
    } else if (fit->parsed()) {
      const auto r = bnpl::run_fit(build_config(fit, f));
      for (const auto& vf : r.fits) {
        std::size_t kept = 0;
        for (bool b : vf.selection.included) kept += b;
        std::printf("%-6s %zu of %zu coefficients selected\n",
                    std::string(bnpl::variant_label(vf.variant)).c_str(), kept,
                    vf.selection.included.size());
      }
    } else if (replicate->parsed()) {
      const auto r = bnpl::run_replicate(build_config(replicate, f));
      std::cout << r.csv;
    } else if (cv->parsed()) {
      const auto r = bnpl::run_cv(build_config(cv, f));
      std::cout << r.table_csv;
    }
  } catch (const bnpl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const bnpl::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const bnpl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const bnpl::ParameterDomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
