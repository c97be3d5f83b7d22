#include "bnpl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "bnpl/error.hpp"
#include "bnpl/gibbs.hpp"
#include "bnpl/rng.hpp"

namespace bnpl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kFoldTag = 0xf01dULL;

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t chain_seed(const Hyperparams& hyper, std::uint64_t replicate) {
  return derive_seed(hyper.seed, replicate);
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  io::write_text_file(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

std::string metrics_line(const GridCell& c) {
  return std::string(variant_label(c.variant)) + ',' + io::format_double(c.rho) + ',' +
         std::to_string(c.n) + ',' + io::format_double(c.report.mse) + ',' +
         io::format_double(c.report.sel_acc) + ',' + io::format_double(c.report.mspe) + ',' +
         io::format_double(c.report.elppd) + '\n';
}

}  // namespace

void ExperimentConfig::validate() const {
  if (variants.empty()) throw ConfigError("no variant selected");
  hyper.validate();
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (cv_folds && *cv_folds < 2) throw ConfigError("folds must be at least 2");
  if (simulated) {
    if (rhos.empty() || ns.empty()) throw ConfigError("empty rho or n grid");
    for (double rho : rhos) {
      for (int n : ns) {
        SimDesign d = design;
        d.rho = rho;
        d.n = n;
        d.validate();
      }
    }
  } else if (!data_path) {
    throw ConfigError("either a simulation design or an input data path is required");
  }
}

json to_json(const ExperimentConfig& cfg) {
  json variants = json::array();
  for (Variant v : cfg.variants) variants.push_back(std::string(variant_name(v)));
  const SimDesign& d = cfg.design;
  json j = {
      {"variants", variants},
      {"a", cfg.hyper.a},
      {"b", cfg.hyper.b},
      {"alpha", cfg.hyper.alpha},
      {"iters", cfg.hyper.n_iter},
      {"burnin", cfg.hyper.burn_in},
      {"seed", cfg.hyper.seed},
      {"sigma2_prior_shape", cfg.hyper.sigma2_prior_shape},
      {"sigma2_prior_scale", cfg.hyper.sigma2_prior_scale},
      {"ridge_start", cfg.hyper.ridge_start},
      {"design",
       {{"p", d.p},
        {"n_strong", d.n_strong},
        {"strong_value", d.strong_value},
        {"n_weak", d.n_weak},
        {"weak_value", d.weak_value},
        {"noise_sd", d.noise_sd},
        {"n_test", d.n_test},
        {"seed", d.seed}}},
      {"rhos", cfg.rhos},
      {"ns", cfg.ns},
      {"simulated", cfg.simulated},
      {"data_path", cfg.data_path ? json(*cfg.data_path) : json(nullptr)},
      {"reference_fits_path",
       cfg.reference_fits_path ? json(*cfg.reference_fits_path) : json(nullptr)},
      {"replicates", cfg.replicates},
      {"folds", cfg.cv_folds ? json(*cfg.cv_folds) : json(nullptr)},
      {"standardize", cfg.standardize},
      {"out", cfg.out_dir},
      {"threads", cfg.threads},
  };
  return j;
}

ExperimentConfig config_from_json(const json& in) {
  const json& j = in.contains("config") ? in.at("config") : in;
  ExperimentConfig cfg;
  try {
    if (j.contains("variants")) {
      cfg.variants.clear();
      for (const auto& v : j.at("variants")) cfg.variants.push_back(parse_variant(v.get<std::string>()));
    }
    auto opt = [&](const char* key, auto& target) {
      if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(target);
    };
    opt("a", cfg.hyper.a);
    opt("b", cfg.hyper.b);
    opt("alpha", cfg.hyper.alpha);
    opt("iters", cfg.hyper.n_iter);
    opt("burnin", cfg.hyper.burn_in);
    opt("seed", cfg.hyper.seed);
    opt("sigma2_prior_shape", cfg.hyper.sigma2_prior_shape);
    opt("sigma2_prior_scale", cfg.hyper.sigma2_prior_scale);
    opt("ridge_start", cfg.hyper.ridge_start);
    if (j.contains("design")) {
      const json& d = j.at("design");
      auto dopt = [&](const char* key, auto& target) {
        if (d.contains(key)) d.at(key).get_to(target);
      };
      dopt("p", cfg.design.p);
      dopt("n_strong", cfg.design.n_strong);
      dopt("strong_value", cfg.design.strong_value);
      dopt("n_weak", cfg.design.n_weak);
      dopt("weak_value", cfg.design.weak_value);
      dopt("noise_sd", cfg.design.noise_sd);
      dopt("n_test", cfg.design.n_test);
      dopt("seed", cfg.design.seed);
    }
    opt("rhos", cfg.rhos);
    opt("ns", cfg.ns);
    opt("simulated", cfg.simulated);
    if (j.contains("data_path") && !j.at("data_path").is_null()) {
      cfg.data_path = j.at("data_path").get<std::string>();
    }
    if (j.contains("reference_fits_path") && !j.at("reference_fits_path").is_null()) {
      cfg.reference_fits_path = j.at("reference_fits_path").get<std::string>();
    }
    opt("replicates", cfg.replicates);
    if (j.contains("folds") && !j.at("folds").is_null()) cfg.cv_folds = j.at("folds").get<int>();
    opt("standardize", cfg.standardize);
    opt("out", cfg.out_dir);
    opt("threads", cfg.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  if (!cfg.rhos.empty()) cfg.design.rho = cfg.rhos.front();
  if (!cfg.ns.empty()) cfg.design.n = cfg.ns.front();
  return cfg;
}

void RunManifest::seal() {
  // Where results go and how many threads produce them do not change them.
  json identity = config;
  identity.erase("out");
  identity.erase("threads");
  const json content = {{"config", identity},
                        {"replicate_seeds", replicate_seeds},
                        {"input_hashes", input_hashes},
                        {"software_version", kSoftwareVersion}};
  hash = io::content_hash(content.dump());
}

json RunManifest::to_json() const {
  return {{"config", config},
          {"replicate_seeds", replicate_seeds},
          {"input_hashes", input_hashes},
          {"software_version", kSoftwareVersion},
          {"wall_times", wall_times},
          {"manifest_hash", hash}};
}

void parallel_for(std::size_t jobs, int width, const std::function<void(std::size_t)>& job,
                  std::vector<bool>* done) {
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<char> finished(jobs, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        job(i);
        finished[i] = 1;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(std::max(width, 1)), jobs);
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  if (done) done->assign(finished.begin(), finished.end());
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

PosteriorDraws fit_dataset(const Dataset& data, const Hyperparams& hyper, std::uint64_t stream_id) {
  PosteriorDraws draws = run_chain(data, hyper, stream_id);
  if (data.standardized) {
    for (Eigen::Index j = 0; j < draws.p(); ++j) draws.beta.col(j) /= data.x_scales(j);
  }
  return draws;
}

SimulatedReplicate simulate_replicate(const SimDesign& design, std::uint64_t replicate) {
  design.validate();
  SimulatedReplicate r;
  r.beta_true = gen_beta_true(design);
  RngStream train_rng(design.seed, train_stream(replicate));
  r.train_X = gen_design_matrix(design, design.n, train_rng);
  r.train_y = gen_response(r.train_X, r.beta_true, design.noise_sd, train_rng);
  RngStream test_rng(design.seed, test_stream(replicate));
  r.test_X = gen_design_matrix(design, design.n_test, test_rng);
  r.test_y = gen_response(r.test_X, r.beta_true, design.noise_sd, test_rng);
  return r;
}

ReplicateMetrics evaluate_replicate(const SimulatedReplicate& rep, const Hyperparams& hyper,
                                    bool standardize) {
  const Dataset data = prepare(rep.train_y, rep.train_X, standardize);
  const PosteriorDraws draws = fit_dataset(data, hyper);
  const SelectionResult sel = select(draws);
  const Centering centering = Centering::of(data);
  ReplicateMetrics m;
  m.mse = mse(rep.beta_true, sel.beta_hat);
  m.sel_acc = selection_accuracy(rep.beta_true, sel.beta_hat);
  if (rep.test_y.size() > 0) {
    m.mspe = mspe(rep.test_y, rep.test_X, sel.beta_hat, centering);
    m.elppd = elppd(rep.test_y, rep.test_X, draws, centering);
  }
  return m;
}

SimulateResult run_simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.simulated) throw ConfigError("simulate requires a simulation design");
  const auto start = std::chrono::steady_clock::now();
  SimDesign design = cfg.design;
  design.rho = cfg.rhos.front();
  design.n = cfg.ns.front();

  SimulateResult out;
  out.manifest.config = to_json(cfg);
  for (int l = 0; l < cfg.replicates; ++l) {
    out.manifest.replicate_seeds.push_back(chain_seed(cfg.hyper, static_cast<std::uint64_t>(l)));
  }
  out.manifest.config["beta_true"] = vector_json(gen_beta_true(design));
  out.manifest.seal();

  const fs::path dir(cfg.out_dir);
  std::vector<SimulatedReplicate> reps(static_cast<std::size_t>(cfg.replicates));
  parallel_for(reps.size(), cfg.threads, [&](std::size_t l) {
    reps[l] = simulate_replicate(design, l);
  });
  for (std::size_t l = 0; l < reps.size(); ++l) {
    char name[32];
    std::snprintf(name, sizeof name, "%03zu", l + 1);
    const fs::path train = dir / (std::string("train_") + name + ".csv");
    const fs::path test = dir / (std::string("test_") + name + ".csv");
    io::write_dataset(train, reps[l].train_y, reps[l].train_X, out.manifest.hash);
    io::write_dataset(test, reps[l].test_y, reps[l].test_X, out.manifest.hash);
    out.train_files.push_back(train);
    out.test_files.push_back(test);
  }
  out.manifest.wall_times["total"] = seconds_since(start);
  write_manifest(dir, out.manifest);
  return out;
}

FitResult run_fit(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.data_path) throw ConfigError("fit requires a training data file");
  const auto start = std::chrono::steady_clock::now();
  const io::RawData raw = io::read_dataset(*cfg.data_path);
  const Dataset data = prepare(raw.y, raw.X, cfg.standardize);

  FitResult out;
  out.manifest.config = to_json(cfg);
  out.manifest.replicate_seeds = {cfg.hyper.seed};
  out.manifest.input_hashes["data"] = io::file_hash(*cfg.data_path);
  out.manifest.seal();

  const std::vector<double> levels{0.025, 0.25, 0.5, 0.75, 0.975};
  out.fits.resize(cfg.variants.size());
  parallel_for(cfg.variants.size(), cfg.threads, [&](std::size_t i) {
    Hyperparams h = cfg.hyper;
    h.variant = cfg.variants[i];
    VariantFit f{h.variant, fit_dataset(data, h), {}, {}, {}};
    f.selection = select(f.draws);
    f.summary = posterior_summary(f.draws, levels);
    f.fitted_mean = predict(raw.X, f.selection.posterior_mean, Centering::of(data));
    out.fits[i] = std::move(f);
  });

  const fs::path dir(cfg.out_dir);
  json variants = json::object();
  for (const VariantFit& f : out.fits) {
    const std::string name(variant_name(f.variant));
    io::write_draws(dir / name, f.draws, out.manifest.hash);
    io::write_reference_fits(dir / name / "fitted.csv", f.fitted_mean, out.manifest.hash);
    json q = json::array();
    for (Eigen::Index j = 0; j < f.summary.quantiles.rows(); ++j) {
      q.push_back(vector_json(f.summary.quantiles.row(j).transpose()));
    }
    const auto& k = f.draws.k_trace;
    variants[name] = {
        {"variant", std::string(variant_label(f.variant))},
        {"included", f.selection.included},
        {"beta_hat", vector_json(f.selection.beta_hat)},
        {"neighborhood_prob", vector_json(f.selection.neighborhood_prob)},
        {"posterior_mean", vector_json(f.selection.posterior_mean)},
        {"posterior_sd", vector_json(f.selection.posterior_sd)},
        {"sd_estimator", "sample standard deviation (S-1 denominator)"},
        {"quantile_levels", levels},
        {"quantiles", q},
        {"mean_clusters",
         static_cast<double>(std::accumulate(k.begin(), k.end(), 0LL)) / static_cast<double>(k.size())},
        {"draws", f.draws.draws()},
    };
    out.manifest.wall_times[name] = f.draws.wall_seconds;
  }
  out.summary = {{"manifest_hash", out.manifest.hash},
                 {"n", data.n()},
                 {"p", data.p()},
                 {"standardized", cfg.standardize},
                 {"constant_columns", data.constant_columns},
                 {"variants", variants}};
  io::write_text_file(dir / "summary.json", out.summary.dump(2) + "\n");
  out.manifest.wall_times["total"] = seconds_since(start);
  write_manifest(dir, out.manifest);
  return out;
}

GridResult run_replicate(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.simulated) throw ConfigError("replicate requires a simulation design");
  const auto start = std::chrono::steady_clock::now();
  GridResult out;
  out.manifest.config = to_json(cfg);
  for (int l = 0; l < cfg.replicates; ++l) {
    out.manifest.replicate_seeds.push_back(chain_seed(cfg.hyper, static_cast<std::uint64_t>(l)));
  }
  out.manifest.seal();

  struct Job {
    std::size_t cell;
    int replicate;
  };
  for (double rho : cfg.rhos) {
    for (int n : cfg.ns) {
      for (Variant v : cfg.variants) out.cells.push_back({v, rho, n, {}});
    }
  }
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < out.cells.size(); ++c) {
    for (int l = 0; l < cfg.replicates; ++l) jobs.push_back({c, l});
  }
  std::vector<ReplicateMetrics> results(jobs.size());
  std::vector<bool> done;
  const fs::path dir(cfg.out_dir);
  try {
    parallel_for(
        jobs.size(), cfg.threads,
        [&](std::size_t i) {
          const GridCell& cell = out.cells[jobs[i].cell];
          SimDesign design = cfg.design;
          design.rho = cell.rho;
          design.n = cell.n;
          const auto l = static_cast<std::uint64_t>(jobs[i].replicate);
          Hyperparams h = cfg.hyper;
          h.variant = cell.variant;
          h.seed = chain_seed(cfg.hyper, l);
          try {
            results[i] = evaluate_replicate(simulate_replicate(design, l), h, cfg.standardize);
          } catch (const NumericalError& e) {
            throw NumericalError("replicate " + std::to_string(l + 1) + " (" +
                                 std::string(variant_label(cell.variant)) + "): " + e.what());
          }
        },
        &done);
  } catch (...) {
    json partial = json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (!done[i]) continue;
      const GridCell& cell = out.cells[jobs[i].cell];
      partial.push_back({{"variant", std::string(variant_label(cell.variant))},
                         {"rho", cell.rho},
                         {"n", cell.n},
                         {"replicate", jobs[i].replicate + 1},
                         {"mse", results[i].mse},
                         {"sel_acc", results[i].sel_acc},
                         {"mspe", results[i].mspe},
                         {"elppd", results[i].elppd}});
    }
    io::write_text_file(dir / "grid.partial.json",
                        json{{"manifest_hash", out.manifest.hash}, {"completed", partial}}.dump(2) +
                            "\n");
    throw;
  }

  for (std::size_t c = 0; c < out.cells.size(); ++c) {
    std::vector<ReplicateMetrics> per(results.begin() + static_cast<std::ptrdiff_t>(c * cfg.replicates),
                                      results.begin() + static_cast<std::ptrdiff_t>((c + 1) * cfg.replicates));
    out.cells[c].report = aggregate(std::move(per));
  }

  out.csv = std::string(io::kHashPrefix) + out.manifest.hash + "\n" +
            "variant,rho,n,mse,sel_acc,mspe,elppd\n";
  json cells = json::array();
  for (const GridCell& c : out.cells) {
    out.csv += metrics_line(c);
    json reps = json::array();
    for (const auto& m : c.report.replicates) {
      reps.push_back({{"mse", m.mse}, {"sel_acc", m.sel_acc}, {"mspe", m.mspe}, {"elppd", m.elppd}});
    }
    cells.push_back({{"variant", std::string(variant_label(c.variant))},
                     {"rho", c.rho},
                     {"n", c.n},
                     {"mse", c.report.mse},
                     {"sel_acc", c.report.sel_acc},
                     {"mspe", c.report.mspe},
                     {"elppd", c.report.elppd},
                     {"replicates", reps}});
  }
  out.json = {{"manifest_hash", out.manifest.hash},
              {"replicates", cfg.replicates},
              {"cells", cells}};
  io::write_text_file(dir / "grid.csv", out.csv);
  io::write_text_file(dir / "grid.json", out.json.dump(2) + "\n");
  out.manifest.wall_times["total"] = seconds_since(start);
  write_manifest(dir, out.manifest);
  return out;
}

std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("folds must be at least 2");
  if (k > n) {
    throw ConfigError("fold count " + std::to_string(k) + " exceeds the number of rows " +
                      std::to_string(n));
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(seed, kFoldTag);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

FoldMetrics evaluate_fold(const io::RawData& data, const std::vector<int>& test_rows,
                          const Hyperparams& hyper, bool standardize, std::uint64_t stream_id) {
  const auto n = static_cast<int>(data.y.size());
  std::vector<char> held(static_cast<std::size_t>(n), 0);
  for (int r : test_rows) held[r] = 1;
  std::vector<int> train_rows;
  for (int i = 0; i < n; ++i) {
    if (!held[i]) train_rows.push_back(i);
  }
  const Eigen::VectorXd train_y = data.y(train_rows);
  const Eigen::MatrixXd train_X = data.X(train_rows, Eigen::all);
  const Eigen::VectorXd test_y = data.y(test_rows);
  const Eigen::MatrixXd test_X = data.X(test_rows, Eigen::all);

  const Dataset train = prepare(train_y, train_X, standardize);
  const PosteriorDraws draws = fit_dataset(train, hyper, stream_id);
  const SelectionResult sel = select(draws);
  const Centering centering = Centering::of(train);
  return {mspe(test_y, test_X, sel.beta_hat, centering),
          elppd(test_y, test_X, draws, centering)};
}

CvResult run_cv(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.data_path) throw ConfigError("cv requires a data file");
  const int k = cfg.cv_folds.value_or(10);
  const auto start = std::chrono::steady_clock::now();
  const io::RawData data = io::read_dataset(*cfg.data_path);
  const auto n = static_cast<int>(data.y.size());

  CvResult out;
  out.manifest.config = to_json(cfg);
  out.manifest.config["folds"] = k;
  out.manifest.config["fold_assignment"] = "seeded uniform shuffle";
  out.manifest.replicate_seeds = {cfg.hyper.seed};
  out.manifest.input_hashes["data"] = io::file_hash(*cfg.data_path);
  std::optional<Eigen::VectorXd> reference;
  if (cfg.reference_fits_path) {
    reference = io::read_reference_fits(*cfg.reference_fits_path, n);
    out.manifest.input_hashes["reference_fits"] = io::file_hash(*cfg.reference_fits_path);
  }
  out.manifest.seal();
  out.folds = make_folds(n, k, cfg.hyper.seed);

  const std::size_t nv = cfg.variants.size();
  const std::size_t fold_jobs = nv * static_cast<std::size_t>(k);
  const std::size_t total_jobs = fold_jobs + (reference ? nv : 0);
  std::vector<FoldMetrics> fold_results(fold_jobs);
  std::vector<std::optional<FittedDensity>> densities(nv);
  parallel_for(total_jobs, cfg.threads, [&](std::size_t i) {
    Hyperparams h = cfg.hyper;
    if (i < fold_jobs) {
      const std::size_t v = i / static_cast<std::size_t>(k);
      const std::size_t f = i % static_cast<std::size_t>(k);
      h.variant = cfg.variants[v];
      try {
        fold_results[i] = evaluate_fold(data, out.folds[f], h, cfg.standardize, f + 1);
      } catch (const NumericalError& e) {
        throw NumericalError("fold " + std::to_string(f + 1) + ": " + e.what());
      }
      return;
    }
    const std::size_t v = i - fold_jobs;
    h.variant = cfg.variants[v];
    const Dataset full = prepare(data.y, data.X, cfg.standardize);
    const PosteriorDraws draws = fit_dataset(full, h);
    densities[v] = avg_fitted_density(fitted_draws(draws, data.X, Centering::of(full)), *reference);
  });

  json variants = json::object();
  std::string mspe_row = "Average CV MSPE";
  std::string elppd_row = "Average CV elppd";
  std::string density_row = "Average Fitted Density";
  std::string header;
  for (std::size_t v = 0; v < nv; ++v) {
    CvVariantReport r;
    r.variant = cfg.variants[v];
    json folds = json::array();
    for (int f = 0; f < k; ++f) {
      const FoldMetrics& m = fold_results[v * static_cast<std::size_t>(k) + static_cast<std::size_t>(f)];
      r.folds.push_back(m);
      r.mean_mspe += m.mspe / k;
      r.mean_elppd += m.elppd / k;
      folds.push_back({{"fold", f + 1}, {"mspe", m.mspe}, {"elppd", m.elppd}});
    }
    r.fitted_density = densities[v];
    json entry = {{"variant", std::string(variant_label(r.variant))},
                  {"folds", folds},
                  {"mspe", r.mean_mspe},
                  {"elppd", r.mean_elppd},
                  {"avg_fitted_density", nullptr},
                  {"bandwidth", nullptr}};
    if (r.fitted_density) {
      entry["avg_fitted_density"] = r.fitted_density->value;
      entry["bandwidth"] = r.fitted_density->bandwidth;
      entry["warnings"] = r.fitted_density->warnings;
    }
    variants[std::string(variant_name(r.variant))] = entry;
    header += ',' + std::string(variant_label(r.variant));
    mspe_row += ',' + io::format_double(r.mean_mspe);
    elppd_row += ',' + io::format_double(r.mean_elppd);
    density_row += ',' + (r.fitted_density ? io::format_double(r.fitted_density->value) : "");
    out.variants.push_back(std::move(r));
  }
  out.table_csv = std::string(io::kHashPrefix) + out.manifest.hash + "\n" + "metric" + header +
                  "\n" + mspe_row + "\n" + elppd_row + "\n";
  if (reference) out.table_csv += density_row + "\n";

  std::string fold_csv = std::string(io::kHashPrefix) + out.manifest.hash + "\nrow_index,fold\n";
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t f = 0; f < out.folds.size(); ++f) {
    for (int r : out.folds[f]) fold_of[r] = static_cast<int>(f) + 1;
  }
  for (int i = 0; i < n; ++i) fold_csv += std::to_string(i) + ',' + std::to_string(fold_of[i]) + '\n';

  out.json = {{"manifest_hash", out.manifest.hash}, {"folds", k}, {"variants", variants}};
  const fs::path dir(cfg.out_dir);
  io::write_text_file(dir / "cv.json", out.json.dump(2) + "\n");
  io::write_text_file(dir / "cv_table.csv", out.table_csv);
  io::write_text_file(dir / "folds.csv", fold_csv);
  out.manifest.wall_times["total"] = seconds_since(start);
  write_manifest(dir, out.manifest);
  return out;
}

}  // namespace bnpl
