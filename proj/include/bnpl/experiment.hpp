#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnpl/datagen.hpp"
#include "bnpl/eval.hpp"
#include "bnpl/io.hpp"
#include "bnpl/model.hpp"
#include "bnpl/selection.hpp"

namespace bnpl {

inline constexpr const char* kSoftwareVersion = "0.1.0";

struct ExperimentConfig {
  std::vector<Variant> variants{Variant::kNonparametric, Variant::kBayesLasso,
                                Variant::kAdaptive};
  Hyperparams hyper;
  // Simulation design; rho and n may list several grid values.
  SimDesign design;
  std::vector<double> rhos{0.3};
  std::vector<int> ns{100};
  bool simulated = true;
  std::optional<std::string> data_path;
  std::optional<std::string> reference_fits_path;
  int replicates = 1;
  std::optional<int> cv_folds;
  bool standardize = false;
  std::string out_dir = "out";
  int threads = 1;

  // Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
// Accepts either a bare config object or a manifest carrying one under
// "config".
ExperimentConfig config_from_json(const nlohmann::json& j);

struct RunManifest {
  nlohmann::json config;
  std::vector<std::uint64_t> replicate_seeds;
  nlohmann::json input_hashes = nlohmann::json::object();
  nlohmann::json wall_times = nlohmann::json::object();
  std::string hash;  // content hash of config, seeds and input hashes

  // Fills `hash`; wall times are excluded.
  void seal();
  nlohmann::json to_json() const;
};

// Runs job(i) for i in [0, jobs) on at most `width` threads. Every job runs
// even if another fails; afterwards the lowest-index failure is rethrown.
// `done`, when given, receives the indices that finished successfully.
void parallel_for(std::size_t jobs, int width, const std::function<void(std::size_t)>& job,
                  std::vector<bool>* done = nullptr);

// Standardized fits are mapped back to the original predictor scale.
PosteriorDraws fit_dataset(const Dataset& data, const Hyperparams& hyper,
                           std::uint64_t stream_id = 0);

// Training set and held-out set for replicate l of a simulated grid cell.
struct SimulatedReplicate {
  Eigen::VectorXd beta_true;
  Eigen::VectorXd train_y;
  Eigen::MatrixXd train_X;
  Eigen::VectorXd test_y;
  Eigen::MatrixXd test_X;
};
SimulatedReplicate simulate_replicate(const SimDesign& design, std::uint64_t replicate);

// Fits one variant on one simulated replicate and scores it.
ReplicateMetrics evaluate_replicate(const SimulatedReplicate& rep, const Hyperparams& hyper,
                                    bool standardize);

// ---- simulate ----
struct SimulateResult {
  RunManifest manifest;
  std::vector<std::filesystem::path> train_files;
  std::vector<std::filesystem::path> test_files;
};
SimulateResult run_simulate(const ExperimentConfig& cfg);

// ---- fit ----
struct VariantFit {
  Variant variant;
  PosteriorDraws draws;
  SelectionResult selection;
  QuantileTable summary;
  Eigen::VectorXd fitted_mean;  // posterior-mean in-sample fits
};
struct FitResult {
  RunManifest manifest;
  std::vector<VariantFit> fits;
  nlohmann::json summary;
};
FitResult run_fit(const ExperimentConfig& cfg);

// ---- replicate grid ----
struct GridCell {
  Variant variant;
  double rho;
  int n;
  EvalReport report;
};
struct GridResult {
  RunManifest manifest;
  std::vector<GridCell> cells;
  std::string csv;
  nlohmann::json json;
};
GridResult run_replicate(const ExperimentConfig& cfg);

// ---- cross validation ----
// Seeded uniform shuffle; fold f holds shuffled positions i with i % k == f.
std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed);

struct FoldMetrics {
  double mspe = 0.0;
  double elppd = 0.0;
};
// Fits on every row outside `test_rows` (centering from those rows only)
// and scores the held-out rows.
FoldMetrics evaluate_fold(const io::RawData& data, const std::vector<int>& test_rows,
                          const Hyperparams& hyper, bool standardize,
                          std::uint64_t stream_id = 0);

struct CvVariantReport {
  Variant variant;
  std::vector<FoldMetrics> folds;
  double mean_mspe = 0.0;
  double mean_elppd = 0.0;
  std::optional<FittedDensity> fitted_density;
};
struct CvResult {
  RunManifest manifest;
  std::vector<std::vector<int>> folds;
  std::vector<CvVariantReport> variants;
  nlohmann::json json;
  std::string table_csv;
};
CvResult run_cv(const ExperimentConfig& cfg);

}  // namespace bnpl
