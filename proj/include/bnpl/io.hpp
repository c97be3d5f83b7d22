#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "bnpl/model.hpp"

namespace bnpl::io {

// Shortest-safe decimal form with 17 significant digits; parses back to the
// identical double.
std::string format_double(double x);

// Git-style content hash: hex SHA-1 of "blob <size>\0" + content.
std::string content_hash(std::string_view content);
std::string file_hash(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Output files written by this tool start with this comment line; readers
// skip it, and reject the file when an expected hash is given and differs.
inline constexpr std::string_view kHashPrefix = "# manifest_hash=";

struct RawData {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::optional<std::string> manifest_hash;
};

// Dataset CSV: header "y,x1,...,xp", one observation per row.
std::string dataset_csv(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        std::optional<std::string_view> manifest_hash);
void write_dataset(const std::filesystem::path& path, const Eigen::VectorXd& y,
                   const Eigen::MatrixXd& X, std::optional<std::string_view> manifest_hash);
// Throws DataError naming the offending row and column.
RawData parse_dataset(std::string_view text, std::optional<std::string_view> expected_hash = {});
RawData read_dataset(const std::filesystem::path& path,
                     std::optional<std::string_view> expected_hash = {});

// Draw archive: beta.csv (S x p), sigma2.csv, lambda2.csv (S x p),
// k_trace.csv inside one directory.
void write_draws(const std::filesystem::path& dir, const PosteriorDraws& draws,
                 std::optional<std::string_view> manifest_hash);
PosteriorDraws read_draws(const std::filesystem::path& dir, Variant variant,
                          std::optional<std::string_view> expected_hash = {});

// Reference fits: "row_index,fitted_value", 0-based row indices covering
// every observation exactly once.
void write_reference_fits(const std::filesystem::path& path, const Eigen::VectorXd& fits,
                          std::optional<std::string_view> manifest_hash);
Eigen::VectorXd read_reference_fits(const std::filesystem::path& path, Eigen::Index n);

}  // namespace bnpl::io
