#include "bnpl/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "bnpl/error.hpp"

namespace bnpl::io {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

// Splits text into lines, dropping a trailing empty line.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

struct Table {
  std::optional<std::string> hash;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table parse_table(std::string_view text, std::string_view source,
                  std::optional<std::string_view> expected_hash) {
  Table t;
  auto lines = lines_of(text);
  std::size_t idx = 0;
  if (idx < lines.size() && lines[idx].starts_with(kHashPrefix)) {
    t.hash = std::string(trim(lines[idx].substr(kHashPrefix.size())));
    ++idx;
  }
  if (expected_hash && t.hash != std::optional<std::string>(std::string(*expected_hash))) {
    throw DataError(std::string(source) + ": manifest hash mismatch (expected " +
                    std::string(*expected_hash) + ", found " + t.hash.value_or("none") + ")");
  }
  if (idx >= lines.size()) throw DataError(std::string(source) + ": missing header row");
  for (const auto cell : split(lines[idx++])) t.header.emplace_back(cell);
  for (std::size_t line_no = idx; line_no < lines.size(); ++line_no) {
    const auto line = trim(lines[line_no]);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw DataError(std::string(source) + ": row " + std::to_string(line_no + 1) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(t.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = cells[c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() ||
          !std::isfinite(v)) {
        throw DataError(std::string(source) + ": row " + std::to_string(line_no + 1) +
                        ", column '" + t.header[c] + "': cannot parse '" +
                        std::string(cell) + "' as a finite number");
      }
      row[c] = v;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void append_hash_line(std::string& out, std::optional<std::string_view> hash) {
  if (hash) {
    out += kHashPrefix;
    out += *hash;
    out += '\n';
  }
}

std::string matrix_csv(const Eigen::MatrixXd& m, std::string_view prefix,
                       std::optional<std::string_view> hash) {
  std::string out;
  append_hash_line(out, hash);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j) out += ',';
    out += prefix;
    out += std::to_string(j + 1);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd table_matrix(const Table& t) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()),
                    static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][j];
    }
  }
  return m;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string content_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_hash(const fs::path& path) { return content_hash(read_text_file(path)); }

void write_text_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

std::string dataset_csv(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        std::optional<std::string_view> manifest_hash) {
  if (y.size() != X.rows()) throw DataError("dataset_csv: row mismatch");
  std::string out;
  append_hash_line(out, manifest_hash);
  out += 'y';
  for (Eigen::Index j = 0; j < X.cols(); ++j) out += ",x" + std::to_string(j + 1);
  out += '\n';
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out += format_double(y(i));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      out += ',';
      out += format_double(X(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_dataset(const fs::path& path, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                   std::optional<std::string_view> manifest_hash) {
  write_text_file(path, dataset_csv(y, X, manifest_hash));
}

RawData parse_dataset(std::string_view text, std::optional<std::string_view> expected_hash) {
  Table t = parse_table(text, "dataset", expected_hash);
  if (t.header.size() < 2 || t.header[0] != "y") {
    throw DataError("dataset: header must be 'y,x1,...,xp'");
  }
  for (std::size_t j = 1; j < t.header.size(); ++j) {
    if (t.header[j] != "x" + std::to_string(j)) {
      throw DataError("dataset: header column " + std::to_string(j + 1) + " is '" +
                      std::string(t.header[j]) + "', expected 'x" + std::to_string(j) + "'");
    }
  }
  if (t.rows.empty()) throw DataError("dataset: no data rows");
  const Eigen::MatrixXd m = table_matrix(t);
  RawData d;
  d.y = m.col(0);
  d.X = m.rightCols(m.cols() - 1);
  d.manifest_hash = t.hash;
  return d;
}

RawData read_dataset(const fs::path& path, std::optional<std::string_view> expected_hash) {
  try {
    return parse_dataset(read_text_file(path), expected_hash);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_draws(const fs::path& dir, const PosteriorDraws& draws,
                 std::optional<std::string_view> manifest_hash) {
  write_text_file(dir / "beta.csv", matrix_csv(draws.beta, "beta", manifest_hash));
  write_text_file(dir / "lambda2.csv", matrix_csv(draws.lambda2, "lambda2_", manifest_hash));
  std::string sigma;
  append_hash_line(sigma, manifest_hash);
  sigma += "sigma2\n";
  for (Eigen::Index s = 0; s < draws.sigma2.size(); ++s) sigma += format_double(draws.sigma2(s)) + '\n';
  write_text_file(dir / "sigma2.csv", sigma);
  std::string k;
  append_hash_line(k, manifest_hash);
  k += "k\n";
  for (int v : draws.k_trace) k += std::to_string(v) + '\n';
  write_text_file(dir / "k_trace.csv", k);
}

PosteriorDraws read_draws(const fs::path& dir, Variant variant,
                          std::optional<std::string_view> expected_hash) {
  auto load = [&](const char* name) {
    const fs::path path = dir / name;
    return table_matrix(parse_table(read_text_file(path), path.string(), expected_hash));
  };
  PosteriorDraws d;
  d.variant = variant;
  d.beta = load("beta.csv");
  d.lambda2 = load("lambda2.csv");
  d.sigma2 = load("sigma2.csv").col(0);
  const Eigen::MatrixXd k = load("k_trace.csv");
  d.k_trace.resize(static_cast<std::size_t>(k.rows()));
  for (Eigen::Index s = 0; s < k.rows(); ++s) d.k_trace[s] = static_cast<int>(k(s, 0));
  if (d.sigma2.size() != d.beta.rows() || d.lambda2.rows() != d.beta.rows() ||
      static_cast<Eigen::Index>(d.k_trace.size()) != d.beta.rows()) {
    throw DataError(dir.string() + ": draw files disagree on the number of draws");
  }
  return d;
}

void write_reference_fits(const fs::path& path, const Eigen::VectorXd& fits,
                          std::optional<std::string_view> manifest_hash) {
  std::string out;
  append_hash_line(out, manifest_hash);
  out += "row_index,fitted_value\n";
  for (Eigen::Index i = 0; i < fits.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(fits(i)) + '\n';
  }
  write_text_file(path, out);
}

Eigen::VectorXd read_reference_fits(const fs::path& path, Eigen::Index n) {
  const Table t = parse_table(read_text_file(path), path.string(), std::nullopt);
  if (t.header.size() != 2 || t.header[0] != "row_index" || t.header[1] != "fitted_value") {
    throw DataError(path.string() + ": header must be 'row_index,fitted_value'");
  }
  Eigen::VectorXd fits = Eigen::VectorXd::Constant(n, std::nan(""));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double idx = t.rows[r][0];
    if (idx != std::floor(idx) || idx < 0 || idx >= static_cast<double>(n)) {
      throw DataError(path.string() + ": row_index " + format_double(idx) + " out of range");
    }
    const auto i = static_cast<Eigen::Index>(idx);
    if (!std::isnan(fits(i))) {
      throw DataError(path.string() + ": duplicate row_index " + std::to_string(i));
    }
    fits(i) = t.rows[r][1];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isnan(fits(i))) {
      throw DataError(path.string() + ": missing row_index " + std::to_string(i));
    }
  }
  return fits;
}

}  // namespace bnpl::io
