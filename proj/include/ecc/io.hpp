#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <span>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ecc/errors.hpp"
#include "ecc/metrics.hpp"
#include "ecc/sparse_matrix.hpp"

namespace ecc {

enum class MatrixFormat { kSparseCoordinate, kDelimitedDense };

inline std::optional<MatrixFormat> parse_matrix_format(const std::string& s) {
  if (s == "coord") return MatrixFormat::kSparseCoordinate;
  if (s == "dense") return MatrixFormat::kDelimitedDense;
  return std::nullopt;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == '\t' || ch == ' ' || ch == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool is_number(const std::string& s) {
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line,
                                    const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace detail

// Sparse coordinate format: optional '%' comment lines, then a header
// "n_rows n_cols nnz", then nnz lines "row col value" with 1-based indices.
// Any nonzero value maps to a 1-entry. Dense format: one delimited row per
// cell (comma, space, or tab separated), optional non-numeric header row;
// every nonzero cell maps to a 1-entry.
inline BinaryMatrix load_matrix(const std::string& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::string line;
  std::size_t lineno = 0;

  if (format == MatrixFormat::kSparseCoordinate) {
    std::size_t n_rows = 0, n_cols = 0, nnz = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line[0] == '%') continue;
      const auto fields = detail::split_fields(line);
      if (fields.empty()) continue;
      if (fields.size() != 3)
        detail::parse_fail(path, lineno, "expected header 'n_rows n_cols nnz'");
      try {
        n_rows = std::stoull(fields[0]);
        n_cols = std::stoull(fields[1]);
        nnz = std::stoull(fields[2]);
      } catch (const std::exception&) {
        detail::parse_fail(path, lineno, "malformed dimension header");
      }
      have_header = true;
      break;
    }
    if (!have_header) detail::parse_fail(path, lineno, "missing dimension header");
    std::vector<Coord> coords;
    coords.reserve(nnz);
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line[0] == '%') continue;
      const auto fields = detail::split_fields(line);
      if (fields.empty()) continue;
      if (fields.size() != 2 && fields.size() != 3)
        detail::parse_fail(path, lineno, "expected 'row col [value]' triple");
      long long r = 0, c = 0;
      double v = 1.0;
      try {
        r = std::stoll(fields[0]);
        c = std::stoll(fields[1]);
        if (fields.size() == 3) v = std::stod(fields[2]);
      } catch (const std::exception&) {
        detail::parse_fail(path, lineno, "malformed coordinate triple");
      }
      if (r < 1 || static_cast<std::size_t>(r) > n_rows ||
          c < 1 || static_cast<std::size_t>(c) > n_cols)
        detail::parse_fail(path, lineno,
                           "index (" + std::to_string(r) + ", " +
                               std::to_string(c) + ") outside declared " +
                               std::to_string(n_rows) + "x" +
                               std::to_string(n_cols) + " matrix");
      if (v != 0.0)
        coords.emplace_back(static_cast<std::uint32_t>(r - 1),
                            static_cast<std::uint32_t>(c - 1));
    }
    if (coords.size() > nnz)
      throw DimensionHeaderMismatch(
          path + ": found " + std::to_string(coords.size()) +
          " nonzero triples but header declares " + std::to_string(nnz));
    return BinaryMatrix(n_rows, n_cols, coords);
  }

  // Dense.
  std::vector<Coord> coords;
  std::size_t n_cols = 0;
  std::uint32_t row = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (first_content) {
      first_content = false;
      bool numeric = true;
      for (const auto& f : fields) numeric = numeric && detail::is_number(f);
      if (!numeric) {
        n_cols = fields.size();
        continue;  // header row
      }
    }
    if (n_cols == 0) n_cols = fields.size();
    if (fields.size() != n_cols)
      detail::parse_fail(path, lineno,
                         "expected " + std::to_string(n_cols) +
                             " fields, found " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!detail::is_number(fields[c]))
        detail::parse_fail(path, lineno, "non-numeric cell '" + fields[c] + "'");
      if (std::stod(fields[c]) != 0.0)
        coords.emplace_back(row, static_cast<std::uint32_t>(c));
    }
    ++row;
  }
  if (row == 0 || n_cols == 0) throw ParseError(path + ": no matrix rows found");
  return BinaryMatrix(row, n_cols, coords);
}

inline void write_matrix_coordinate(const std::string& path,
                                    const BinaryMatrix& m,
                                    const std::string& comment = "") {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  if (!comment.empty()) out << "% " << comment << "\n";
  out << m.n_rows() << " " << m.n_cols() << " " << m.nnz() << "\n";
  for (std::uint32_t r = 0; r < m.n_rows(); ++r)
    for (std::uint32_t c : m.row(r))
      out << (r + 1) << " " << (c + 1) << " 1\n";
}

// Labels sidecar: one nonnegative cluster id per line.
inline LabelVector load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  LabelVector labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 1)
      detail::parse_fail(path, lineno, "expected one label per line");
    try {
      labels.push_back(static_cast<std::uint32_t>(std::stoul(fields[0])));
    } catch (const std::exception&) {
      detail::parse_fail(path, lineno, "malformed label '" + fields[0] + "'");
    }
  }
  if (labels.empty()) throw ParseError(path + ": no labels found");
  return labels;
}

inline void write_labels(const std::string& path,
                         std::span<const std::uint32_t> labels) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  for (std::uint32_t l : labels) out << l << "\n";
}

// Keeps the `count` columns with the largest Bernoulli variance
// p(1 - p) of their 1-fraction; ties go to the lower column index.
// Returns the reduced matrix and the kept column indices.
inline std::pair<BinaryMatrix, std::vector<std::uint32_t>> select_top_variance(
    const BinaryMatrix& m, std::size_t count) {
  if (count > m.n_cols())
    throw CountTooLarge("cannot keep " + std::to_string(count) +
                        " of " + std::to_string(m.n_cols()) + " columns");
  const double n = static_cast<double>(m.n_rows());
  std::vector<std::pair<double, std::uint32_t>> ranked(m.n_cols());
  for (std::uint32_t c = 0; c < m.n_cols(); ++c) {
    const double p = static_cast<double>(m.col(c).size()) / n;
    ranked[c] = {p * (1.0 - p), c};
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::uint32_t> kept(count);
  for (std::size_t i = 0; i < count; ++i) kept[i] = ranked[i].second;
  std::sort(kept.begin(), kept.end());
  std::vector<std::uint32_t> col_map(m.n_cols(), std::uint32_t(-1));
  for (std::uint32_t i = 0; i < kept.size(); ++i) col_map[kept[i]] = i;
  std::vector<Coord> coords;
  for (std::uint32_t r = 0; r < m.n_rows(); ++r)
    for (std::uint32_t c : m.row(r))
      if (col_map[c] != std::uint32_t(-1)) coords.emplace_back(r, col_map[c]);
  return {BinaryMatrix(m.n_rows(), count, coords), std::move(kept)};
}

// FNV-1a over the file bytes, for run manifests.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  std::ostringstream hex;
  hex << std::hex << hash;
  return hex.str();
}

}  // namespace ecc
