#include "icopt/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace icopt {

namespace {

void write_coordinates(std::ostream& out, std::size_t n, std::span<const std::size_t> row_ptr,
                       std::span<const std::size_t> col_idx, std::span<const double> values) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << n << ' ' << n << ' ' << values.size() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%.17g", values[p]);
      out << i + 1 << ' ' << col_idx[p] + 1 << ' ' << buf << '\n';
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
  write_coordinates(out, a.n, a.row_ptr, a.col_idx, a.values);
}

void write_matrix_market(std::ostream& out, const LowerFactor& l) {
  write_coordinates(out, l.n(), l.row_ptr(), l.col_idx(), l.values());
}

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a) {
  auto out = open_out(path);
  write_matrix_market(out, a);
}

void write_matrix_market(const std::filesystem::path& path, const LowerFactor& l) {
  auto out = open_out(path);
  write_matrix_market(out, l);
}

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty input");
  std::istringstream header(lower(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix" || format != "coordinate") {
    throw std::runtime_error("matrix market: only 'matrix coordinate' files are supported");
  }
  if (field != "real" && field != "double" && field != "integer") {
    throw std::runtime_error("matrix market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw std::runtime_error("matrix market: unsupported symmetry '" + symmetry + "'");
  }
  while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
  }
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(std::istringstream(line) >> rows >> cols >> nnz)) {
    throw std::runtime_error("matrix market: malformed size line");
  }
  if (rows != cols) throw std::runtime_error("matrix market: matrix must be square");

  std::vector<Triplet> entries;
  entries.reserve(symmetry == "symmetric" ? 2 * nnz : nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw std::runtime_error("matrix market: truncated entry list");
    if (i == 0 || j == 0 || i > rows || j > cols) throw std::runtime_error("matrix market: index out of range");
    entries.push_back({i - 1, j - 1, v});
    if (symmetry == "symmetric" && i != j) entries.push_back({j - 1, i - 1, v});
  }
  CsrMatrix a = csr_from_triplets(rows, std::move(entries));
  a.validate();
  return a;
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_matrix_market(in);
}

LowerFactor read_lower_factor(const std::filesystem::path& path) {
  CsrMatrix m = read_matrix_market(path);
  for (std::size_t i = 0; i < m.n; ++i) {
    if (m.row_ptr[i + 1] > m.row_ptr[i] && m.col_idx[m.row_ptr[i + 1] - 1] > i) {
      throw std::runtime_error(path.string() + ": entry above the diagonal in row " + std::to_string(i + 1));
    }
  }
  return LowerFactor(m.n, std::move(m.row_ptr), std::move(m.col_idx), std::move(m.values));
}

}  // namespace icopt
