#pragma once

#include <filesystem>
#include <iosfwd>

#include "icopt/sparse.hpp"

namespace icopt {

// Matrix Market coordinate format, real values, 1-based indices. Values are
// written with 17 significant digits so a write/read cycle is lossless.

void write_matrix_market(std::ostream& out, const CsrMatrix& a);
void write_matrix_market(std::ostream& out, const LowerFactor& l);
void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a);
void write_matrix_market(const std::filesystem::path& path, const LowerFactor& l);

/// Reads `general` or `symmetric` coordinate files; symmetric files are expanded to both halves.
CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market(const std::filesystem::path& path);

/// Reads a lower-triangular coordinate file into a factor.
LowerFactor read_lower_factor(const std::filesystem::path& path);

}  // namespace icopt
