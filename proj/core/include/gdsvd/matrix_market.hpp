#pragma once

// Reader/writer for dense real Matrix Market files (coordinate or array).

#include "gdsvd/linalg.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

namespace gdsvd {

class MatrixMarketError : public std::runtime_error {
 public:
  MatrixMarketError(const std::string& what, std::size_t line);
  /// 1-based line of the offending input (0 when the file could not be opened).
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// integer, complex and pattern fields; skew-symmetric and hermitian matrices.
class UnsupportedFormatError : public MatrixMarketError {
 public:
  using MatrixMarketError::MatrixMarketError;
};

/// Symmetric files give a DenseSymMatrix, general files a plain Matrix.
using LoadedMatrix = std::variant<DenseSymMatrix, Matrix>;

LoadedMatrix read_matrix_market(std::istream& in);
LoadedMatrix load_matrix_market(const std::filesystem::path& path);

/// Array format; `symmetric` stores the lower triangle only.
void write_matrix_market(std::ostream& out, const Matrix& m, bool symmetric);

}  // namespace gdsvd
