#include "gdsvd/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace gdsvd {

MatrixMarketError::MatrixMarketError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line that is neither a comment nor blank.
  bool next(std::string& out) {
    while (std::getline(in_, out)) {
      ++line_;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (blank(out) || out.front() == '%') continue;
      return true;
    }
    return false;
  }
  bool raw(std::string& out) {
    if (!std::getline(in_, out)) return false;
    ++line_;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
  }
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

template <typename T>
std::vector<T> parse_fields(const std::string& s, std::size_t count, std::size_t line, const char* what) {
  std::istringstream ss(s);
  std::vector<T> out;
  T v{};
  while (ss >> v) out.push_back(v);
  if (!ss.eof() || out.size() != count) {
    throw MatrixMarketError(std::string("malformed ") + what + ": '" + s + "'", line);
  }
  return out;
}

double parse_value(const std::string& tok, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
    throw MatrixMarketError("bad numeric value '" + tok + "'", line);
  }
  return v;
}

}  // namespace

LoadedMatrix read_matrix_market(std::istream& in) {
  LineReader reader(in);
  std::string header;
  if (!reader.raw(header)) throw MatrixMarketError("empty file", 1);
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw MatrixMarketError("missing %%MatrixMarket banner", 1);
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw MatrixMarketError("unsupported object '" + object + "'", 1);
  if (format != "coordinate" && format != "array") throw MatrixMarketError("unknown format '" + format + "'", 1);
  if (field == "integer" || field == "complex" || field == "pattern") {
    throw UnsupportedFormatError("unsupported field '" + field + "' (only real is accepted)", 1);
  }
  if (field != "real" && field != "double") throw MatrixMarketError("unknown field '" + field + "'", 1);
  if (symmetry == "skew-symmetric" || symmetry == "hermitian") {
    throw UnsupportedFormatError("unsupported symmetry '" + symmetry + "'", 1);
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw MatrixMarketError("unknown symmetry '" + symmetry + "'", 1);
  }
  const bool symmetric = symmetry == "symmetric";
  const bool coordinate = format == "coordinate";

  std::string line;
  if (!reader.next(line)) throw MatrixMarketError("missing size line", reader.line() + 1);
  const std::size_t size_line = reader.line();
  const auto dims = parse_fields<long long>(line, coordinate ? 3 : 2, size_line, "size line");
  const long long rows = dims[0];
  const long long cols = dims[1];
  if (rows < 1 || cols < 1) throw MatrixMarketError("dimensions must be positive", size_line);
  if (symmetric && rows != cols) throw MatrixMarketError("symmetric matrix must be square", size_line);

  Matrix m = Matrix::Zero(rows, cols);
  if (coordinate) {
    const long long nnz = dims[2];
    if (nnz < 0) throw MatrixMarketError("negative entry count", size_line);
    for (long long e = 0; e < nnz; ++e) {
      if (!reader.next(line)) {
        throw MatrixMarketError("expected " + std::to_string(nnz) + " entries, got " + std::to_string(e),
                                reader.line() + 1);
      }
      std::istringstream ss(line);
      long long i = 0, j = 0;
      std::string tok, extra;
      if (!(ss >> i >> j >> tok) || (ss >> extra)) throw MatrixMarketError("malformed entry '" + line + "'", reader.line());
      if (i < 1 || i > rows || j < 1 || j > cols) throw MatrixMarketError("index out of range", reader.line());
      const double v = parse_value(tok, reader.line());
      m(i - 1, j - 1) += v;
      if (symmetric && i != j) m(j - 1, i - 1) += v;
    }
  } else {
    // Column-major; symmetric files hold the lower triangle only.
    for (long long j = 0; j < cols; ++j) {
      for (long long i = symmetric ? j : 0; i < rows; ++i) {
        if (!reader.next(line)) throw MatrixMarketError("too few array entries", reader.line() + 1);
        std::istringstream ss(line);
        std::string tok, extra;
        if (!(ss >> tok) || (ss >> extra)) throw MatrixMarketError("malformed entry '" + line + "'", reader.line());
        const double v = parse_value(tok, reader.line());
        m(i, j) = v;
        if (symmetric) m(j, i) = v;
      }
    }
  }
  if (reader.next(line)) throw MatrixMarketError("trailing data after last entry", reader.line());
  if (symmetric) return DenseSymMatrix::symmetrize(m);
  return m;
}

LoadedMatrix load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError("cannot open '" + path.string() + "'", 0);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& m, bool symmetric) {
  if (symmetric && m.rows() != m.cols()) throw DimensionError("write_matrix_market: symmetric output needs a square matrix");
  out << "%%MatrixMarket matrix array real " << (symmetric ? "symmetric" : "general") << '\n';
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = symmetric ? j : 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf << '\n';
    }
  }
}

}  // namespace gdsvd
