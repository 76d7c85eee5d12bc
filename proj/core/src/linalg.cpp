#include "gdsvd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace gdsvd {

namespace {

void require_dim(Index expected, Index got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": dimension mismatch (expected " +
                         std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * (1.0 + std::abs(m(i, j)))) return false;
    }
  }
  return true;
}

DenseSymMatrix::DenseSymMatrix(RowMatrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw DimensionError("DenseSymMatrix: matrix must be square");
  }
  if (values_.rows() < 1) {
    throw DimensionError("DenseSymMatrix: dimension must be at least 1");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("DenseSymMatrix: entries must be finite");
  }
  if (!is_symmetric(values_, 1e-12)) {
    throw std::invalid_argument("DenseSymMatrix: matrix is not symmetric");
  }
}

DenseSymMatrix DenseSymMatrix::symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("DenseSymMatrix::symmetrize: matrix must be square");
  }
  RowMatrix s = 0.5 * (m + m.transpose());
  return DenseSymMatrix(std::move(s));
}

LinearOperator::LinearOperator(Index dim, ApplyFn apply) : dim_(dim), apply_(std::move(apply)) {
  if (dim_ < 1) throw DimensionError("LinearOperator: dimension must be at least 1");
  if (!apply_) throw std::invalid_argument("LinearOperator: empty apply function");
}

Vector LinearOperator::apply(const Vector& v) const {
  require_dim(dim_, v.size(), "LinearOperator::apply");
  Vector out = apply_(v);
  require_dim(dim_, out.size(), "LinearOperator::apply (result)");
  return out;
}

Spectrum Spectrum::leading(std::size_t k) const {
  k = std::min(k, values.size());
  Spectrum s;
  s.values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k));
  s.vectors = vectors.leftCols(static_cast<Index>(k));
  return s;
}

Vector matvec(const DenseSymMatrix& a, const Vector& v) {
  require_dim(a.dim(), v.size(), "matvec");
  return a.values() * v;
}

Vector matvec(const LinearOperator& a, const Vector& v) { return a.apply(v); }

LinearOperator dense_operator(std::shared_ptr<const DenseSymMatrix> m) {
  if (!m) throw std::invalid_argument("dense_operator: null matrix");
  const Index n = m->dim();
  return LinearOperator(n, [m = std::move(m)](const Vector& v) -> Vector { return m->values() * v; });
}

LinearOperator dense_operator(const DenseSymMatrix& m) {
  return dense_operator(std::make_shared<const DenseSymMatrix>(m));
}

LinearOperator deflated_operator(const LinearOperator& base, std::vector<EigenPair> pairs) {
  for (const auto& p : pairs) {
    require_dim(base.dim(), p.vector.size(), "deflated_operator");
    if (std::abs(p.vector.norm() - 1.0) > 1e-8) {
      throw std::invalid_argument("deflated_operator: deflation vectors must be unit norm");
    }
  }
  if (pairs.empty()) return base;
  return LinearOperator(base.dim(), [base, pairs = std::move(pairs)](const Vector& v) -> Vector {
    Vector out = base.apply(v);
    for (const auto& p : pairs) {
      out.noalias() -= (p.value * p.vector.dot(v)) * p.vector;
    }
    return out;
  });
}

LinearOperator gram_operator(std::shared_ptr<const Matrix> n) {
  if (!n || n->size() == 0) throw std::invalid_argument("gram_operator: empty matrix");
  const Index m = n->rows();
  return LinearOperator(m, [n = std::move(n)](const Vector& v) -> Vector {
    Vector w = n->transpose() * v;
    return *n * w;
  });
}

LinearOperator dilation_operator(std::shared_ptr<const Matrix> n) {
  if (!n || n->size() == 0) throw std::invalid_argument("dilation_operator: empty matrix");
  const Index rows = n->rows();
  const Index cols = n->cols();
  return LinearOperator(rows + cols, [n = std::move(n), rows, cols](const Vector& v) -> Vector {
    Vector out(rows + cols);
    out.head(rows).noalias() = *n * v.tail(cols);
    out.tail(cols).noalias() = n->transpose() * v.head(rows);
    return out;
  });
}

Matrix densify(const LinearOperator& op) {
  const Index n = op.dim();
  Matrix out(n, n);
  Vector e = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    out.col(j) = op.apply(e);
    e(j) = 0.0;
  }
  return out;
}

void normalize_sign(Vector& v) {
  if (v.size() == 0) return;
  Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
}

double sign_agnostic_distance(const Vector& a, const Vector& b) {
  require_dim(a.size(), b.size(), "sign_agnostic_distance");
  return std::min((a - b).norm(), (a + b).norm());
}

Spectrum jacobi_eigh(const Matrix& input) {
  if (input.rows() != input.cols()) throw DimensionError("jacobi_eigh: matrix must be square");
  if (!is_symmetric(input, 1e-12)) throw std::invalid_argument("jacobi_eigh: matrix is not symmetric");

  const Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);

  const double scale = a.norm();
  const double threshold = 1e-14 * scale;
  constexpr int kMaxSweeps = 100;

  double off = off_diagonal_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps && off > threshold; ++sweep) {
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    off = off_diagonal_norm(a);
  }
  if (off > 1e-10 * scale) {
    throw std::runtime_error("jacobi_eigh: sweeps did not converge");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });

  Spectrum out;
  out.values.reserve(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.values.push_back(a(src, src));
    Vector col = v.col(src);
    normalize_sign(col);
    out.vectors.col(k) = col;
  }
  return out;
}

Spectrum jacobi_eigh(const DenseSymMatrix& a) { return jacobi_eigh(Matrix(a.values())); }

}  // namespace gdsvd
