#pragma once

// Dense storage, the matvec operator abstraction, and a cyclic Jacobi
// eigensolver used as an independent verification oracle.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace gdsvd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense n x n symmetric matrix stored row-major. Construction rejects
/// non-square, non-finite or asymmetric input; the object is immutable after.
class DenseSymMatrix {
 public:
  explicit DenseSymMatrix(RowMatrix values);

  /// Averages `m` with its transpose first, so the result is exactly symmetric.
  static DenseSymMatrix symmetrize(const Matrix& m);

  Index dim() const noexcept { return values_.rows(); }
  const RowMatrix& values() const noexcept { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }
  double frobenius_norm_sq() const { return values_.squaredNorm(); }

 private:
  RowMatrix values_;
};

/// Symmetric linear map given only through its action v -> Av.
class LinearOperator {
 public:
  using ApplyFn = std::function<Vector(const Vector&)>;

  LinearOperator(Index dim, ApplyFn apply);

  Index dim() const noexcept { return dim_; }
  Vector apply(const Vector& v) const;

 private:
  Index dim_;
  ApplyFn apply_;
};

/// A single (value, unit vector) pair, as recovered by the rank-1 solvers.
struct EigenPair {
  double value = 0.0;
  Vector vector;
};

/// Eigenvalues in descending order with matching orthonormal columns.
struct Spectrum {
  std::vector<double> values;
  Matrix vectors;  // dim x values.size()

  std::size_t size() const noexcept { return values.size(); }
  Index dim() const noexcept { return vectors.rows(); }
  Vector vector(std::size_t i) const { return vectors.col(static_cast<Index>(i)); }
  /// Leading `k` pairs as a new spectrum.
  Spectrum leading(std::size_t k) const;
};

Vector matvec(const DenseSymMatrix& a, const Vector& v);
Vector matvec(const LinearOperator& a, const Vector& v);

LinearOperator dense_operator(std::shared_ptr<const DenseSymMatrix> m);
LinearOperator dense_operator(const DenseSymMatrix& m);

/// v -> base(v) - sum_l value_l (u_l . v) u_l. Each u_l must be unit norm (1e-8).
LinearOperator deflated_operator(const LinearOperator& base, std::vector<EigenPair> pairs);

/// v -> N (N^T v), dimension rows(N).
LinearOperator gram_operator(std::shared_ptr<const Matrix> n);
/// [x; y] -> [N y; N^T x], dimension rows(N) + cols(N).
LinearOperator dilation_operator(std::shared_ptr<const Matrix> n);

/// Materializes an operator column by column. Test and diagnostic use only.
Matrix densify(const LinearOperator& op);

/// Full eigendecomposition by cyclic Jacobi sweeps. Intended for n <= 2000.
Spectrum jacobi_eigh(const DenseSymMatrix& a);
/// Same, for an arbitrary square matrix; throws if it is not symmetric.
Spectrum jacobi_eigh(const Matrix& a);

/// Flips `v` so its largest-magnitude entry is positive.
void normalize_sign(Vector& v);

/// min(||a - b||, ||a + b||).
double sign_agnostic_distance(const Vector& a, const Vector& b);

bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

}  // namespace gdsvd
