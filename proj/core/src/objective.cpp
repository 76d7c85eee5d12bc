#include "gdsvd/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace gdsvd {

namespace {

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) throw DimensionError(std::string(what) + ": dimension mismatch");
}

void require_nonzero(const Vector& v, const char* what) {
  if (v.squaredNorm() == 0.0) throw std::invalid_argument(std::string(what) + ": zero vector");
}

}  // namespace

double g_value(const Vector& x, const LinearOperator& m, double frob_m2) {
  const Vector mx = m.apply(x);
  const double nx2 = x.squaredNorm();
  return 0.25 * (frob_m2 - 2.0 * x.dot(mx) + nx2 * nx2);
}

Vector grad_g(const Vector& x, const Vector& mx) {
  require_same_dim(x, mx, "grad_g");
  return x.squaredNorm() * x - mx;
}

Vector grad_g(const Vector& x, const LinearOperator& m) { return grad_g(x, m.apply(x)); }

Vector hessian_apply(const Vector& x, const LinearOperator& m, const Vector& v) {
  require_same_dim(x, v, "hessian_apply");
  const Vector mv = m.apply(v);
  return x.squaredNorm() * v + (2.0 * x.dot(v)) * x - mv;
}

CurvatureBounds curvature_bounds(double sigma1, double sigma2) {
  if (!(sigma1 > sigma2) || sigma2 < 0.0) {
    throw std::invalid_argument("curvature_bounds: requires sigma1 > sigma2 >= 0");
  }
  const double gap = sigma1 - sigma2;
  return {gap / 4.0, 9.0 * sigma1 / 2.0, gap / (15.0 * std::sqrt(sigma1))};
}

ErrorDecomposition error_decomposition(const Vector& x, const Vector& y) {
  require_same_dim(x, y, "error_decomposition");
  require_nonzero(x, "error_decomposition");
  require_nonzero(y, "error_decomposition");
  const double nx = x.norm();
  const double ny = y.norm();
  ErrorDecomposition d;
  d.norm_gap = (nx - ny) * (nx - ny);
  d.direction_gap = nx * ny * (x / nx - y / ny).squaredNorm();
  d.total = d.norm_gap + d.direction_gap;
  return d;
}

double outer_error_decomposition(const Vector& x, const Vector& y) {
  require_same_dim(x, y, "outer_error_decomposition");
  require_nonzero(x, "outer_error_decomposition");
  require_nonzero(y, "outer_error_decomposition");
  const double nx2 = x.squaredNorm();
  const double ny2 = y.squaredNorm();
  const Vector xh = x / std::sqrt(nx2);
  const Vector yh = y / std::sqrt(ny2);
  const double diff = nx2 - ny2;
  return diff * diff + 0.5 * nx2 * ny2 * (xh - yh).squaredNorm() * (xh + yh).squaredNorm();
}

}  // namespace gdsvd
