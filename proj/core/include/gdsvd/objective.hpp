#pragma once

// The nonconvex rank-1 objective g(x; M) = 1/4 ||M - x x^T||_F^2 and the
// closed-form identities used to analyse it.

#include "gdsvd/linalg.hpp"

namespace gdsvd {

/// Local Hessian bounds mu*I <= Hess g <= L*I on the ball of `radius`
/// around +-sqrt(sigma1) u1.
struct CurvatureBounds {
  double mu = 0.0;
  double L = 0.0;
  double radius = 0.0;
};

struct ErrorDecomposition {
  double norm_gap = 0.0;       // (||x|| - ||y||)^2
  double direction_gap = 0.0;  // ||x|| ||y|| ||x/||x|| - y/||y||||^2
  double total = 0.0;          // norm_gap + direction_gap == ||x - y||^2
};

/// `frob_m2` is ||M||_F^2, supplied by the caller so M never needs densifying.
double g_value(const Vector& x, const LinearOperator& m, double frob_m2);

/// ||x||^2 x - M x
Vector grad_g(const Vector& x, const LinearOperator& m);
/// Same, reusing a precomputed M x.
Vector grad_g(const Vector& x, const Vector& mx);

/// ||x||^2 v + 2 (x.v) x - M v
Vector hessian_apply(const Vector& x, const LinearOperator& m, const Vector& v);

/// Throws std::invalid_argument unless sigma1 > sigma2 >= 0.
CurvatureBounds curvature_bounds(double sigma1, double sigma2);

/// Throws std::invalid_argument for a zero vector.
ErrorDecomposition error_decomposition(const Vector& x, const Vector& y);

/// Right-hand side of
///   ||xx^T - yy^T||_F^2 = (||x||^2 - ||y||^2)^2
///                         + ||x||^2 ||y||^2 / 2 * ||x^ - y^||^2 ||x^ + y^||^2
/// with x^ = x/||x||. Throws std::invalid_argument for a zero vector.
double outer_error_decomposition(const Vector& x, const Vector& y);

}  // namespace gdsvd
