#pragma once

// Power-method comparator: x_{t+1} = M x_t / ||M x_t||, stopped when both
// ||x_{t+1} -+ x_t|| and | ||M x_{t+1}|| - ||M x_t|| | fall below eps.

#include "gdsvd/linalg.hpp"
#include "gdsvd/rank1.hpp"

namespace gdsvd {

/// Unit-norm image of x. Throws SolverError when M x = 0.
Vector power_step(const Vector& x, const LinearOperator& m);

/// sigma_hat = ||M x_final||, u_hat = x_final. cfg.eta is ignored.
Rank1Result solve_power(const LinearOperator& m, const SolverConfig& cfg, const Spectrum* reference = nullptr);

}  // namespace gdsvd
