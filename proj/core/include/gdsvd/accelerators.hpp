#pragma once

// Accelerated variants of the adaptive-step iteration.
//
// Estimate-sequence scheme (local theory), with alpha = 1/sqrt(rho):
//   y_t     = x_t + alpha / (1 + alpha) (v_t - x_t)
//   x_{t+1} = y_t - (eta / ||y_t||^2) grad g(y_t)
//   v_{t+1} = (1 - alpha) v_t + alpha (y_t - grad g(y_t) / mu)
//
// Momentum scheme (used in practice from a random start):
//   y_t     = x_t + a (x_t - x_{t-1}),   a = 0 (Polyak) or beta (Nesterov)
//   x_{t+1} = x_t + beta (x_t - x_{t-1}) - (eta / ||y_t||^2) grad g(y_t)

#include "gdsvd/linalg.hpp"
#include "gdsvd/rank1.hpp"

#include <cstdint>
#include <optional>

namespace gdsvd {

struct NesterovConfig {
  double eta = 1.0 / 6.0;
  /// Strong-convexity estimate; defaults to 0.05 * sigma1_est.
  std::optional<double> mu;
  /// Condition ratio; defaults to 9 sigma1_est / mu, i.e. alpha = sqrt(mu / 2L).
  std::optional<double> rho;
  /// Fixed sigma_1 estimate; when empty ||x_t||^2 is used, refreshed every step.
  std::optional<double> sigma1_estimate;
  std::int64_t max_iter = 500000;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  bool record_trace = false;

  void validate() const;
};

enum class MomentumMode { Polyak, Nesterov };

struct MomentumConfig {
  double beta = 0.5;
  MomentumMode mode = MomentumMode::Nesterov;
  double eta = 0.5;
  double eps = 1e-8;
  std::int64_t max_iter = 500000;
  std::uint64_t seed = 0;
  /// Polyak mode only: momentum is switched off while t < warmup.
  std::int64_t warmup = 0;
  bool record_trace = false;

  void validate() const;
};

struct NesterovState {
  Vector x;
  Vector v;
  Vector y;  // extrapolated point the gradient was taken at
};

/// Resolved (alpha, mu) for the current iterate.
struct NesterovParameters {
  double alpha = 0.0;
  double mu = 0.0;
};

NesterovParameters nesterov_parameters(const Vector& x, const NesterovConfig& cfg);

/// Throws SolverError if y_t has zero norm.
NesterovState nesterov_step(const Vector& x, const Vector& v, const LinearOperator& m,
                            const NesterovConfig& cfg);

/// Starts from `x0` when given (v_0 = x_0), otherwise from random_init.
/// Aborts with diverged = true if ||x_t|| exceeds 1e8 ||x_0||.
Rank1Result solve_nesterov(const LinearOperator& m, const NesterovConfig& cfg,
                           const Spectrum* reference = nullptr, const Vector* x0 = nullptr);

/// `t` is the index of x (needed for the Polyak warmup).
Vector momentum_step(const Vector& x, const Vector& x_prev, const LinearOperator& m,
                     const MomentumConfig& cfg, std::int64_t t);

/// Aborts with diverged = true if ||x_t|| exceeds 1e8 ||x_0||.
Rank1Result solve_momentum(const LinearOperator& m, const MomentumConfig& cfg,
                           const Spectrum* reference = nullptr);

/// ceil(100 beta), the warmup the Polyak variant needs to converge reliably.
std::int64_t polyak_warmup(double beta);

}  // namespace gdsvd
