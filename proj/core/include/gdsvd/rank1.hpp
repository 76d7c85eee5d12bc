#pragma once

// Rank-1 gradient descent with the adaptive step eta / ||x_t||^2:
//
//   x_{t+1} = x_t - (eta / ||x_t||^2) grad g(x_t; M)
//           = (1 - eta) x_t + eta M x_t / ||x_t||^2
//
// started from x_0 = M z, z ~ N(0, I). The norm sequence follows Heron's
// iteration for sqrt(sigma_1) once the direction has aligned with u_1.

#include "gdsvd/linalg.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gdsvd {

/// Raised when an iterate collapses to zero or random initialization keeps
/// landing in the kernel.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double eta = 0.5;
  double eps = 1e-8;
  std::int64_t max_iter = 500000;
  std::uint64_t seed = 0;
  bool record_trace = false;

  /// Throws std::invalid_argument unless 0 < eta < 1, eps > 0, max_iter >= 2.
  void validate() const;
};

/// Per-iteration diagnostics. Reference-dependent fields are empty when no
/// ground-truth spectrum was supplied; eps_u/eps_sigma are empty at t = 0.
struct TraceRecord {
  std::int64_t t = 0;
  double norm_x = 0.0;
  std::optional<double> cos_theta1;
  std::optional<double> heron_eps;
  std::optional<double> grad_norm;
  std::optional<double> eps_u;
  std::optional<double> eps_sigma;
};

struct Rank1Result {
  double sigma_hat = 0.0;
  Vector u_hat;
  std::int64_t iterations = 0;
  bool converged = false;
  bool diverged = false;
  std::int64_t matvecs = 0;
  Vector initial_point;
  std::vector<TraceRecord> trace;
};

/// Norm band [a sqrt(s1), b sqrt(s1)] that iterates enter after `tau` steps.
struct AttractionConstants {
  double a = 0.0;
  double b = 0.0;
  std::int64_t tau = 1;
};

/// (1 - eta) x + (eta / ||x||^2) mx, where mx = M x has been computed already.
using StepRule = std::function<Vector(const Vector& x, const Vector& mx, double eta)>;

/// i.i.d. standard normal entries from a seeded mt19937_64.
Vector gaussian_vector(Index n, std::uint64_t seed);

/// x_0 = M z. If M z vanishes, retries with seed+1, ..., seed+16, then throws
/// SolverError.
Vector random_init(const LinearOperator& m, std::uint64_t seed);

Vector adaptive_step(const Vector& x, const Vector& mx, double eta);

/// One adaptive-step iteration. Throws SolverError when ||x|| = 0.
Vector gd_step(const Vector& x, const LinearOperator& m, double eta);

/// Iterates until both ||x_t/||x_t|| - x_{t-1}/||x_{t-1}|||| and
/// | ||x_t||^2 - ||x_{t-1}||^2 | drop below cfg.eps (checked from t = 2 on),
/// or max_iter steps. `reference` only feeds trace diagnostics.
Rank1Result solve_rank1(const LinearOperator& m, const SolverConfig& cfg,
                        const Spectrum* reference = nullptr);

/// Same driver loop with a caller-supplied update rule.
Rank1Result solve_rank1(const LinearOperator& m, const SolverConfig& cfg,
                        const Spectrum* reference, const StepRule& step);

/// Constants a, b and tau of the attracting region, computed from x0 and the
/// exact spectrum (whose last value is taken as sigma_d and must be > 0).
AttractionConstants attraction_constants(const Vector& x0, const Spectrum& spectrum, double eta);

TraceRecord diagnostics(const Vector& x_t, const Vector& x_prev, const LinearOperator& m,
                        const Spectrum* reference, std::int64_t t = 0);

namespace detail {

/// Diagnostics from a precomputed M x_t; `x_prev` may be null (t = 0).
TraceRecord make_record(std::int64_t t, const Vector& x, const Vector& mx, const Vector* x_prev,
                        const Spectrum* reference);

/// Random init plus the number of matvecs it consumed.
Vector random_init_counted(const LinearOperator& m, std::uint64_t seed, std::int64_t& matvecs);

}  // namespace detail

}  // namespace gdsvd
