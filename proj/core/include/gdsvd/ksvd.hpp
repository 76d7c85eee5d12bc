#pragma once

// Top-k spectrum by sequential rank-1 solves with implicit deflation
//   M_{l+1} = M_l - sigma_l u_l u_l^T,
// plus entry points for general (non-symmetric) matrices.

#include "gdsvd/accelerators.hpp"
#include "gdsvd/linalg.hpp"
#include "gdsvd/power.hpp"
#include "gdsvd/rank1.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gdsvd {

enum class Method { Gd, Power, Polyak, Nesterov, NesterovGeneral };

std::string_view to_string(Method m) noexcept;
/// Accepts gd, power, polyak, nesterov, nesterov-general.
Method parse_method(std::string_view name);

/// Raised when an inner solve fails; carries the 0-based pair index.
class KsvdError : public SolverError {
 public:
  KsvdError(std::size_t pair_index, const std::string& what);
  std::size_t pair_index() const noexcept { return pair_index_; }

 private:
  std::size_t pair_index_;
};

struct KsvdOptions {
  Method method = Method::Gd;
  /// eps, max_iter, seed and record_trace apply to every method; eta to gd only.
  SolverConfig solver;
  /// beta, eta and warmup for polyak/nesterov; the mode follows `method`.
  MomentumConfig momentum;
  /// eta, mu, rho and sigma1_estimate for nesterov-general.
  NesterovConfig nesterov;
  /// When set, the inner tolerance becomes target_accuracy / 100.
  std::optional<double> target_accuracy;
  /// Post-hoc Gram-Schmidt of the recovered vectors. Cosmetic: it is not part
  /// of the method and is off by default.
  bool orthonormalize = false;
  /// Ground truth for trace diagnostics and gap-violation flags.
  const Spectrum* reference = nullptr;
  /// Extra pairs to deflate alongside each recovered one.
  std::function<std::vector<EigenPair>(const EigenPair&)> companion_pairs;
};

struct KsvdResult {
  Method method = Method::Gd;
  bool converged = true;
  std::vector<EigenPair> pairs;  // recovery order, not re-sorted
  std::vector<std::int64_t> per_pair_iterations;
  std::vector<bool> pair_converged;
  std::int64_t total_matvecs = 0;
  /// Indices i where (s_i - s_{i+1}) / (2 s_i) < eps in the reference spectrum.
  std::vector<std::size_t> gap_violations;
  std::vector<std::vector<TraceRecord>> traces;  // filled when record_trace is set
};

struct RecoveryErrors {
  double eps_sigma = 0.0;  // max_i |s_i - s^_i|
  double eps_uv = 0.0;     // ||U U^T - U^ U^T||_F over the leading k
};

/// Requires 1 <= k <= dim(m).
KsvdResult solve_ksvd(const LinearOperator& m, std::size_t k, const KsvdOptions& opts = {});

/// Runs the rank-1 solver selected by opts.method on `m` for pair `index`.
Rank1Result solve_single(const LinearOperator& m, std::size_t index, const KsvdOptions& opts);

/// Seed used for pair `index`; pair 0 uses `seed` itself.
std::uint64_t pair_seed(std::uint64_t seed, std::size_t index) noexcept;

RecoveryErrors recovery_errors(const KsvdResult& result, const Spectrum& truth, std::size_t k);

enum class AsymStrategy { Gram, Dilation };

std::string_view to_string(AsymStrategy s) noexcept;
AsymStrategy parse_strategy(std::string_view name);

struct AsymResult {
  Method method = Method::Gd;
  AsymStrategy strategy = AsymStrategy::Gram;
  bool converged = true;
  std::vector<double> sigma;
  std::vector<Vector> u;  // left singular vectors
  std::vector<Vector> v;  // right singular vectors; empty where skipped
  std::vector<bool> right_skipped;
  std::vector<std::int64_t> per_pair_iterations;
  std::int64_t total_matvecs = 0;
};

/// Top-k singular triplets of a general m x n matrix. Gram runs on v -> N N^T v;
/// Dilation runs on [[0, N], [N^T, 0]] and also deflates the mirrored
/// (-sigma, (u; -v)/sqrt(2)) pair each time.
AsymResult solve_asymmetric(const Matrix& n, std::size_t k, const KsvdOptions& opts, AsymStrategy strategy);

}  // namespace gdsvd
