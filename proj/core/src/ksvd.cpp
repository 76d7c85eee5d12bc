#include "gdsvd/ksvd.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace gdsvd {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Gd: return "gd";
    case Method::Power: return "power";
    case Method::Polyak: return "polyak";
    case Method::Nesterov: return "nesterov";
    case Method::NesterovGeneral: return "nesterov-general";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "gd") return Method::Gd;
  if (name == "power") return Method::Power;
  if (name == "polyak") return Method::Polyak;
  if (name == "nesterov") return Method::Nesterov;
  if (name == "nesterov-general") return Method::NesterovGeneral;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(AsymStrategy s) noexcept {
  return s == AsymStrategy::Gram ? "gram" : "dilation";
}

AsymStrategy parse_strategy(std::string_view name) {
  if (name == "gram") return AsymStrategy::Gram;
  if (name == "dilation") return AsymStrategy::Dilation;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

KsvdError::KsvdError(std::size_t pair_index, const std::string& what)
    : SolverError("pair " + std::to_string(pair_index) + ": " + what), pair_index_(pair_index) {}

std::uint64_t pair_seed(std::uint64_t seed, std::size_t index) noexcept {
  return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index);
}

Rank1Result solve_single(const LinearOperator& m, std::size_t index, const KsvdOptions& opts) {
  const double eps = opts.target_accuracy ? *opts.target_accuracy / 100.0 : opts.solver.eps;
  const std::uint64_t seed = pair_seed(opts.solver.seed, index);
  // The reference spectrum describes the original matrix; after deflation its
  // leading pair is no longer the target, so diagnostics only apply to pair 0.
  const Spectrum* ref = index == 0 ? opts.reference : nullptr;

  switch (opts.method) {
    case Method::Gd:
    case Method::Power: {
      SolverConfig cfg = opts.solver;
      cfg.eps = eps;
      cfg.seed = seed;
      return opts.method == Method::Gd ? solve_rank1(m, cfg, ref) : solve_power(m, cfg, ref);
    }
    case Method::Polyak:
    case Method::Nesterov: {
      MomentumConfig cfg = opts.momentum;
      cfg.mode = opts.method == Method::Polyak ? MomentumMode::Polyak : MomentumMode::Nesterov;
      cfg.eps = eps;
      cfg.seed = seed;
      cfg.max_iter = opts.solver.max_iter;
      cfg.record_trace = opts.solver.record_trace;
      return solve_momentum(m, cfg, ref);
    }
    case Method::NesterovGeneral: {
      NesterovConfig cfg = opts.nesterov;
      cfg.eps = eps;
      cfg.seed = seed;
      cfg.max_iter = opts.solver.max_iter;
      cfg.record_trace = opts.solver.record_trace;
      return solve_nesterov(m, cfg, ref);
    }
  }
  throw std::invalid_argument("solve_single: unknown method");
}

namespace {

std::vector<std::size_t> find_gap_violations(const Spectrum& ref, std::size_t k, double eps) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k && i < ref.size(); ++i) {
    const double si = ref.values[i];
    const double next = i + 1 < ref.size() ? ref.values[i + 1] : 0.0;
    if (!(si > 0.0) || (si - next) / (2.0 * si) < eps) out.push_back(i);
  }
  return out;
}

void gram_schmidt(std::vector<EigenPair>& pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Vector& v = pairs[i].vector;
    for (std::size_t j = 0; j < i; ++j) v -= pairs[j].vector.dot(v) * pairs[j].vector;
    const double n = v.norm();
    if (n > 0.0) v /= n;
  }
}

}  // namespace

KsvdResult solve_ksvd(const LinearOperator& m, std::size_t k, const KsvdOptions& opts) {
  if (k < 1 || static_cast<Index>(k) > m.dim()) {
    throw std::invalid_argument("solve_ksvd: k must satisfy 1 <= k <= dim");
  }
  if (opts.target_accuracy && !(*opts.target_accuracy > 0.0)) {
    throw std::invalid_argument("solve_ksvd: target_accuracy must be positive");
  }
  KsvdResult res;
  res.method = opts.method;
  const double eps = opts.target_accuracy ? *opts.target_accuracy / 100.0 : opts.solver.eps;
  if (opts.reference != nullptr) res.gap_violations = find_gap_violations(*opts.reference, k, eps);

  std::vector<EigenPair> deflate;
  for (std::size_t l = 0; l < k; ++l) {
    // Always compose against the original operator so each matvec costs one
    // base application plus O(l n), instead of a nested chain of closures.
    const LinearOperator ml = deflated_operator(m, deflate);
    Rank1Result r;
    try {
      r = solve_single(ml, l, opts);
    } catch (const KsvdError&) {
      throw;
    } catch (const std::exception& e) {
      throw KsvdError(l, e.what());
    }
    res.total_matvecs += r.matvecs;
    res.per_pair_iterations.push_back(r.iterations);
    res.pair_converged.push_back(r.converged);
    if (opts.solver.record_trace) res.traces.push_back(std::move(r.trace));
    if (!r.converged) res.converged = false;
    if (r.diverged) break;  // the iterate is meaningless; keep the completed pairs only

    EigenPair p{r.sigma_hat, r.u_hat};
    if (opts.companion_pairs) {
      for (EigenPair& c : opts.companion_pairs(p)) deflate.push_back(std::move(c));
    }
    deflate.push_back(p);
    res.pairs.push_back(std::move(p));
  }
  if (opts.orthonormalize) gram_schmidt(res.pairs);
  return res;
}

RecoveryErrors recovery_errors(const KsvdResult& result, const Spectrum& truth, std::size_t k) {
  if (truth.size() < k) throw std::invalid_argument("recovery_errors: truth has fewer than k pairs");
  if (result.pairs.size() < k) throw std::invalid_argument("recovery_errors: result has fewer than k pairs");
  RecoveryErrors e;
  const Index n = truth.dim();
  Matrix diff = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < k; ++i) {
    const EigenPair& p = result.pairs[i];
    if (p.vector.size() != n) throw DimensionError("recovery_errors: dimension mismatch");
    e.eps_sigma = std::max(e.eps_sigma, std::abs(truth.values[i] - p.value));
    const Vector u = truth.vector(i);
    diff.noalias() += u * u.transpose();
    diff.noalias() -= p.vector * p.vector.transpose();
  }
  e.eps_uv = diff.norm();
  return e;
}

namespace {

AsymResult from_gram(const Matrix& n, const KsvdResult& r) {
  AsymResult out;
  double s1 = 0.0;
  for (const EigenPair& p : r.pairs) {
    const double s = std::sqrt(std::max(p.value, 0.0));
    if (out.sigma.empty()) s1 = s;
    out.sigma.push_back(s);
    out.u.push_back(p.vector);
    if (!(s > 0.0) || s < 1e-12 * s1) {
      out.v.emplace_back();
      out.right_skipped.push_back(true);
      continue;
    }
    Vector v = n.transpose() * p.vector / s;
    // u is only accurate to the inner tolerance, so renormalize.
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    out.v.push_back(std::move(v));
    out.right_skipped.push_back(false);
  }
  return out;
}

AsymResult from_dilation(const Matrix& n, const KsvdResult& r) {
  AsymResult out;
  const Index rows = n.rows();
  const Index cols = n.cols();
  double s1 = 0.0;
  for (const EigenPair& p : r.pairs) {
    const double s = std::max(p.value, 0.0);
    if (out.sigma.empty()) s1 = s;
    out.sigma.push_back(s);
    Vector u = p.vector.head(rows);
    Vector v = p.vector.tail(cols);
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu > 0.0) u /= nu;
    out.u.push_back(std::move(u));
    if (!(nv > 0.0) || !(s > 0.0) || s < 1e-12 * s1) {
      out.v.emplace_back();
      out.right_skipped.push_back(true);
    } else {
      out.v.push_back(v / nv);
      out.right_skipped.push_back(false);
    }
  }
  return out;
}

}  // namespace

AsymResult solve_asymmetric(const Matrix& n, std::size_t k, const KsvdOptions& opts, AsymStrategy strategy) {
  if (n.rows() < 1 || n.cols() < 1) throw DimensionError("solve_asymmetric: empty matrix");
  if (!n.allFinite()) throw std::invalid_argument("solve_asymmetric: matrix has non-finite entries");
  if (k < 1 || static_cast<Index>(k) > std::min(n.rows(), n.cols())) {
    throw std::invalid_argument("solve_asymmetric: k must satisfy 1 <= k <= min(rows, cols)");
  }
  auto shared = std::make_shared<const Matrix>(n);
  KsvdOptions o = opts;
  o.reference = nullptr;
  AsymResult out;
  KsvdResult r;
  if (strategy == AsymStrategy::Gram) {
    r = solve_ksvd(gram_operator(shared), k, o);
    out = from_gram(n, r);
  } else {
    const Index rows = n.rows();
    // The dilation has eigenvalues +-sigma_i. Removing only +sigma leaves
    // -sigma_1 as the dominant magnitude, which makes the rank-1 fixed point
    // unstable, so the mirrored pair is deflated as well.
    o.companion_pairs = [rows](const EigenPair& p) {
      Vector w = p.vector;
      w.tail(w.size() - rows) *= -1.0;
      return std::vector<EigenPair>{EigenPair{-p.value, std::move(w)}};
    };
    r = solve_ksvd(dilation_operator(shared), k, o);
    out = from_dilation(n, r);
  }
  out.method = opts.method;
  out.strategy = strategy;
  out.converged = r.converged;
  out.per_pair_iterations = r.per_pair_iterations;
  out.total_matvecs = r.total_matvecs;
  return out;
}

}  // namespace gdsvd
