#include "gdsvd/rank1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace gdsvd {

void SolverConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("SolverConfig: eta must lie in (0, 1)");
  if (!(eps > 0.0)) throw std::invalid_argument("SolverConfig: eps must be positive");
  if (max_iter < 2) throw std::invalid_argument("SolverConfig: max_iter must be at least 2");
}

Vector gaussian_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = normal(gen);
  return z;
}

namespace detail {

Vector random_init_counted(const LinearOperator& m, std::uint64_t seed, std::int64_t& matvecs) {
  constexpr int kResamples = 16;
  for (int attempt = 0; attempt <= kResamples; ++attempt) {
    Vector x0 = m.apply(gaussian_vector(m.dim(), seed + static_cast<std::uint64_t>(attempt)));
    ++matvecs;
    const double n = x0.norm();
    if (n > 0.0 && std::isfinite(n)) return x0;
  }
  throw SolverError("random_init: M z vanished for every resampled z (operator is zero?)");
}

TraceRecord make_record(std::int64_t t, const Vector& x, const Vector& mx, const Vector* x_prev,
                        const Spectrum* reference) {
  TraceRecord rec;
  rec.t = t;
  const double nx2 = x.squaredNorm();
  rec.norm_x = std::sqrt(nx2);
  rec.grad_norm = (nx2 * x - mx).norm();
  if (x_prev != nullptr) {
    const double np = x_prev->norm();
    rec.eps_u = (x / rec.norm_x - *x_prev / np).norm();
    rec.eps_sigma = std::abs(nx2 - np * np);
  }
  if (reference != nullptr && reference->size() > 0) {
    const double s1 = reference->values.front();
    rec.cos_theta1 = x.dot(reference->vectors.col(0)) / rec.norm_x;
    if (s1 > 0.0) rec.heron_eps = rec.norm_x / std::sqrt(s1) - 1.0;
  }
  return rec;
}

}  // namespace detail

Vector random_init(const LinearOperator& m, std::uint64_t seed) {
  std::int64_t matvecs = 0;
  return detail::random_init_counted(m, seed, matvecs);
}

Vector adaptive_step(const Vector& x, const Vector& mx, double eta) {
  const double nx2 = x.squaredNorm();
  if (nx2 == 0.0) throw SolverError("gd_step: zero-norm iterate");
  return (1.0 - eta) * x + (eta / nx2) * mx;
}

Vector gd_step(const Vector& x, const LinearOperator& m, double eta) {
  if (x.size() != m.dim()) throw DimensionError("gd_step: dimension mismatch");
  if (x.squaredNorm() == 0.0) throw SolverError("gd_step: zero-norm iterate");
  return adaptive_step(x, m.apply(x), eta);
}

Rank1Result solve_rank1(const LinearOperator& m, const SolverConfig& cfg, const Spectrum* reference) {
  return solve_rank1(m, cfg, reference, adaptive_step);
}

Rank1Result solve_rank1(const LinearOperator& m, const SolverConfig& cfg, const Spectrum* reference,
                        const StepRule& step) {
  cfg.validate();
  Rank1Result res;
  Vector x = detail::random_init_counted(m, cfg.seed, res.matvecs);
  res.initial_point = x;
  Vector mx = m.apply(x);
  ++res.matvecs;
  double nx = x.norm();
  if (cfg.record_trace) res.trace.push_back(detail::make_record(0, x, mx, nullptr, reference));

  std::int64_t t = 0;
  while (t < cfg.max_iter) {
    Vector next = step(x, mx, cfg.eta);
    ++t;
    const double nn = next.norm();
    if (!(nn > 0.0) || !std::isfinite(nn)) {
      throw SolverError("solve_rank1: iterate collapsed at t = " + std::to_string(t));
    }
    const double eps_u = (next / nn - x / nx).norm();
    const double eps_sigma = std::abs(nn * nn - nx * nx);
    Vector prev = std::move(x);
    x = std::move(next);
    nx = nn;

    const bool stop = t >= 2 && eps_u < cfg.eps && eps_sigma < cfg.eps;
    if (!stop || cfg.record_trace) {
      mx = m.apply(x);
      ++res.matvecs;
    }
    if (cfg.record_trace) res.trace.push_back(detail::make_record(t, x, mx, &prev, reference));
    if (stop) {
      res.converged = true;
      break;
    }
  }
  res.iterations = t;
  res.sigma_hat = nx * nx;
  res.u_hat = x / nx;
  return res;
}

AttractionConstants attraction_constants(const Vector& x0, const Spectrum& spectrum, double eta) {
  if (spectrum.size() == 0) throw std::invalid_argument("attraction_constants: empty spectrum");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("attraction_constants: eta must lie in (0, 1)");
  const double s1 = spectrum.values.front();
  const double sd = spectrum.values.back();
  if (!(sd > 0.0)) throw std::invalid_argument("attraction_constants: sigma_d must be positive");
  const double n0 = x0.norm();
  if (!(n0 > 0.0)) throw std::invalid_argument("attraction_constants: x0 must be nonzero");

  const double cos0 = std::abs(x0.dot(spectrum.vectors.col(0))) / n0;
  const double ratio = std::sqrt(sd / s1);

  AttractionConstants c;
  c.a = 2.0 * std::sqrt(eta * (1.0 - eta)) * std::max(cos0, ratio);
  const double inv_cos = cos0 > 0.0 ? 1.0 / cos0 : std::numeric_limits<double>::infinity();
  c.b = 2.0 * (1.0 - eta) + std::sqrt(eta / (1.0 - eta)) * std::min(inv_cos, 1.0 / ratio);

  const double rs1 = std::sqrt(s1);
  const double inner = 0.5 * ((1.0 - eta) * n0 / rs1 + eta * rs1 / n0);
  const double raw = std::ceil(4.0 / (3.0 * eta) * std::log(inner));
  c.tau = std::max<std::int64_t>(1, static_cast<std::int64_t>(raw));
  return c;
}

TraceRecord diagnostics(const Vector& x_t, const Vector& x_prev, const LinearOperator& m,
                        const Spectrum* reference, std::int64_t t) {
  if (x_t.size() != m.dim() || x_prev.size() != m.dim()) {
    throw DimensionError("diagnostics: dimension mismatch");
  }
  return detail::make_record(t, x_t, m.apply(x_t), &x_prev, reference);
}

}  // namespace gdsvd
