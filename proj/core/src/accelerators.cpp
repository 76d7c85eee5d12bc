#include "gdsvd/accelerators.hpp"

#include <cmath>
#include <string>

namespace gdsvd {

namespace {

constexpr double kDivergenceFactor = 1e8;

bool should_stop(std::int64_t t, double eps_u, double eps_sigma, double eps) {
  return t >= 2 && eps_u < eps && eps_sigma < eps;
}

}  // namespace

void NesterovConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("NesterovConfig: eta must be positive");
  if (mu && !(*mu > 0.0)) throw std::invalid_argument("NesterovConfig: mu must be positive");
  if (rho && !(*rho > 1.0)) throw std::invalid_argument("NesterovConfig: rho must exceed 1");
  if (sigma1_estimate && !(*sigma1_estimate > 0.0)) {
    throw std::invalid_argument("NesterovConfig: sigma1_estimate must be positive");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("NesterovConfig: eps must be positive");
  if (max_iter < 2) throw std::invalid_argument("NesterovConfig: max_iter must be at least 2");
}

void MomentumConfig::validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("MomentumConfig: beta must lie in [0, 1)");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("MomentumConfig: eta must lie in (0, 1)");
  if (warmup < 0) throw std::invalid_argument("MomentumConfig: warmup must be non-negative");
  if (!(eps > 0.0)) throw std::invalid_argument("MomentumConfig: eps must be positive");
  if (max_iter < 2) throw std::invalid_argument("MomentumConfig: max_iter must be at least 2");
}

std::int64_t polyak_warmup(double beta) { return static_cast<std::int64_t>(std::ceil(100.0 * beta)); }

NesterovParameters nesterov_parameters(const Vector& x, const NesterovConfig& cfg) {
  const double s1 = cfg.sigma1_estimate.value_or(x.squaredNorm());
  NesterovParameters p;
  p.mu = cfg.mu.value_or(0.05 * s1);
  const double rho = cfg.rho.value_or(9.0 * s1 / p.mu);
  p.alpha = 1.0 / std::sqrt(rho);
  return p;
}

NesterovState nesterov_step(const Vector& x, const Vector& v, const LinearOperator& m,
                            const NesterovConfig& cfg) {
  if (x.size() != m.dim() || v.size() != m.dim()) throw DimensionError("nesterov_step: dimension mismatch");
  const NesterovParameters p = nesterov_parameters(x, cfg);
  NesterovState s;
  s.y = x + (p.alpha / (1.0 + p.alpha)) * (v - x);
  const double ny2 = s.y.squaredNorm();
  if (ny2 == 0.0) throw SolverError("nesterov_step: zero-norm extrapolated point");
  const Vector my = m.apply(s.y);
  s.x = adaptive_step(s.y, my, cfg.eta);
  const Vector grad = ny2 * s.y - my;
  s.v = (1.0 - p.alpha) * v + p.alpha * (s.y - grad / p.mu);
  return s;
}

Rank1Result solve_nesterov(const LinearOperator& m, const NesterovConfig& cfg, const Spectrum* reference,
                           const Vector* x0) {
  cfg.validate();
  Rank1Result res;
  Vector x;
  if (x0 != nullptr) {
    if (x0->size() != m.dim()) throw DimensionError("solve_nesterov: initial point dimension mismatch");
    if (x0->squaredNorm() == 0.0) throw SolverError("solve_nesterov: zero initial point");
    x = *x0;
  } else {
    x = detail::random_init_counted(m, cfg.seed, res.matvecs);
  }
  res.initial_point = x;
  Vector v = x;
  const double n0 = x.norm();
  double nx = n0;
  if (cfg.record_trace) {
    const Vector mx = m.apply(x);
    res.trace.push_back(detail::make_record(0, x, mx, nullptr, reference));
  }

  std::int64_t t = 0;
  while (t < cfg.max_iter) {
    NesterovState s = nesterov_step(x, v, m, cfg);
    ++res.matvecs;
    ++t;
    const double nn = s.x.norm();
    if (!std::isfinite(nn) || nn > kDivergenceFactor * n0) {
      res.diverged = true;
      break;
    }
    if (!(nn > 0.0)) throw SolverError("solve_nesterov: iterate collapsed at t = " + std::to_string(t));
    const double eps_u = (s.x / nn - x / nx).norm();
    const double eps_sigma = std::abs(nn * nn - nx * nx);
    Vector prev = std::move(x);
    x = std::move(s.x);
    v = std::move(s.v);
    nx = nn;
    if (cfg.record_trace) {
      const Vector mx = m.apply(x);
      res.trace.push_back(detail::make_record(t, x, mx, &prev, reference));
    }
    if (should_stop(t, eps_u, eps_sigma, cfg.eps)) {
      res.converged = true;
      break;
    }
  }
  res.iterations = t;
  res.sigma_hat = nx * nx;
  res.u_hat = x / nx;
  return res;
}

Vector momentum_step(const Vector& x, const Vector& x_prev, const LinearOperator& m,
                     const MomentumConfig& cfg, std::int64_t t) {
  if (x.size() != m.dim() || x_prev.size() != m.dim()) {
    throw DimensionError("momentum_step: dimension mismatch");
  }
  const bool warming_up = cfg.mode == MomentumMode::Polyak && t < cfg.warmup;
  const double beta = warming_up ? 0.0 : cfg.beta;
  const double alpha = cfg.mode == MomentumMode::Nesterov ? beta : 0.0;
  const Vector delta = x - x_prev;
  const Vector y = x + alpha * delta;
  if (y.squaredNorm() == 0.0) throw SolverError("momentum_step: zero-norm extrapolated point");
  // Written as an adaptive step at y plus corrections so that beta = 0
  // reproduces gd_step bit for bit.
  const Vector base = adaptive_step(y, m.apply(y), cfg.eta);
  return base + (x - y) + beta * delta;
}

Rank1Result solve_momentum(const LinearOperator& m, const MomentumConfig& cfg, const Spectrum* reference) {
  cfg.validate();
  Rank1Result res;
  Vector x = detail::random_init_counted(m, cfg.seed, res.matvecs);
  res.initial_point = x;
  Vector prev = x;
  const double n0 = x.norm();
  double nx = n0;
  if (cfg.record_trace) {
    const Vector mx = m.apply(x);
    res.trace.push_back(detail::make_record(0, x, mx, nullptr, reference));
  }

  std::int64_t t = 0;
  while (t < cfg.max_iter) {
    Vector next = momentum_step(x, prev, m, cfg, t);
    ++res.matvecs;
    ++t;
    const double nn = next.norm();
    if (!std::isfinite(nn) || nn > kDivergenceFactor * n0) {
      res.diverged = true;
      break;
    }
    if (!(nn > 0.0)) throw SolverError("solve_momentum: iterate collapsed at t = " + std::to_string(t));
    const double eps_u = (next / nn - x / nx).norm();
    const double eps_sigma = std::abs(nn * nn - nx * nx);
    prev = std::move(x);
    x = std::move(next);
    nx = nn;
    if (cfg.record_trace) {
      const Vector mx = m.apply(x);
      res.trace.push_back(detail::make_record(t, x, mx, &prev, reference));
    }
    if (should_stop(t, eps_u, eps_sigma, cfg.eps)) {
      res.converged = true;
      break;
    }
  }
  res.iterations = t;
  res.sigma_hat = nx * nx;
  res.u_hat = x / nx;
  return res;
}

}  // namespace gdsvd
