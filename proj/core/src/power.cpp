#include "gdsvd/power.hpp"

#include <cmath>
#include <string>

namespace gdsvd {

namespace {

TraceRecord power_record(std::int64_t t, const Vector& x, const Vector* prev, double eps_sigma,
                         const Spectrum* reference) {
  TraceRecord rec;
  rec.t = t;
  rec.norm_x = x.norm();
  if (prev != nullptr) {
    rec.eps_u = sign_agnostic_distance(x, *prev);
    rec.eps_sigma = eps_sigma;
  }
  if (reference != nullptr && reference->size() > 0) {
    rec.cos_theta1 = x.dot(reference->vectors.col(0)) / rec.norm_x;
  }
  return rec;
}

}  // namespace

Vector power_step(const Vector& x, const LinearOperator& m) {
  Vector mx = m.apply(x);
  const double n = mx.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw SolverError("power_step: M x vanished");
  return mx / n;
}

Rank1Result solve_power(const LinearOperator& m, const SolverConfig& cfg, const Spectrum* reference) {
  cfg.validate();
  Rank1Result res;
  Vector x = detail::random_init_counted(m, cfg.seed, res.matvecs);
  res.initial_point = x;
  x /= x.norm();
  Vector mx = m.apply(x);
  ++res.matvecs;
  double s = mx.norm();
  if (!(s > 0.0)) throw SolverError("solve_power: M x vanished at t = 0");
  if (cfg.record_trace) res.trace.push_back(power_record(0, x, nullptr, 0.0, reference));

  std::int64_t t = 0;
  while (t < cfg.max_iter) {
    Vector next = mx / s;
    ++t;
    Vector mnext = m.apply(next);
    ++res.matvecs;
    const double s_next = mnext.norm();
    if (!(s_next > 0.0) || !std::isfinite(s_next)) {
      throw SolverError("solve_power: M x vanished at t = " + std::to_string(t));
    }
    const double eps_u = sign_agnostic_distance(next, x);
    const double eps_sigma = std::abs(s_next - s);
    Vector prev = std::move(x);
    x = std::move(next);
    mx = std::move(mnext);
    s = s_next;
    if (cfg.record_trace) res.trace.push_back(power_record(t, x, &prev, eps_sigma, reference));
    if (t >= 2 && eps_u < cfg.eps && eps_sigma < cfg.eps) {
      res.converged = true;
      break;
    }
  }
  res.iterations = t;
  res.sigma_hat = s;
  res.u_hat = x;
  return res;
}

}  // namespace gdsvd
