#include "gdsvd_bench/verify.hpp"

#include <gdsvd/accelerators.hpp>
#include <gdsvd/ksvd.hpp>
#include <gdsvd/matrixgen.hpp>
#include <gdsvd/objective.hpp>
#include <gdsvd/power.hpp>
#include <gdsvd/serialize.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <stdexcept>

namespace gdsvd::bench {

VerifyLevel parse_level(const std::string& s) {
  if (s == "fast") return VerifyLevel::Fast;
  if (s == "full") return VerifyLevel::Full;
  throw std::invalid_argument("unknown verify level '" + s + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Instance {
  std::string label;
  GeneratedMatrix gen;
};

double sigma_at(const Spectrum& s, std::size_t i) { return i < s.size() ? s.values[i] : 0.0; }

std::vector<Instance> trajectory_instances(const VerifyOptions& opts) {
  const int copies = opts.level == VerifyLevel::Full ? 10 : 2;
  std::vector<GeneratorSpec> specs;
  for (int c = 0; c < copies; ++c) {
    const std::uint64_t s = opts.seed + static_cast<std::uint64_t>(c);
    specs.push_back({20, Family::Rank2Gap, 0.3, {}, s});
    specs.push_back({30, Family::ExpDecay, 0.1, {}, s});
    specs.push_back({40, Family::PolyDecay, 0.1, {}, s});
    specs.push_back({25, Family::LinDecay, 0.1, {}, s});
    specs.push_back({15, Family::Explicit, 0.1, {4.0, 2.0, 1.0, 0.5}, s});
    specs.push_back({10, Family::Rank1, 0.1, {2.0}, s});
  }
  std::vector<Instance> out;
  for (const auto& spec : specs) out.push_back({format_generator(spec), generate(spec)});
  return out;
}

std::vector<double> etas(const VerifyOptions& opts) {
  if (opts.level == VerifyLevel::Full) return {0.25, 0.5, 0.75};
  return {0.5};
}

// Iterates of the update rule under test, from the standard random start.
std::vector<Vector> trajectory(const LinearOperator& op, std::uint64_t seed, double eta, const StepRule& step,
                               int max_steps) {
  std::vector<Vector> xs{random_init(op, seed)};
  for (int t = 0; t < max_steps; ++t) {
    const Vector& x = xs.back();
    Vector next = step(x, op.apply(x), eta);
    const double nn = next.norm();
    if (!(nn > 0.0) || !std::isfinite(nn)) break;
    const double nx = x.norm();
    const double eps_u = (next / nn - x / nx).norm();
    const double eps_sigma = std::abs(nn * nn - nx * nx);
    xs.push_back(std::move(next));
    if (t >= 1 && eps_u < 1e-13 && eps_sigma < 1e-13) break;
  }
  return xs;
}

struct Traj {
  const Instance* inst;
  double eta;
  std::vector<Vector> xs;
};

std::vector<Traj> all_trajectories(const std::vector<Instance>& insts, const VerifyOptions& opts) {
  std::vector<Traj> out;
  for (const Instance& in : insts) {
    const LinearOperator op = dense_operator(in.gen.matrix);
    for (double eta : etas(opts)) {
      out.push_back({&in, eta, trajectory(op, opts.seed + 17, eta, opts.step, 20000)});
    }
  }
  return out;
}

std::string where(const Traj& tr, std::int64_t t) {
  return tr.inst->label + " eta=" + format_double(tr.eta) + " t=" + std::to_string(t);
}

CheckResult upper_check(std::string name, double observed, double bound, std::string detail) {
  return {std::move(name), observed <= bound, observed, bound, std::move(detail)};
}

CheckResult check_monotone_cosine(const std::vector<Traj>& trajs) {
  double worst = -kInf;
  std::string at;
  for (const Traj& tr : trajs) {
    const Vector u1 = tr.inst->gen.truth.vector(0);
    double prev = std::abs(tr.xs[0].dot(u1)) / tr.xs[0].norm();
    for (std::size_t t = 1; t < tr.xs.size(); ++t) {
      const double c = std::abs(tr.xs[t].dot(u1)) / tr.xs[t].norm();
      if (prev - c > worst) {
        worst = prev - c;
        at = where(tr, static_cast<std::int64_t>(t));
      }
      prev = c;
    }
  }
  return upper_check("monotone_cosine", worst, 1e-12, "max decrease of |cos theta_1,t| at " + at);
}

CheckResult check_sign_stability(const std::vector<Traj>& trajs) {
  double flips = 0.0;
  std::string at = "none";
  for (const Traj& tr : trajs) {
    const Vector u1 = tr.inst->gen.truth.vector(0);
    const double s0 = tr.xs[0].dot(u1);
    for (std::size_t t = 1; t < tr.xs.size(); ++t) {
      if (tr.xs[t].dot(u1) * s0 < 0.0) {
        flips += 1.0;
        at = where(tr, static_cast<std::int64_t>(t));
      }
    }
  }
  return upper_check("sign_stability", flips, 0.0, "sign changes of <x_t, u_1>, last at " + at);
}

std::vector<CheckResult> check_norm_bounds(const std::vector<Traj>& trajs) {
  double worst_lo = 0.0, worst_hi = 0.0;
  std::string at_lo, at_hi;
  for (const Traj& tr : trajs) {
    const Spectrum& s = tr.inst->gen.truth;
    const AttractionConstants c = attraction_constants(tr.xs[0], s, tr.eta);
    const double rs1 = std::sqrt(s.values.front());
    for (std::size_t t = 2; t < tr.xs.size(); ++t) {
      const double nx = tr.xs[t].norm();
      const double lo = c.a * rs1 / nx;
      if (lo > worst_lo) {
        worst_lo = lo;
        at_lo = where(tr, static_cast<std::int64_t>(t));
      }
      if (static_cast<std::int64_t>(t) > c.tau) {
        const double hi = nx / (c.b * rs1);
        if (hi > worst_hi) {
          worst_hi = hi;
          at_hi = where(tr, static_cast<std::int64_t>(t));
        }
      }
    }
  }
  return {upper_check("norm_lower_bound", worst_lo, 1.0 + 1e-12, "max a sqrt(s1) / ||x_t|| for t > 1 at " + at_lo),
          upper_check("norm_upper_bound", worst_hi, 1.0 + 1e-12, "max ||x_t|| / (b sqrt(s1)) for t > tau at " + at_hi)};
}

// The rate argument only controls the ratios cos(theta_i,t) / cos(theta_1,t),
// so the provable form carries the factor tan(theta_1,t0):
//   ||x^ - u1|| ||x^ + u1|| = 2 sin(theta_1,t) <= 2 tan(theta_1,t0) rho^(t - t0)
//   |cos(theta_i,t)| <= rho_i^(t - t0) |cos(theta_i,t0)| / |cos(theta_1,t0)|
// with t0 = tau + 1, the first index where ||x_t|| <= b sqrt(s1) is
// guaranteed. Without the tan factor the bound fails whenever
// |cos(theta_1,t0)| < 1/sqrt(2); those points are counted in the detail.
CheckResult check_alignment_rate(const std::vector<Traj>& trajs) {
  double worst = -kInf;
  std::size_t literal_misses = 0;
  std::string at;
  for (const Traj& tr : trajs) {
    const Spectrum& s = tr.inst->gen.truth;
    const AttractionConstants c = attraction_constants(tr.xs[0], s, tr.eta);
    const std::size_t t0 = static_cast<std::size_t>(c.tau) + 1;
    if (t0 >= tr.xs.size()) continue;
    const double s1 = s.values.front();
    const double denom = ((1.0 - tr.eta) * c.b * c.b + tr.eta) * s1;
    const Vector u1 = s.vector(0);
    const Vector x0 = tr.xs[t0] / tr.xs[t0].norm();
    const double cos0 = std::abs(x0.dot(u1));
    const double tan0 = std::sqrt(std::max(0.0, 1.0 - cos0 * cos0)) / cos0;
    const double rho1 = 1.0 - tr.eta * (s1 - sigma_at(s, 1)) / denom;
    for (std::size_t t = static_cast<std::size_t>(c.tau); t < tr.xs.size(); ++t) {
      const Vector xh = tr.xs[t] / tr.xs[t].norm();
      const double lhs = (xh - u1).norm() * (xh + u1).norm();
      const double literal_steps = static_cast<double>(t) - static_cast<double>(c.tau);
      if (lhs > 2.0 * std::pow(rho1, literal_steps) + 1e-10) ++literal_misses;
      if (t < t0) continue;
      const double steps = static_cast<double>(t - t0);
      double excess = lhs - 2.0 * std::min(1.0, tan0 * std::pow(rho1, steps));
      for (std::size_t i = 1; i < s.size(); ++i) {
        const double rhoi = 1.0 - tr.eta * (s1 - s.values[i]) / denom;
        const double bound = std::pow(rhoi, steps) * std::abs(x0.dot(s.vector(i))) / cos0;
        excess = std::max(excess, std::abs(xh.dot(s.vector(i))) - bound);
      }
      if (excess > worst) {
        worst = excess;
        at = where(tr, static_cast<std::int64_t>(t));
      }
    }
  }
  return upper_check("alignment_rate", worst, 1e-10,
                     "max excess over 2 min(1, tan(theta_1,t0) rho^(t - t0)) and the per-direction bounds, at " + at +
                         "; bound without the tan factor exceeded at " + std::to_string(literal_misses) + " points");
}

CheckResult check_saddle_floor(const std::vector<Traj>& trajs) {
  double worst = kInf;  // min ||grad||^2 / floor
  std::size_t triggered = 0;
  std::string at = "none";
  for (const Traj& tr : trajs) {
    const Spectrum& s = tr.inst->gen.truth;
    // For rank 1, sigma_2 = 0 and only the small-norm branch can trigger.
    const double s1 = s.values.front();
    const double gap = s1 - sigma_at(s, 1);
    const AttractionConstants c = attraction_constants(tr.xs[0], s, tr.eta);
    const Vector u1 = s.vector(0);
    const double n0 = tr.xs[0].norm();
    const double cos0 = tr.xs[0].dot(u1) / n0;
    const double floor = std::min(c.a * c.a * s1, n0 * n0) * gap * gap / 4.0 * cos0 * cos0;
    const LinearOperator op = dense_operator(tr.inst->gen.matrix);
    for (std::size_t t = 0; t < tr.xs.size(); ++t) {
      const double nx2 = tr.xs[t].squaredNorm();
      bool near = nx2 <= gap / 2.0;
      for (std::size_t i = 1; i < s.size() && !near; ++i) near = std::abs(nx2 - s.values[i]) <= gap / 2.0;
      if (!near) continue;
      ++triggered;
      const double ratio = grad_g(tr.xs[t], op).squaredNorm() / floor;
      if (ratio < worst) {
        worst = ratio;
        at = where(tr, static_cast<std::int64_t>(t));
      }
    }
  }
  CheckResult r{"saddle_floor", worst >= 1.0 - 1e-12, worst, 1.0,
                "min ||grad g||^2 / floor over " + std::to_string(triggered) + " iterates near saddles, at " + at};
  return r;
}

CheckResult check_heron(const VerifyOptions& opts) {
  double worst = 0.0;
  const int runs = opts.level == VerifyLevel::Full ? 5 : 2;
  for (int r = 0; r < runs; ++r) {
    GeneratorSpec spec{50, Family::Rank1, 0.1, {3.0}, opts.seed + static_cast<std::uint64_t>(r)};
    const GeneratedMatrix g = generate(spec);
    const LinearOperator op = dense_operator(g.matrix);
    const std::vector<Vector> xs = trajectory(op, opts.seed + 100 + static_cast<std::uint64_t>(r), 0.5, opts.step, 60);
    const double rs1 = std::sqrt(3.0);
    for (std::size_t t = 0; t + 1 < xs.size(); ++t) {
      const double e = xs[t].norm() / rs1 - 1.0;
      const double e1 = xs[t + 1].norm() / rs1 - 1.0;
      worst = std::max(worst, std::abs(e1 - e * e / (2.0 * (e + 1.0))));
    }
  }
  return upper_check("heron_identity", worst, 1e-13, "max |eps_{t+1} - eps_t^2 / (2 (eps_t + 1))|, rank-1, eta = 1/2");
}

CheckResult check_gradient_fd(const VerifyOptions& opts, std::mt19937_64& gen) {
  double worst = 0.0;
  const int cases = opts.level == VerifyLevel::Full ? 10 : 3;
  std::normal_distribution<double> nd;
  for (int c = 0; c < cases; ++c) {
    GeneratorSpec spec{12, Family::ExpDecay, 0.1, {}, opts.seed + 200 + static_cast<std::uint64_t>(c)};
    const GeneratedMatrix g = generate(spec);
    const LinearOperator op = dense_operator(g.matrix);
    const double f2 = g.matrix.frobenius_norm_sq();
    Vector x(12);
    for (Index i = 0; i < 12; ++i) x(i) = nd(gen) * std::sqrt(g.truth.values.front() / 12.0);
    const Vector analytic = grad_g(x, op);
    Vector fd(12);
    const double h = 1e-5 * std::max(1.0, x.norm());
    for (Index i = 0; i < 12; ++i) {
      Vector xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      fd(i) = (g_value(xp, op, f2) - g_value(xm, op, f2)) / (2.0 * h);
    }
    worst = std::max(worst, (fd - analytic).norm() / analytic.norm());
  }
  return upper_check("gradient_fd", worst, 1e-6, "relative error of grad g vs central differences");
}

CheckResult check_hessian_fd(const VerifyOptions& opts, std::mt19937_64& gen) {
  double worst = 0.0;
  const int cases = opts.level == VerifyLevel::Full ? 10 : 3;
  std::normal_distribution<double> nd;
  for (int c = 0; c < cases; ++c) {
    GeneratorSpec spec{15, Family::PolyDecay, 0.1, {}, opts.seed + 300 + static_cast<std::uint64_t>(c)};
    const GeneratedMatrix g = generate(spec);
    const LinearOperator op = dense_operator(g.matrix);
    Vector x(15), v(15);
    for (Index i = 0; i < 15; ++i) {
      x(i) = nd(gen) * 0.4;
      v(i) = nd(gen);
    }
    v.normalize();
    const double h = 1e-5;
    const Vector fd = (grad_g(Vector(x + h * v), op) - grad_g(Vector(x - h * v), op)) / (2.0 * h);
    const Vector analytic = hessian_apply(x, op, v);
    worst = std::max(worst, (fd - analytic).norm() / analytic.norm());
  }
  return upper_check("hessian_fd", worst, 1e-5, "relative error of Hessian-vector product vs differences of grad g");
}

CheckResult check_curvature(const std::vector<Instance>& insts, std::mt19937_64& gen) {
  double worst_lo = kInf, worst_hi = 0.0;
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (const Instance& in : insts) {
    const Spectrum& s = in.gen.truth;
    const double s1 = s.values.front();
    const CurvatureBounds cb = curvature_bounds(s1, sigma_at(s, 1));
    const Index n = in.gen.matrix.dim();
    const Matrix m = in.gen.matrix.values();
    for (int p = 0; p < 6; ++p) {
      Vector w(n);
      for (Index i = 0; i < n; ++i) w(i) = nd(gen);
      w.normalize();
      const double sign = p % 2 == 0 ? 1.0 : -1.0;
      const Vector x = sign * std::sqrt(s1) * s.vector(0) + cb.radius * ud(gen) * w;
      const Matrix h = x.squaredNorm() * Matrix::Identity(n, n) + 2.0 * x * x.transpose() - m;
      const Spectrum hs = jacobi_eigh(Matrix(0.5 * (h + h.transpose())));
      worst_lo = std::min(worst_lo, hs.values.back() / cb.mu);
      worst_hi = std::max(worst_hi, hs.values.front() / cb.L);
    }
  }
  return {"curvature_sandwich", worst_lo >= 1.0 && worst_hi <= 1.0, worst_lo, 1.0,
          "min lambda_min(Hess) / mu inside the ball (must be >= 1); max lambda_max / L = " + format_double(worst_hi)};
}

std::vector<CheckResult> check_error_decompositions(const VerifyOptions& opts, std::mt19937_64& gen) {
  double worst1 = 0.0, worst2 = 0.0;
  const int cases = opts.level == VerifyLevel::Full ? 200 : 50;
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> dim(2, 12);
  for (int c = 0; c < cases; ++c) {
    const int n = dim(gen);
    Vector x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = nd(gen);
      y(i) = nd(gen) * 2.0;
    }
    const ErrorDecomposition d = error_decomposition(x, y);
    const double scale1 = x.squaredNorm() + y.squaredNorm();
    worst1 = std::max(worst1, std::abs((x - y).squaredNorm() - d.total) / scale1);
    worst1 = std::max(worst1, std::abs(d.norm_gap + d.direction_gap - d.total) / scale1);
    const double lhs = (x * x.transpose() - y * y.transpose()).squaredNorm();
    worst2 = std::max(worst2, std::abs(lhs - outer_error_decomposition(x, y)) / (scale1 * scale1));
  }
  return {upper_check("error_decomposition", worst1, 1e-12, "relative |(||x|| - ||y||)^2 + direction term - ||x - y||^2|"),
          upper_check("outer_error_decomposition", worst2, 1e-12, "relative |identity - ||xx^T - yy^T||_F^2|")};
}

// Random spectrum with relative gaps >= 0.1, so every solver converges quickly.
GeneratorSpec oracle_spec(std::mt19937_64& gen, std::uint64_t seed) {
  std::uniform_int_distribution<int> dim(4, 20);
  std::uniform_real_distribution<double> top(0.5, 5.0);
  std::uniform_real_distribution<double> ratio(0.3, 0.9);
  GeneratorSpec spec;
  spec.n = dim(gen);
  spec.family = Family::Explicit;
  spec.seed = seed;
  const int d = std::uniform_int_distribution<int>(1, static_cast<int>(std::min<Index>(spec.n, 5)))(gen);
  double v = top(gen);
  for (int i = 0; i < d; ++i) {
    spec.sigma.push_back(v);
    v *= ratio(gen);
  }
  return spec;
}

CheckResult check_oracle(const VerifyOptions& opts, std::mt19937_64& gen) {
  const int count = opts.level == VerifyLevel::Full ? 50 : 10;
  double worst_s = 0.0, worst_u = 0.0;
  std::string at = "none";
  for (int c = 0; c < count; ++c) {
    const GeneratorSpec spec = oracle_spec(gen, opts.seed + 400 + static_cast<std::uint64_t>(c));
    const GeneratedMatrix g = generate(spec);
    const Spectrum oracle = jacobi_eigh(g.matrix);
    const double s1 = oracle.values.front();
    const LinearOperator op = dense_operator(g.matrix);
    for (Method m : {Method::Gd, Method::Power, Method::Polyak, Method::Nesterov, Method::NesterovGeneral}) {
      KsvdOptions ko;
      ko.method = m;
      ko.solver.eps = 1e-11;
      ko.solver.seed = opts.seed + static_cast<std::uint64_t>(c);
      ko.momentum.beta = 0.5;
      ko.momentum.warmup = m == Method::Polyak ? polyak_warmup(0.5) : 0;
      const Rank1Result r = solve_single(op, 0, ko);
      const double es = std::abs(r.sigma_hat - s1) / s1;
      const double eu = sign_agnostic_distance(r.u_hat, oracle.vector(0));
      const bool bad = !r.converged || es > worst_s || eu > worst_u;
      worst_s = std::max(worst_s, r.converged ? es : kInf);
      worst_u = std::max(worst_u, eu);
      if (bad) at = std::string(to_string(m)) + " on " + format_generator(spec);
    }
  }
  return {"oracle_equivalence", worst_s <= 1e-6 && worst_u <= 1e-4, worst_s, 1e-6,
          std::to_string(count) + " instances x 5 solvers; max relative sigma error (u error " +
              format_double(worst_u) + " vs 1e-4), worst " + at};
}

CheckResult check_momentum_zero(const VerifyOptions& opts) {
  GeneratorSpec spec{30, Family::ExpDecay, 0.1, {}, opts.seed + 500};
  const GeneratedMatrix g = generate(spec);
  const LinearOperator op = dense_operator(g.matrix);
  SolverConfig sc;
  sc.seed = opts.seed;
  const Rank1Result a = solve_rank1(op, sc);
  MomentumConfig mc;
  mc.beta = 0.0;
  mc.seed = opts.seed;
  const Rank1Result b = solve_momentum(op, mc);
  const double diff = (a.u_hat - b.u_hat).cwiseAbs().maxCoeff() + std::abs(a.sigma_hat - b.sigma_hat) +
                      static_cast<double>(std::abs(a.iterations - b.iterations));
  return upper_check("momentum_beta0_equals_gd", diff, 0.0, "bitwise difference between beta = 0 momentum and plain gd");
}

CheckResult check_telescoping(const VerifyOptions& opts) {
  GeneratorSpec spec{40, Family::ExpDecay, 0.1, {}, opts.seed + 600};
  const GeneratedMatrix g = generate(spec);
  const LinearOperator op = dense_operator(g.matrix);
  KsvdOptions ko;
  ko.solver.seed = opts.seed;
  const KsvdResult r = solve_ksvd(op, 3, ko);
  Matrix expect = g.matrix.values();
  for (const EigenPair& p : r.pairs) expect -= p.value * p.vector * p.vector.transpose();
  const double err = (densify(deflated_operator(op, r.pairs)) - expect).cwiseAbs().maxCoeff();
  return upper_check("deflation_telescoping", err, 1e-12, "max |densified deflated operator - explicit difference|");
}

std::vector<CheckResult> check_generators(const VerifyOptions& opts) {
  double sym = 0.0, psd = 0.0, frame = 0.0, fidelity = 0.0, determinism = 0.0;
  const int copies = opts.level == VerifyLevel::Full ? 4 : 1;
  for (int c = 0; c < copies; ++c) {
    for (Family f : {Family::Rank1, Family::Rank2Gap, Family::ExpDecay, Family::PolyDecay, Family::LinDecay}) {
      for (Index n : {Index{8}, Index{60}}) {
        GeneratorSpec spec{n, f, 0.25, {}, opts.seed + 700 + static_cast<std::uint64_t>(c)};
        const GeneratedMatrix g = generate(spec);
        const GeneratedMatrix g2 = generate(spec);
        const Matrix m = g.matrix.values();
        sym = std::max(sym, (m - m.transpose()).cwiseAbs().maxCoeff());
        const Spectrum e = jacobi_eigh(g.matrix);
        psd = std::max(psd, -e.values.back());
        const Matrix& u = g.truth.vectors;
        const Index d = u.cols();
        frame = std::max(frame, (u.transpose() * u - Matrix::Identity(d, d)).norm());
        for (std::size_t i = 0; i < g.truth.size(); ++i) {
          fidelity = std::max(fidelity, std::abs(e.values[i] - g.truth.values[i]) / g.truth.values[i]);
        }
        determinism = std::max(determinism, (g.matrix.values() - g2.matrix.values()).cwiseAbs().maxCoeff());
      }
    }
  }
  return {upper_check("generator_symmetry", sym, 1e-14, "max |M - M^T|"),
          upper_check("generator_psd", psd, 1e-10, "max -lambda_min(M)"),
          upper_check("generator_frame", frame, 1e-10, "max ||U^T U - I||_F"),
          upper_check("generator_spectrum", fidelity, 1e-10, "max relative error of oracle vs requested values"),
          upper_check("generator_determinism", determinism, 0.0, "max difference between two generations")};
}

std::vector<CheckResult> check_ksvd(const VerifyOptions& opts) {
  double order = 0.0, ortho = 0.0, contract = 0.0;
  const int copies = opts.level == VerifyLevel::Full ? 3 : 1;
  for (int c = 0; c < copies; ++c) {
    const std::uint64_t seed = opts.seed + 800 + static_cast<std::uint64_t>(c);
    std::vector<GeneratorSpec> specs{{60, Family::ExpDecay, 0.1, {}, seed},
                                     {60, Family::PolyDecay, 0.1, {}, seed},
                                     {60, Family::LinDecay, 0.1, {}, seed},
                                     {120, Family::Explicit, 0.1, {5.0, 4.0, 3.0, 2.0, 1.0}, seed}};
    if (opts.level == VerifyLevel::Full) specs.push_back({400, Family::ExpDecay, 0.1, {}, seed});
    for (const GeneratorSpec& spec : specs) {
      const GeneratedMatrix g = generate(spec);
      const LinearOperator op = dense_operator(g.matrix);
      const std::size_t k = g.truth.size();
      KsvdOptions ko;
      ko.solver.eps = 1e-10;
      ko.solver.seed = seed;
      const KsvdResult r = solve_ksvd(op, k, ko);
      const double s1 = r.pairs.front().value;
      for (std::size_t i = 0; i < r.pairs.size(); ++i) {
        if (i > 0) order = std::max(order, (r.pairs[i].value - r.pairs[i - 1].value) / s1);
        for (std::size_t j = 0; j < i; ++j) ortho = std::max(ortho, std::abs(r.pairs[i].vector.dot(r.pairs[j].vector)));
      }
      // Contract only claimed when every relative gap among the leading k is >= 0.1.
      bool gaps_ok = true;
      for (std::size_t i = 0; i + 1 < k; ++i) {
        gaps_ok = gaps_ok && (g.truth.values[i] - g.truth.values[i + 1]) / g.truth.values[i] >= 0.1;
      }
      if (!gaps_ok) continue;
      for (std::size_t i = 0; i < k; ++i) {
        contract = std::max(contract, std::abs(r.pairs[i].value - g.truth.values[i]) / g.truth.values[i]);
        contract = std::max(contract, sign_agnostic_distance(r.pairs[i].vector, g.truth.vector(i)));
      }
    }
  }
  return {upper_check("ksvd_ordering", order, 1e-6, "max (s^_i - s^_{i-1}) / s^_1"),
          upper_check("ksvd_orthogonality", ortho, 1e-4, "max |u^_i . u^_j|"),
          upper_check("ksvd_accuracy", contract, 1e-4, "max relative sigma / vector error where gaps >= 0.1")};
}

double projector_distance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  const Index n = a.front().size();
  Matrix d = Matrix::Zero(n, n);
  for (const Vector& v : a) d += v * v.transpose();
  for (const Vector& v : b) d -= v * v.transpose();
  return d.norm();
}

CheckResult check_asymmetric(const VerifyOptions& opts, std::mt19937_64& gen) {
  const int count = opts.level == VerifyLevel::Full ? 10 : 3;
  std::normal_distribution<double> nd;
  double worst_s = 0.0, worst_sub = 0.0;
  for (int c = 0; c < count; ++c) {
    Matrix n(12, 8);
    for (Index i = 0; i < n.rows(); ++i) {
      for (Index j = 0; j < n.cols(); ++j) n(i, j) = nd(gen);
    }
    KsvdOptions ko;
    ko.solver.eps = 1e-12;
    ko.solver.seed = opts.seed + static_cast<std::uint64_t>(c);
    const AsymResult a = solve_asymmetric(n, 3, ko, AsymStrategy::Gram);
    const AsymResult b = solve_asymmetric(n, 3, ko, AsymStrategy::Dilation);
    for (std::size_t i = 0; i < 3; ++i) worst_s = std::max(worst_s, std::abs(a.sigma[i] - b.sigma[i]) / a.sigma[0]);
    worst_sub = std::max({worst_sub, projector_distance(a.u, b.u), projector_distance(a.v, b.v)});
  }
  return {"gram_dilation_agreement", worst_s <= 1e-6 && worst_sub <= 1e-4, worst_s, 1e-6,
          "max relative sigma gap; projector distance " + format_double(worst_sub) + " vs 1e-4"};
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
  std::mt19937_64 gen(opts.seed ^ 0x5DEECE66DULL);
  const std::vector<Instance> insts = trajectory_instances(opts);
  const std::vector<Traj> trajs = all_trajectories(insts, opts);

  std::vector<CheckResult> out;
  auto add = [&out](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  out.push_back(check_monotone_cosine(trajs));
  add(check_norm_bounds(trajs));
  out.push_back(check_sign_stability(trajs));
  out.push_back(check_alignment_rate(trajs));
  out.push_back(check_saddle_floor(trajs));
  out.push_back(check_heron(opts));
  out.push_back(check_gradient_fd(opts, gen));
  out.push_back(check_hessian_fd(opts, gen));
  out.push_back(check_curvature(insts, gen));
  add(check_error_decompositions(opts, gen));
  out.push_back(check_oracle(opts, gen));
  out.push_back(check_momentum_zero(opts));
  out.push_back(check_telescoping(opts));
  add(check_generators(opts));
  add(check_ksvd(opts));
  out.push_back(check_asymmetric(opts, gen));
  return out;
}

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  std::size_t failed = 0;
  for (const CheckResult& c : checks) {
    if (!c.passed) ++failed;
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " observed=" << format_double(c.observed)
        << " bound=" << format_double(c.bound) << " (" << c.detail << ")\n";
  }
  out << (failed == 0 ? "all " + std::to_string(checks.size()) + " checks passed"
                      : std::to_string(failed) + " of " + std::to_string(checks.size()) + " checks failed")
      << '\n';
}

}  // namespace gdsvd::bench
