// Acceptance suite: one PASS/FAIL line per criterion, each with its runtime
// limit. Exit status is nonzero if any criterion fails.

#include <gdsvd_bench/common.hpp>
#include <gdsvd_bench/decay.hpp>
#include <gdsvd_bench/sweep.hpp>
#include <gdsvd_bench/verify.hpp>

#include <gdsvd/ksvd.hpp>
#include <gdsvd/matrixgen.hpp>
#include <gdsvd/rank1.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

using namespace gdsvd;
using namespace gdsvd::bench;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Rank-1 traces for criteria 1 and 2: M = 3 u u^T, n = 100, eta = 1/2.
constexpr int kRank1Seeds = 10;
constexpr double kRank1Sigma = 3.0;

std::vector<double> heron_errors(std::uint64_t seed) {
  GeneratorSpec spec;
  spec.family = Family::Rank1;
  spec.n = 100;
  spec.sigma = {kRank1Sigma};
  spec.seed = seed;
  const GeneratedMatrix g = generate(spec);
  SolverConfig cfg;
  cfg.eta = 0.5;
  cfg.seed = seed;
  cfg.eps = 1e-300;  // run to the iteration cap; the criterion inspects the whole trace
  cfg.max_iter = 30;
  cfg.record_trace = true;
  const Rank1Result r = solve_rank1(dense_operator(g.matrix), cfg, &g.truth);
  std::vector<double> eps;
  for (const TraceRecord& rec : r.trace) eps.push_back(*rec.heron_eps);
  return eps;
}

Outcome quadratic_rate() {
  // Below this level eps_t is dominated by rounding in ||x_t||, so its sign
  // carries no information.
  constexpr double kRoundoff = 1e-14;
  double worst_excess = -1.0;
  int worst_hit = 0;
  for (int s = 0; s < kRank1Seeds; ++s) {
    const auto e = heron_errors(static_cast<std::uint64_t>(s));
    int hit = -1;
    for (std::size_t t = 0; t < e.size(); ++t) {
      if (hit < 0 && std::abs(e[t]) <= 1e-12) hit = static_cast<int>(t);
    }
    if (hit < 0 || hit > 15) return {false, "seed " + std::to_string(s) + " did not reach |eps| <= 1e-12 by t = 15"};
    worst_hit = std::max(worst_hit, hit);
    for (std::size_t t = 1; t + 1 < e.size(); ++t) {
      const double bound = std::min(e[t] * e[t], e[t]) / 2.0 + 1e-14;
      worst_excess = std::max(worst_excess, e[t + 1] - bound);
      if (e[t + 1] > bound) {
        return {false, "seed " + std::to_string(s) + " t=" + std::to_string(t + 1) + " eps=" + fmt(e[t + 1]) +
                           " exceeds " + fmt(bound)};
      }
      if (!(e[t + 1] > 0.0) && !(std::abs(e[t + 1]) <= kRoundoff)) {
        return {false, "seed " + std::to_string(s) + " t=" + std::to_string(t + 1) + " eps=" + fmt(e[t + 1]) + " <= 0"};
      }
    }
  }
  return {true, std::to_string(kRank1Seeds) + " seeds; |eps| <= 1e-12 by t=" + std::to_string(worst_hit) +
                    " (limit 15); max eps_{t+1} - bound = " + fmt(worst_excess)};
}

Outcome heron_identity() {
  double worst = 0.0;
  for (int s = 0; s < kRank1Seeds; ++s) {
    const auto e = heron_errors(static_cast<std::uint64_t>(s));
    for (std::size_t t = 0; t + 1 < e.size(); ++t) {
      const double predicted = e[t] * e[t] / (2.0 * (e[t] + 1.0));
      worst = std::max(worst, std::abs(e[t + 1] - predicted));
    }
  }
  return {worst <= 1e-13, std::to_string(kRank1Seeds) + " seeds; max |eps_{t+1} - eps_t^2/(2(eps_t+1))| = " +
                              fmt(worst) + " (limit 1e-13)"};
}

Outcome sweep_slope(Method m, double lo, double hi) {
  SweepOptions o;
  o.methods = {m};
  o.n_list = {100};
  o.gaps = gap_grid(2, 12);
  o.repeats = 5;
  o.jobs = default_jobs();
  const SweepReport r = run_gap_sweep(o);
  if (r.slopes.size() != 1 || !r.slopes[0].fit) return {false, "no slope could be fitted"};
  const SlopeFit& f = r.slopes[0];
  const double slope = f.fit->slope;
  std::string detail = std::string(to_string(m)) + " slope " + fmt(slope) + " over " + std::to_string(f.fit->points) +
                       " gaps (" + f.selection + "), range [" + fmt(lo) + ", " + fmt(hi) + "]";
  if (f.fit->points != o.gaps.size()) detail += "; some cells did not converge";
  return {slope >= lo && slope <= hi && f.fit->points == o.gaps.size(), detail};
}

DecayOptions decay_grid() {
  DecayOptions o;
  o.n_list = {50, 100, 200};
  o.repeats = 5;
  o.eps = 1e-10;
  o.jobs = default_jobs();
  return o;
}

Outcome deflation_accuracy() {
  DecayOptions o = decay_grid();
  o.methods = {Method::Gd};
  const auto raw = run_decay_bench(o);
  double worst_sigma = 0.0, worst_uv = 0.0;
  for (const DecayRaw& r : raw) {
    worst_sigma = std::max(worst_sigma, r.errors.eps_sigma / r.sigma1);
    worst_uv = std::max(worst_uv, r.errors.eps_uv);
    if (!(r.errors.eps_sigma <= 1e-6 * r.sigma1) || !(r.errors.eps_uv <= 1e-4)) {
      return {false, std::string(to_string(r.family)) + " n=" + std::to_string(r.n) + " seed " +
                         std::to_string(r.seed) + ": eps_sigma/sigma1=" + fmt(r.errors.eps_sigma / r.sigma1) +
                         " eps_uv=" + fmt(r.errors.eps_uv)};
    }
  }
  return {true, std::to_string(raw.size()) + " cells; max eps_sigma/sigma1 = " + fmt(worst_sigma) +
                    " (limit 1e-6), max eps_uv = " + fmt(worst_uv) + " (limit 1e-4)"};
}

Outcome power_parity() {
  DecayOptions o = decay_grid();
  o.methods = {Method::Gd, Method::Power};
  o.k = 1;
  const auto raw = run_decay_bench(o);
  std::map<std::tuple<Family, Index, std::uint64_t>, std::vector<const DecayRaw*>> cells;
  for (const DecayRaw& r : raw) cells[{r.family, r.n, r.seed}].push_back(&r);
  double worst_sigma = 0.0, worst_u = 0.0;
  for (const auto& [key, pair] : cells) {
    if (pair.size() != 2 || pair[0]->pairs.empty() || pair[1]->pairs.empty()) return {false, "missing result"};
    const EigenPair& a = pair[0]->pairs[0];
    const EigenPair& b = pair[1]->pairs[0];
    const double ds = std::abs(a.value - b.value) / pair[0]->sigma1;
    const double du = sign_agnostic_distance(a.vector, b.vector);
    worst_sigma = std::max(worst_sigma, ds);
    worst_u = std::max(worst_u, du);
  }
  const bool ok = worst_sigma <= 1e-6 && worst_u <= 1e-4;
  return {ok, std::to_string(cells.size()) + " cells; max |sigma_gd - sigma_pow|/sigma1 = " + fmt(worst_sigma) +
                  " (limit 1e-6), max u distance = " + fmt(worst_u) + " (limit 1e-4)"};
}

Outcome invariant_suite() {
  VerifyOptions o;
  o.level = VerifyLevel::Full;
  const auto checks = run_verify(o);
  std::string failed;
  for (const CheckResult& c : checks) {
    if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
  }
  if (!failed.empty()) return {false, "failed: " + failed};
  return {true, std::to_string(checks.size()) + " checks passed at level full"};
}

Outcome asymmetric_consistency() {
  constexpr int kMatrices = 20;
  constexpr std::size_t k = 3;
  double worst_agree = 0.0, worst_oracle = 0.0;
  for (int s = 0; s < kMatrices; ++s) {
    std::mt19937_64 gen(static_cast<std::uint64_t>(s));
    std::normal_distribution<double> normal;
    Matrix n(30, 20);
    for (Index j = 0; j < n.cols(); ++j)
      for (Index i = 0; i < n.rows(); ++i) n(i, j) = normal(gen);

    KsvdOptions opts;
    opts.solver.eps = 1e-12;
    opts.solver.seed = static_cast<std::uint64_t>(s);
    const AsymResult gram = solve_asymmetric(n, k, opts, AsymStrategy::Gram);
    const AsymResult dil = solve_asymmetric(n, k, opts, AsymStrategy::Dilation);
    const Matrix ntn = n.transpose() * n;
    const Spectrum oracle = jacobi_eigh(Matrix(0.5 * (ntn + ntn.transpose())));
    if (!gram.converged || !dil.converged) return {false, "matrix " + std::to_string(s) + " did not converge"};
    for (std::size_t i = 0; i < k; ++i) {
      const double truth = std::sqrt(oracle.values[i]);
      worst_agree = std::max(worst_agree, std::abs(gram.sigma[i] - dil.sigma[i]) / truth);
      worst_oracle = std::max({worst_oracle, std::abs(gram.sigma[i] - truth) / truth,
                               std::abs(dil.sigma[i] - truth) / truth});
    }
  }
  const bool ok = worst_agree <= 1e-6 && worst_oracle <= 1e-6;
  return {ok, std::to_string(kMatrices) + " matrices 30x20, top-3; max gram/dilation rel. diff = " + fmt(worst_agree) +
                  ", max rel. error vs jacobi on N^T N = " + fmt(worst_oracle) + " (limit 1e-6)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "quadratic_rank1_rate", 1.0, quadratic_rate},
      {2, "heron_identity", 1.0, heron_identity},
      {3, "gap_slope_gd", 120.0, [] { return sweep_slope(Method::Gd, 0.8, 1.2); }},
      {4, "gap_slope_nesterov", 300.0, [] { return sweep_slope(Method::Nesterov, 0.3, 0.7); }},
      {5, "deflation_accuracy", 180.0, deflation_accuracy},
      {6, "power_parity", 60.0, power_parity},
      {7, "invariant_suite", 120.0, invariant_suite},
      {8, "asymmetric_consistency", 30.0, asymmetric_consistency},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool passed = o.passed && in_time;
    if (!passed) ++failures;
    std::printf("%s %d %s: %s; runtime %.2fs (limit %gs)%s\n", passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : " EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
