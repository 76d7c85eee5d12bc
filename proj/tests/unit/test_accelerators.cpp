#include "oracles.hpp"

#include <gdsvd/accelerators.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace gdsvd;

namespace {

struct Problem {
  Matrix a;
  LinearOperator op;
};

Problem psd_problem(Index n, unsigned seed) {
  const Matrix b = oracle::random_matrix(n, n, seed);
  Matrix a = b * b.transpose() / static_cast<double>(n);
  return {a, dense_operator(DenseSymMatrix::symmetrize(a))};
}

}  // namespace

TEST(MomentumStep, NesterovTranscription) {
  const Problem p = psd_problem(6, 1);
  const Vector x = oracle::random_vector(6, 2);
  const Vector xp = oracle::random_vector(6, 3);
  MomentumConfig cfg;
  cfg.beta = 0.3;
  cfg.eta = 0.4;
  cfg.mode = MomentumMode::Nesterov;
  const Vector y = x + 0.3 * (x - xp);
  const Vector grad = y.squaredNorm() * y - oracle::loop_matvec(p.a, y);
  const Vector expected = x + 0.3 * (x - xp) - (0.4 / y.squaredNorm()) * grad;
  EXPECT_LT((momentum_step(x, xp, p.op, cfg, 10) - expected).norm(), 1e-13);
}

TEST(MomentumStep, PolyakTranscriptionAndWarmup) {
  const Problem p = psd_problem(5, 4);
  const Vector x = oracle::random_vector(5, 5);
  const Vector xp = oracle::random_vector(5, 6);
  MomentumConfig cfg;
  cfg.beta = 0.6;
  cfg.mode = MomentumMode::Polyak;
  cfg.warmup = 3;
  const Vector grad = x.squaredNorm() * x - oracle::loop_matvec(p.a, x);
  const Vector plain = x - (0.5 / x.squaredNorm()) * grad;
  const Vector heavy = plain + 0.6 * (x - xp);
  EXPECT_LT((momentum_step(x, xp, p.op, cfg, 2) - plain).norm(), 1e-13);
  EXPECT_LT((momentum_step(x, xp, p.op, cfg, 3) - heavy).norm(), 1e-13);
}

TEST(MomentumStep, BetaZeroIsGdStepBitForBit) {
  const Problem p = psd_problem(8, 7);
  const Vector x = oracle::random_vector(8, 8);
  MomentumConfig cfg;
  cfg.beta = 0.0;
  for (MomentumMode mode : {MomentumMode::Nesterov, MomentumMode::Polyak}) {
    cfg.mode = mode;
    EXPECT_EQ(momentum_step(x, oracle::random_vector(8, 9), p.op, cfg, 5), gd_step(x, p.op, cfg.eta));
  }
}

TEST(SolveMomentum, BetaZeroReproducesGd) {
  const Problem p = psd_problem(15, 10);
  MomentumConfig mc;
  mc.beta = 0.0;
  mc.seed = 3;
  SolverConfig sc;
  sc.seed = 3;
  const Rank1Result a = solve_momentum(p.op, mc);
  const Rank1Result b = solve_rank1(p.op, sc);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.u_hat, b.u_hat);
  EXPECT_EQ(a.sigma_hat, b.sigma_hat);
}

TEST(SolveMomentum, ConvergesToTopPair) {
  const Problem p = psd_problem(20, 11);
  const double s1 = oracle::eigenvalues_desc(p.a).front();
  for (MomentumMode mode : {MomentumMode::Nesterov, MomentumMode::Polyak}) {
    MomentumConfig cfg;
    cfg.mode = mode;
    cfg.beta = 0.5;
    cfg.eps = 1e-12;
    cfg.warmup = mode == MomentumMode::Polyak ? polyak_warmup(cfg.beta) : 0;
    const Rank1Result r = solve_momentum(p.op, cfg);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.sigma_hat, s1, 1e-9 * s1);
    EXPECT_LT(oracle::sign_free_distance(r.u_hat, oracle::top_eigenvector(p.a)), 1e-5);
  }
}

TEST(SolveMomentum, Validation) {
  MomentumConfig cfg;
  cfg.beta = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.warmup = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_EQ(polyak_warmup(0.5), 50);
  EXPECT_EQ(polyak_warmup(0.95), 95);
}

TEST(NesterovStep, StraightLineTranscription) {
  const Problem p = psd_problem(7, 12);
  const Vector x = oracle::random_vector(7, 13);
  const Vector v = oracle::random_vector(7, 14);
  NesterovConfig cfg;
  const double s1 = x.squaredNorm();
  const double mu = 0.05 * s1;
  const double alpha = 1.0 / std::sqrt(9.0 * s1 / mu);
  const Vector y = x + alpha / (1.0 + alpha) * (v - x);
  const Vector my = oracle::loop_matvec(p.a, y);
  const Vector grad = y.squaredNorm() * y - my;
  const Vector x_next = y - (cfg.eta / y.squaredNorm()) * grad;
  const Vector v_next = (1.0 - alpha) * v + alpha * (y - grad / mu);

  const NesterovState s = nesterov_step(x, v, p.op, cfg);
  EXPECT_LT((s.y - y).norm(), 1e-13);
  EXPECT_LT((s.x - x_next).norm(), 1e-12);
  EXPECT_LT((s.v - v_next).norm(), 1e-12);
}

TEST(NesterovStep, ParametersHonourOverrides) {
  NesterovConfig cfg;
  const Vector x = Vector::Constant(4, 1.0);  // ||x||^2 = 4
  NesterovParameters p = nesterov_parameters(x, cfg);
  EXPECT_DOUBLE_EQ(p.mu, 0.2);
  EXPECT_DOUBLE_EQ(p.alpha, 1.0 / std::sqrt(180.0));
  cfg.sigma1_estimate = 10.0;
  cfg.mu = 1.0;
  cfg.rho = 16.0;
  p = nesterov_parameters(x, cfg);
  EXPECT_DOUBLE_EQ(p.mu, 1.0);
  EXPECT_DOUBLE_EQ(p.alpha, 0.25);
  cfg.rho = 0.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SolveNesterov, ConvergesFromNeighbourhoodAndRandomStart) {
  const Problem p = psd_problem(12, 15);
  const double s1 = oracle::eigenvalues_desc(p.a).front();
  const Vector u1 = oracle::top_eigenvector(p.a);
  NesterovConfig cfg;
  cfg.eps = 1e-12;
  const Vector x0 = std::sqrt(s1) * u1 + 0.01 * oracle::random_vector(12, 16);
  const Rank1Result near = solve_nesterov(p.op, cfg, nullptr, &x0);
  ASSERT_TRUE(near.converged);
  EXPECT_NEAR(near.sigma_hat, s1, 1e-9 * s1);
  EXPECT_EQ(near.initial_point, x0);

  const Rank1Result random = solve_nesterov(p.op, cfg);
  ASSERT_TRUE(random.converged);
  EXPECT_NEAR(random.sigma_hat, s1, 1e-9 * s1);
  EXPECT_LT(oracle::sign_free_distance(random.u_hat, u1), 1e-5);
}

TEST(SolveNesterov, RejectsZeroStart) {
  const Problem p = psd_problem(3, 17);
  const Vector zero = Vector::Zero(3);
  EXPECT_THROW(solve_nesterov(p.op, NesterovConfig{}, nullptr, &zero), SolverError);
}
