#pragma once

// Recovery accuracy of the deflation driver on the rank-floor(log2 n) decay
// families, against the generator's exact spectrum.

#include "gdsvd_bench/common.hpp"

#include <gdsvd/ksvd.hpp>
#include <gdsvd/matrixgen.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace gdsvd::bench {

struct DecayOptions {
  std::vector<Family> families{Family::ExpDecay, Family::PolyDecay, Family::LinDecay};
  std::vector<Index> n_list{50, 75, 100, 200};
  std::vector<Method> methods{Method::Gd, Method::Power};
  int repeats = 5;
  std::uint64_t seed = 0;
  /// Pairs to recover; floor(log2 n) when empty.
  std::optional<std::size_t> k;
  double eps = 1e-10;
  double eta = 0.5;
  double beta = 0.5;
  std::int64_t max_iter = 500000;
  unsigned jobs = 1;
};

struct DecayRaw {
  Family family = Family::ExpDecay;
  Index n = 0;
  Method method = Method::Gd;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  double sigma1 = 0.0;
  RecoveryErrors errors;
  bool converged = false;
  double runtime_ms = 0.0;
  std::vector<EigenPair> pairs;
};

struct DecayRow {
  Family family = Family::ExpDecay;
  Index n = 0;
  Method method = Method::Gd;
  double runtime_ms_mean = 0.0;
  double runtime_ms_std = 0.0;
  double eps_sigma_mean = 0.0;
  double eps_sigma_std = 0.0;
  double eps_uv_mean = 0.0;
  double eps_uv_std = 0.0;
};

std::vector<DecayRaw> run_decay_bench(const DecayOptions& opts);
std::vector<DecayRow> aggregate(const std::vector<DecayRaw>& raw);

void write_decay_csv(std::ostream& out, const std::vector<DecayRow>& rows, const RunManifest* manifest);
std::vector<DecayRow> read_decay_csv(std::istream& in);

}  // namespace gdsvd::bench
