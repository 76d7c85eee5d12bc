#pragma once

// Rank-2 gap sweep: iterations to convergence as a function of sigma1 - sigma2,
// with a log-log slope fit per method.

#include "gdsvd_bench/common.hpp"

#include <gdsvd/ksvd.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gdsvd::bench {

struct SweepOptions {
  std::vector<Method> methods{Method::Gd, Method::Power, Method::Nesterov};
  std::vector<Index> n_list{100};
  std::vector<double> gaps;  // empty means the 20-point preset
  int repeats = 5;
  std::vector<double> beta_grid{0.3, 0.5, 0.7, 0.8, 0.9, 0.95};
  std::uint64_t seed = 0;
  double eta = 0.5;
  double eps = 1e-8;
  std::int64_t max_iter = 500000;
  unsigned jobs = 1;
};

struct SweepRaw {
  double gap = 0.0;
  Index n = 0;
  Method method = Method::Gd;
  std::string beta_or_mode;  // β for momentum methods, "-" otherwise
  int repeat = 0;
  std::uint64_t seed = 0;
  std::int64_t iterations = 0;
  std::int64_t matvecs = 0;
  bool converged = false;
  double wallclock_ms = 0.0;
};

struct SweepCell {
  double gap = 0.0;
  Index n = 0;
  Method method = Method::Gd;
  std::string beta_or_mode;
  double iterations_mean = 0.0;
  double iterations_std = 0.0;
  double iterations_median = 0.0;
  double matvecs = 0.0;  // mean over repeats
  bool converged = false;  // every repeat converged
  double wallclock_ms = 0.0;
};

struct SlopeFit {
  Method method = Method::Gd;
  Index n = 0;
  std::optional<LineFit> fit;
  /// "single" or "best-beta" (minimum median over the β grid per gap).
  std::string selection;
  std::vector<double> gaps;
  std::vector<double> iterations;
  std::vector<std::string> chosen;  // β (or "-") picked per gap
};

struct SweepReport {
  std::vector<SweepRaw> raw;
  std::vector<SweepCell> cells;
  std::vector<SlopeFit> slopes;
  std::vector<std::string> warnings;
};

bool uses_beta(Method m) noexcept;

SweepReport run_gap_sweep(const SweepOptions& opts);

/// Least squares of log(median iterations) on log(1/gap) per (method, n),
/// over fully converged cells only.
std::vector<SlopeFit> fit_slopes(const std::vector<SweepCell>& cells, std::vector<std::string>* warnings = nullptr);

std::vector<SweepCell> aggregate(const std::vector<SweepRaw>& raw);

void write_raw_csv(std::ostream& out, const std::vector<SweepRaw>& raw, const RunManifest* manifest);
void write_report_csv(std::ostream& out, const std::vector<SweepCell>& cells, const RunManifest* manifest);
nlohmann::ordered_json slopes_json(const std::vector<SlopeFit>& fits, const std::vector<std::string>& warnings);

std::vector<SweepCell> read_report_csv(std::istream& in);

}  // namespace gdsvd::bench
