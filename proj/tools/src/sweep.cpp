#include "gdsvd_bench/sweep.hpp"

#include <gdsvd/matrixgen.hpp>
#include <gdsvd/serialize.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

namespace gdsvd::bench {

bool uses_beta(Method m) noexcept { return m == Method::Polyak || m == Method::Nesterov; }

namespace {

struct Job {
  double gap;
  Index n;
  Method method;
  std::optional<double> beta;
  int repeat;
};

std::string beta_label(const std::optional<double>& beta) { return beta ? format_double(*beta) : "-"; }

Rank1Result run_one(const LinearOperator& op, const Job& job, const SweepOptions& opts, std::uint64_t seed) {
  KsvdOptions ko;
  ko.method = job.method;
  ko.solver.eta = opts.eta;
  ko.solver.eps = opts.eps;
  ko.solver.max_iter = opts.max_iter;
  ko.solver.seed = seed;
  if (job.beta) {
    ko.momentum.beta = *job.beta;
    ko.momentum.eta = opts.eta;
    ko.momentum.warmup = job.method == Method::Polyak ? polyak_warmup(*job.beta) : 0;
  }
  return solve_single(op, 0, ko);
}

}  // namespace

SweepReport run_gap_sweep(const SweepOptions& opts) {
  if (opts.repeats < 1) throw std::invalid_argument("gap sweep: repeats must be positive");
  if (opts.methods.empty()) throw std::invalid_argument("gap sweep: no methods");
  const std::vector<double> gaps = opts.gaps.empty() ? gap_sweep_preset() : opts.gaps;

  std::vector<Job> jobs;
  for (double gap : gaps) {
    for (Index n : opts.n_list) {
      for (Method m : opts.methods) {
        std::vector<std::optional<double>> betas{std::nullopt};
        if (uses_beta(m)) betas.assign(opts.beta_grid.begin(), opts.beta_grid.end());
        if (betas.empty()) throw std::invalid_argument("gap sweep: empty beta grid");
        for (const auto& b : betas) {
          for (int r = 0; r < opts.repeats; ++r) jobs.push_back(Job{gap, n, m, b, r});
        }
      }
    }
  }

  SweepReport rep;
  rep.raw.resize(jobs.size());
  parallel_for(jobs.size(), opts.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    // One instance per (gap, n, repeat), shared by every method and β.
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(job.repeat);
    GeneratorSpec spec;
    spec.n = job.n;
    spec.family = Family::Rank2Gap;
    spec.gap = job.gap;
    spec.seed = seed;
    const GeneratedMatrix g = generate(spec);
    const LinearOperator op = dense_operator(g.matrix);

    const auto t0 = std::chrono::steady_clock::now();
    const Rank1Result r = run_one(op, job, opts, seed);
    const auto t1 = std::chrono::steady_clock::now();

    SweepRaw& row = rep.raw[i];
    row.gap = job.gap;
    row.n = job.n;
    row.method = job.method;
    row.beta_or_mode = beta_label(job.beta);
    row.repeat = job.repeat;
    row.seed = seed;
    row.iterations = r.iterations;
    row.matvecs = r.matvecs;
    row.converged = r.converged;
    row.wallclock_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  });
  rep.cells = aggregate(rep.raw);
  rep.slopes = fit_slopes(rep.cells, &rep.warnings);
  return rep;
}

std::vector<SweepCell> aggregate(const std::vector<SweepRaw>& raw) {
  std::vector<SweepCell> cells;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i;
    std::vector<double> its, mvs, ms;
    bool all = true;
    while (j < raw.size() && raw[j].gap == raw[i].gap && raw[j].n == raw[i].n && raw[j].method == raw[i].method &&
           raw[j].beta_or_mode == raw[i].beta_or_mode) {
      its.push_back(static_cast<double>(raw[j].iterations));
      mvs.push_back(static_cast<double>(raw[j].matvecs));
      ms.push_back(raw[j].wallclock_ms);
      all = all && raw[j].converged;
      ++j;
    }
    SweepCell c;
    c.gap = raw[i].gap;
    c.n = raw[i].n;
    c.method = raw[i].method;
    c.beta_or_mode = raw[i].beta_or_mode;
    c.iterations_mean = mean(its);
    c.iterations_std = stddev(its);
    c.iterations_median = median(its);
    c.matvecs = mean(mvs);
    c.converged = all;
    c.wallclock_ms = mean(ms);
    cells.push_back(std::move(c));
    i = j;
  }
  return cells;
}

std::vector<SlopeFit> fit_slopes(const std::vector<SweepCell>& cells, std::vector<std::string>* warnings) {
  // (method, n) -> gap -> best converged cell, keeping first-seen order.
  std::vector<std::pair<Method, Index>> order;
  std::map<std::pair<int, Index>, std::vector<std::pair<double, const SweepCell*>>> best;
  std::map<std::pair<int, Index>, bool> multi;
  for (const SweepCell& c : cells) {
    const auto key = std::make_pair(static_cast<int>(c.method), c.n);
    if (!best.count(key)) {
      order.emplace_back(c.method, c.n);
      best[key];
    }
    if (c.beta_or_mode != "-") multi[key] = true;
    if (!c.converged) continue;
    auto& list = best[key];
    auto it = std::find_if(list.begin(), list.end(), [&](const auto& p) { return p.first == c.gap; });
    if (it == list.end()) {
      list.emplace_back(c.gap, &c);
    } else if (c.iterations_median < it->second->iterations_median) {
      it->second = &c;
    }
  }

  std::vector<SlopeFit> fits;
  for (const auto& [method, n] : order) {
    const auto key = std::make_pair(static_cast<int>(method), n);
    SlopeFit f;
    f.method = method;
    f.n = n;
    f.selection = multi[key] ? "best-beta" : "single";
    std::vector<double> x, y;
    for (const auto& [gap, cell] : best[key]) {
      f.gaps.push_back(gap);
      f.iterations.push_back(cell->iterations_median);
      f.chosen.push_back(cell->beta_or_mode);
      x.push_back(std::log(1.0 / gap));
      y.push_back(std::log(cell->iterations_median));
    }
    f.fit = fit_line(x, y);
    if (!f.fit && warnings != nullptr) {
      warnings->push_back("no slope for method " + std::string(to_string(method)) + " at n=" + std::to_string(n) +
                          ": fewer than two converged gaps");
    }
    fits.push_back(std::move(f));
  }
  return fits;
}

void write_raw_csv(std::ostream& out, const std::vector<SweepRaw>& raw, const RunManifest* manifest) {
  if (manifest != nullptr) write_manifest_comment(out, *manifest);
  out << "gap,n,method,beta_or_mode,repeat,seed,iterations,matvecs,converged,wallclock_ms\n";
  for (const SweepRaw& r : raw) {
    out << format_double(r.gap) << ',' << r.n << ',' << to_string(r.method) << ',' << r.beta_or_mode << ','
        << r.repeat << ',' << r.seed << ',' << r.iterations << ',' << r.matvecs << ',' << (r.converged ? 1 : 0)
        << ',' << format_double(r.wallclock_ms) << '\n';
  }
}

void write_report_csv(std::ostream& out, const std::vector<SweepCell>& cells, const RunManifest* manifest) {
  if (manifest != nullptr) write_manifest_comment(out, *manifest);
  out << "gap,n,method,beta_or_mode,iterations_mean,iterations_std,iterations_median,matvecs,converged,"
         "wallclock_ms\n";
  for (const SweepCell& c : cells) {
    out << format_double(c.gap) << ',' << c.n << ',' << to_string(c.method) << ',' << c.beta_or_mode << ','
        << format_double(c.iterations_mean) << ',' << format_double(c.iterations_std) << ','
        << format_double(c.iterations_median) << ',' << format_double(c.matvecs) << ',' << (c.converged ? 1 : 0)
        << ',' << format_double(c.wallclock_ms) << '\n';
  }
}

nlohmann::ordered_json slopes_json(const std::vector<SlopeFit>& fits, const std::vector<std::string>& warnings) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SlopeFit& f : fits) {
    nlohmann::ordered_json j;
    j["method"] = std::string(to_string(f.method));
    j["n"] = f.n;
    j["selection"] = f.selection;
    j["cells"] = f.gaps.size();
    if (f.fit) {
      j["slope"] = f.fit->slope;
      j["intercept"] = f.fit->intercept;
    } else {
      j["slope"] = nullptr;
      j["intercept"] = nullptr;
    }
    j["gaps"] = f.gaps;
    j["median_iterations"] = f.iterations;
    j["chosen"] = f.chosen;
    arr.push_back(std::move(j));
  }
  return {{"fits", arr}, {"warnings", warnings}};
}

std::vector<SweepCell> read_report_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  std::vector<SweepCell> cells;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    SweepCell c;
    c.gap = t.number(i, "gap");
    c.n = static_cast<Index>(t.number(i, "n"));
    c.method = parse_method(t.text(i, "method"));
    c.beta_or_mode = t.text(i, "beta_or_mode");
    c.iterations_mean = t.number(i, "iterations_mean");
    c.iterations_std = t.number(i, "iterations_std");
    c.iterations_median = t.number(i, "iterations_median");
    c.matvecs = t.number(i, "matvecs");
    c.converged = t.number(i, "converged") != 0.0;
    c.wallclock_ms = t.number(i, "wallclock_ms");
    cells.push_back(std::move(c));
  }
  return cells;
}

}  // namespace gdsvd::bench
