#include "gdsvd_bench/decay.hpp"

#include <gdsvd/serialize.hpp>

#include <chrono>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gdsvd::bench {

std::vector<DecayRaw> run_decay_bench(const DecayOptions& opts) {
  if (opts.repeats < 1) throw std::invalid_argument("decay bench: repeats must be positive");
  struct Job {
    Family family;
    Index n;
    Method method;
    int repeat;
  };
  std::vector<Job> jobs;
  for (Family f : opts.families) {
    for (Index n : opts.n_list) {
      for (Method m : opts.methods) {
        for (int r = 0; r < opts.repeats; ++r) jobs.push_back(Job{f, n, m, r});
      }
    }
  }

  std::vector<DecayRaw> out(jobs.size());
  parallel_for(jobs.size(), opts.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(job.repeat);
    GeneratorSpec spec;
    spec.n = job.n;
    spec.family = job.family;
    spec.seed = seed;
    const GeneratedMatrix g = generate(spec);
    const std::size_t k = opts.k.value_or(g.truth.size());
    if (k > g.truth.size()) throw std::invalid_argument("decay bench: k exceeds the generated rank");

    KsvdOptions ko;
    ko.method = job.method;
    ko.solver.eta = opts.eta;
    ko.solver.eps = opts.eps;
    ko.solver.max_iter = opts.max_iter;
    ko.solver.seed = seed;
    ko.momentum.beta = opts.beta;
    ko.momentum.eta = opts.eta;
    ko.momentum.warmup = job.method == Method::Polyak ? polyak_warmup(opts.beta) : 0;

    const LinearOperator op = dense_operator(g.matrix);
    const auto t0 = std::chrono::steady_clock::now();
    KsvdResult r = solve_ksvd(op, k, ko);
    const auto t1 = std::chrono::steady_clock::now();

    DecayRaw& row = out[i];
    row.family = job.family;
    row.n = job.n;
    row.method = job.method;
    row.repeat = job.repeat;
    row.seed = seed;
    row.k = k;
    row.sigma1 = g.truth.values.front();
    row.converged = r.converged && r.pairs.size() == k;
    if (r.pairs.size() == k) {
      row.errors = recovery_errors(r, g.truth, k);
    } else {
      row.errors = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    row.pairs = std::move(r.pairs);
  });
  return out;
}

std::vector<DecayRow> aggregate(const std::vector<DecayRaw>& raw) {
  std::vector<DecayRow> rows;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i;
    std::vector<double> ms, es, eu;
    while (j < raw.size() && raw[j].family == raw[i].family && raw[j].n == raw[i].n &&
           raw[j].method == raw[i].method) {
      ms.push_back(raw[j].runtime_ms);
      es.push_back(raw[j].errors.eps_sigma);
      eu.push_back(raw[j].errors.eps_uv);
      ++j;
    }
    DecayRow r;
    r.family = raw[i].family;
    r.n = raw[i].n;
    r.method = raw[i].method;
    r.runtime_ms_mean = mean(ms);
    r.runtime_ms_std = stddev(ms);
    r.eps_sigma_mean = mean(es);
    r.eps_sigma_std = stddev(es);
    r.eps_uv_mean = mean(eu);
    r.eps_uv_std = stddev(eu);
    rows.push_back(r);
    i = j;
  }
  return rows;
}

void write_decay_csv(std::ostream& out, const std::vector<DecayRow>& rows, const RunManifest* manifest) {
  if (manifest != nullptr) write_manifest_comment(out, *manifest);
  out << "family,n,method,runtime_ms_mean,runtime_ms_std,eps_sigma_mean,eps_sigma_std,eps_uv_mean,eps_uv_std\n";
  for (const DecayRow& r : rows) {
    out << to_string(r.family) << ',' << r.n << ',' << to_string(r.method) << ',' << format_double(r.runtime_ms_mean)
        << ',' << format_double(r.runtime_ms_std) << ',' << format_double(r.eps_sigma_mean) << ','
        << format_double(r.eps_sigma_std) << ',' << format_double(r.eps_uv_mean) << ','
        << format_double(r.eps_uv_std) << '\n';
  }
}

std::vector<DecayRow> read_decay_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  std::vector<DecayRow> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    DecayRow r;
    r.family = parse_family(t.text(i, "family"));
    r.n = static_cast<Index>(t.number(i, "n"));
    r.method = parse_method(t.text(i, "method"));
    r.runtime_ms_mean = t.number(i, "runtime_ms_mean");
    r.runtime_ms_std = t.number(i, "runtime_ms_std");
    r.eps_sigma_mean = t.number(i, "eps_sigma_mean");
    r.eps_sigma_std = t.number(i, "eps_sigma_std");
    r.eps_uv_mean = t.number(i, "eps_uv_mean");
    r.eps_uv_std = t.number(i, "eps_uv_std");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace gdsvd::bench
