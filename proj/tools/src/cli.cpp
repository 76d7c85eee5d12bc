#include "gdsvd_bench/cli.hpp"

#include "gdsvd_bench/common.hpp"
#include "gdsvd_bench/decay.hpp"
#include "gdsvd_bench/sweep.hpp"
#include "gdsvd_bench/verify.hpp"

#include <gdsvd/ksvd.hpp>
#include <gdsvd/matrix_market.hpp>
#include <gdsvd/matrixgen.hpp>
#include <gdsvd/serialize.hpp>
#include <gdsvd/version.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace gdsvd::bench {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kMethodNames{"gd", "power", "polyak", "nesterov", "nesterov-general"};

// Options shared by every subcommand that runs a solver.
struct SolverFlags {
  double eta = 0.5;
  double eps = 1e-8;
  double beta = 0.5;
  std::int64_t max_iter = 500000;
  std::uint64_t seed = 0;
};

void add_seed(CLI::App* sub, std::uint64_t& seed) {
  sub->add_option("--seed", seed, "Base random seed (falls back to $KSVD_SEED)")->envname("KSVD_SEED");
}

void add_config(CLI::App* sub, std::string& path) {
  sub->add_option("--config", path, "key=value file; command-line flags take precedence");
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Appends the entries of the --config file as flags, skipping any flag that is
// already on the command line. Subcommand config in CLI11 only works through
// the root app, so the file is folded in before parsing.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  if (args.size() < 2) return args;
  const CLI::App* sub = nullptr;
  for (const CLI::App* c : app.get_subcommands([](const CLI::App*) { return true; })) {
    if (c->get_name() == args[1]) sub = c;
  }
  if (sub == nullptr) return args;
  std::string path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';' || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ConversionError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || key == "config") {
      throw CLI::ExtrasError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'",
                             CLI::ExitCodes::ExtrasError);
    }
    if (given_on_command_line(args, flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (val == "true" || val == "1" || val == "yes" || val == "on") extra.push_back(flag);
    } else {
      extra.push_back(flag + "=" + val);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

// Resolved option values, as printed by CLI11's own config writer.
nlohmann::ordered_json resolved_config(const CLI::App& sub) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  std::istringstream in(sub.config_to_str(true, false));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#' || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!val.empty() && val.front() == ' ') val.erase(val.begin());
    if (key == "config") continue;
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    j[key] = val;
  }
  return j;
}

std::vector<Method> methods_from(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

std::vector<Family> families_from(const std::vector<std::string>& names) {
  std::vector<Family> out;
  for (const auto& n : names) out.push_back(parse_family(n));
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// --- solve ---------------------------------------------------------------

struct SolveArgs {
  std::string input;
  std::string generate;
  std::size_t k = 0;
  std::string method = "gd";
  std::string strategy = "gram";
  std::string trace;
  bool json = false;
  bool orthonormalize = false;
  std::optional<double> target;
  SolverFlags s;
};

KsvdOptions ksvd_options(const SolveArgs& a) {
  KsvdOptions o;
  o.method = parse_method(a.method);
  o.solver.eta = a.s.eta;
  o.solver.eps = a.s.eps;
  o.solver.max_iter = a.s.max_iter;
  o.solver.seed = a.s.seed;
  o.solver.record_trace = !a.trace.empty();
  o.momentum.beta = a.s.beta;
  o.momentum.eta = a.s.eta;
  o.momentum.warmup = o.method == Method::Polyak ? polyak_warmup(a.s.beta) : 0;
  o.target_accuracy = a.target;
  o.orthonormalize = a.orthonormalize;
  return o;
}

int cmd_solve(const SolveArgs& a, const CLI::App& sub, const std::vector<std::string>& argv, std::ostream& out,
              std::ostream& err) {
  if (a.input.empty() == a.generate.empty()) {
    err << "solve: exactly one of --input or --generate is required\n" << sub.help();
    return kExitUsage;
  }
  KsvdOptions opts = ksvd_options(a);

  std::optional<DenseSymMatrix> sym;
  std::optional<Matrix> general;
  std::optional<Spectrum> truth;
  std::string hash;
  if (!a.generate.empty()) {
    GeneratorSpec spec = parse_generator(a.generate);
    if (a.generate.find("seed=") == std::string::npos) spec.seed = a.s.seed;
    GeneratedMatrix g = generate(spec);
    sym = std::move(g.matrix);
    truth = std::move(g.truth);
  } else {
    LoadedMatrix m = load_matrix_market(a.input);
    if (auto* p = std::get_if<DenseSymMatrix>(&m)) {
      sym = std::move(*p);
    } else {
      general = std::move(std::get<Matrix>(m));
    }
  }
  hash = sym ? matrix_hash(sym->values()) : matrix_hash(*general);
  const RunManifest manifest = make_manifest(argv, resolved_config(sub), a.s.seed, hash);

  bool converged = false;
  nlohmann::ordered_json result;
  std::vector<std::vector<TraceRecord>> traces;
  if (sym) {
    if (truth) opts.reference = &*truth;
    KsvdResult r = solve_ksvd(dense_operator(*sym), a.k, opts);
    converged = r.converged;
    result = nlohmann::ordered_json::parse(to_json(r));
    traces = std::move(r.traces);
    if (!r.gap_violations.empty()) err << "warning: reference spectrum violates the gap condition\n";
  } else {
    AsymResult r = solve_asymmetric(*general, a.k, opts, parse_strategy(a.strategy));
    converged = r.converged;
    result = nlohmann::ordered_json::parse(to_json(r));
    for (std::size_t i = 0; i < r.right_skipped.size(); ++i) {
      if (r.right_skipped[i]) err << "warning: right vector of pair " << i << " skipped (sigma too small)\n";
    }
  }
  result["manifest"] = manifest.to_json();

  if (!a.trace.empty()) {
    std::ostringstream csv;
    write_manifest_comment(csv, manifest);
    write_trace_csv(csv, traces);
    write_file(a.trace, csv.str());
  }
  if (a.json) {
    out << result.dump(2) << '\n';
  } else {
    out << "method " << result["method"].get<std::string>() << (converged ? ", converged" : ", NOT converged")
        << ", matvecs " << result["matvecs"] << '\n';
    const auto& pairs = result["pairs"];
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      out << "  sigma[" << i << "] = " << format_double(pairs[i]["sigma"].get<double>()) << "  iterations "
          << result["iterations"][i] << '\n';
    }
  }
  if (!converged) err << "warning: at least one pair did not converge\n";
  return converged ? kExitOk : kExitNotConverged;
}

// --- gapsweep --------------------------------------------------------------

struct SweepArgs {
  std::vector<std::string> methods{"gd", "power", "nesterov"};
  std::vector<Index> n_list{100};
  std::vector<double> gaps;
  int k_min = 1;
  int k_max = 20;
  int repeats = 5;
  std::vector<double> beta_grid{0.3, 0.5, 0.7, 0.8, 0.9, 0.95};
  std::string out_dir;
  unsigned jobs = default_jobs();
  SolverFlags s;
};

int cmd_gapsweep(const SweepArgs& a, const CLI::App& sub, const std::vector<std::string>& argv, std::ostream& out,
                 std::ostream& err) {
  SweepOptions o;
  o.methods = methods_from(a.methods);
  o.n_list = a.n_list;
  o.gaps = a.gaps.empty() ? gap_grid(a.k_min, a.k_max) : a.gaps;
  o.repeats = a.repeats;
  o.beta_grid = a.beta_grid;
  o.seed = a.s.seed;
  o.eta = a.s.eta;
  o.eps = a.s.eps;
  o.max_iter = a.s.max_iter;
  o.jobs = a.jobs;

  std::string fingerprint;
  for (double g : o.gaps) {
    for (Index n : o.n_list) fingerprint += "rank2:n=" + std::to_string(n) + ",gap=" + format_double(g) + ";";
  }
  const RunManifest manifest = make_manifest(argv, resolved_config(sub), o.seed, string_hash(fingerprint));
  const SweepReport rep = run_gap_sweep(o);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_file(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  std::ostringstream raw, report;
  write_raw_csv(raw, rep.raw, &manifest);
  write_report_csv(report, rep.cells, &manifest);
  write_file(dir / "raw.csv", raw.str());
  write_file(dir / "report.csv", report.str());
  nlohmann::ordered_json slopes = slopes_json(rep.slopes, rep.warnings);
  slopes["manifest"] = manifest.to_json();
  write_file(dir / "slopes.json", slopes.dump(2) + "\n");

  for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
  for (const SlopeFit& f : rep.slopes) {
    out << to_string(f.method) << " n=" << f.n << ": ";
    if (f.fit) {
      out << "slope " << format_double(f.fit->slope) << " over " << f.fit->points << " gaps (" << f.selection << ")\n";
    } else {
      out << "no slope\n";
    }
  }
  out << "wrote " << (dir / "report.csv").string() << '\n';
  return kExitOk;
}

// --- decaybench ------------------------------------------------------------

struct DecayArgs {
  std::vector<std::string> families{"exp", "poly", "lin"};
  std::vector<Index> n_list{50, 75, 100, 200};
  std::vector<std::string> methods{"gd", "power"};
  int repeats = 5;
  std::string out;
  std::optional<std::size_t> k;
  unsigned jobs = default_jobs();
  SolverFlags s;
};

int cmd_decaybench(const DecayArgs& a, const CLI::App& sub, const std::vector<std::string>& argv, std::ostream& out,
                   std::ostream& err) {
  DecayOptions o;
  o.families = families_from(a.families);
  o.n_list = a.n_list;
  o.methods = methods_from(a.methods);
  o.repeats = a.repeats;
  o.seed = a.s.seed;
  o.k = a.k;
  o.eps = a.s.eps;
  o.eta = a.s.eta;
  o.beta = a.s.beta;
  o.max_iter = a.s.max_iter;
  o.jobs = a.jobs;

  std::string fingerprint;
  for (Family f : o.families) {
    for (Index n : o.n_list) fingerprint += std::string(to_string(f)) + ":n=" + std::to_string(n) + ";";
  }
  const RunManifest manifest = make_manifest(argv, resolved_config(sub), o.seed, string_hash(fingerprint));
  const std::vector<DecayRaw> raw = run_decay_bench(o);
  bool all_converged = true;
  for (const DecayRaw& r : raw) all_converged = all_converged && r.converged;
  const std::vector<DecayRow> rows = aggregate(raw);

  std::ostringstream csv;
  write_decay_csv(csv, rows, &manifest);
  if (!a.out.empty()) {
    const fs::path p(a.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_file(p, csv.str());
    out << "wrote " << p.string() << '\n';
  } else {
    out << csv.str();
  }
  if (!all_converged) {
    err << "warning: some runs did not converge\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Top-k eigen/singular decomposition by gradient descent, with benchmarks"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  SolveArgs solve;
  CLI::App* s = app.add_subcommand("solve", "Compute the top-k pairs of one matrix");
  auto* in_opt = s->add_option("--input", solve.input, "Matrix Market file");
  s->add_option("--generate", solve.generate, "Generator spec, e.g. rank2:n=100,gap=0.1")->excludes(in_opt);
  s->add_option("--k", solve.k, "Number of pairs")->required()->check(CLI::PositiveNumber);
  s->add_option("--method", solve.method, "gd | power | polyak | nesterov | nesterov-general")
      ->check(CLI::IsMember(kMethodNames))
      ->capture_default_str();
  s->add_option("--strategy", solve.strategy, "gram | dilation (general matrices)")
      ->check(CLI::IsMember({"gram", "dilation"}))
      ->capture_default_str();
  s->add_option("--eta", solve.s.eta, "Step size")->capture_default_str();
  s->add_option("--eps", solve.s.eps, "Inner stopping tolerance")->capture_default_str();
  s->add_option("--target-accuracy", solve.target, "Outer accuracy; sets the inner tolerance to target/100");
  s->add_option("--beta", solve.s.beta, "Momentum coefficient")->capture_default_str();
  s->add_option("--max-iter", solve.s.max_iter, "Iteration cap per pair")->capture_default_str();
  add_seed(s, solve.s.seed);
  s->add_option("--trace", solve.trace, "Write per-iteration diagnostics to this CSV");
  s->add_flag("--json", solve.json, "Print the result as JSON");
  s->add_flag("--orthonormalize", solve.orthonormalize, "Gram-Schmidt the recovered vectors (cosmetic)");
  add_config(s, config_path);

  SweepArgs sweep;
  CLI::App* g = app.add_subcommand("gapsweep", "Iterations vs spectral gap on rank-2 matrices");
  g->add_option("--methods", sweep.methods, "Comma-separated methods")->delimiter(',')->check(CLI::IsMember(kMethodNames));
  g->add_option("--n-list", sweep.n_list, "Comma-separated dimensions")->delimiter(',');
  g->add_option("--gaps", sweep.gaps, "Explicit comma-separated gaps (overrides --gap-k-min/max)")->delimiter(',');
  g->add_option("--gap-k-min", sweep.k_min, "Smallest k in 10^(-k/4)")->capture_default_str();
  g->add_option("--gap-k-max", sweep.k_max, "Largest k in 10^(-k/4)")->capture_default_str();
  g->add_option("--repeats", sweep.repeats, "Seeds per cell")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--beta-grid", sweep.beta_grid, "Comma-separated momentum values")->delimiter(',');
  g->add_option("--out-dir", sweep.out_dir, "Output directory")->required();
  g->add_option("--eta", sweep.s.eta, "Step size")->capture_default_str();
  g->add_option("--eps", sweep.s.eps, "Stopping tolerance")->capture_default_str();
  g->add_option("--max-iter", sweep.s.max_iter, "Iteration cap")->capture_default_str();
  g->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_seed(g, sweep.s.seed);
  add_config(g, config_path);

  DecayArgs decay;
  CLI::App* d = app.add_subcommand("decaybench", "Recovery errors on the decay families");
  d->add_option("--families", decay.families, "Comma-separated: exp, poly, lin")->delimiter(',');
  d->add_option("--n-list", decay.n_list, "Comma-separated dimensions")->delimiter(',');
  d->add_option("--methods", decay.methods, "Comma-separated methods")->delimiter(',')->check(CLI::IsMember(kMethodNames));
  d->add_option("--repeats", decay.repeats, "Seeds per cell")->check(CLI::PositiveNumber)->capture_default_str();
  d->add_option("--out", decay.out, "CSV path (stdout when omitted)");
  d->add_option("--k", decay.k, "Pairs per matrix (default floor(log2 n))");
  decay.s.eps = 1e-10;
  d->add_option("--eps", decay.s.eps, "Inner stopping tolerance")->capture_default_str();
  d->add_option("--eta", decay.s.eta, "Step size")->capture_default_str();
  d->add_option("--beta", decay.s.beta, "Momentum coefficient")->capture_default_str();
  d->add_option("--max-iter", decay.s.max_iter, "Iteration cap per pair")->capture_default_str();
  d->add_option("--jobs", decay.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_seed(d, decay.s.seed);
  add_config(d, config_path);

  std::string level = "fast";
  std::uint64_t verify_seed = 0;
  CLI::App* v = app.add_subcommand("verify", "Run the invariant suite");
  v->add_option("--level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}))->capture_default_str();
  add_seed(v, verify_seed);
  add_config(v, config_path);

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(app, args);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<const char*> argv;
  for (const auto& a : expanded) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_solve(solve, *s, args, out, err);
    if (g->parsed()) return cmd_gapsweep(sweep, *g, args, out, err);
    if (d->parsed()) return cmd_decaybench(decay, *d, args, out, err);
    if (v->parsed()) {
      VerifyOptions vo;
      vo.level = parse_level(level);
      vo.seed = verify_seed;
      const auto checks = run_verify(vo);
      print_checks(out, checks);
      for (const auto& c : checks) {
        if (!c.passed) return kExitError;
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace gdsvd::bench
