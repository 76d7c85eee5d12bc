#include <gdsvd_bench/cli.hpp>
#include <gdsvd_bench/common.hpp>

#include <gdsvd/matrix_market.hpp>
#include <gdsvd/serialize.hpp>

#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace gdsvd;
using namespace gdsvd::bench;

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gdsvd");
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("gdsvd_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

// Drops manifest comments and the named column.
std::string strip_csv(const std::string& text, const std::string& column) {
  std::istringstream in(text);
  std::string line, out;
  long drop = -1;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    auto cells = split(line, ',');
    if (drop < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == column) drop = static_cast<long>(i);
      }
    }
    if (drop >= 0) cells.erase(cells.begin() + drop);
    for (const auto& c : cells) out += c + ",";
    out += "\n";
  }
  return out;
}

nlohmann::json solve_json(std::vector<std::string> args) {
  args.insert(args.begin(), "solve");
  args.push_back("--json");
  const CliRun r = cli(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  return nlohmann::json::parse(r.out);
}

}  // namespace

TEST(Cli, UsageErrorsExit64) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve", "--generate", "rank1:n=3"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve", "--k", "1"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve", "--k", "1", "--generate", "rank1:n=3", "--method", "sgd"}).code, kExitUsage);
  EXPECT_EQ(cli({"gapsweep"}).code, kExitUsage);
  EXPECT_EQ(cli({"verify", "--level", "slow"}).code, kExitUsage);
}

TEST(Cli, HelpExitsZero) {
  const CliRun r = cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("gapsweep"), std::string::npos);
}

TEST(Cli, SolveJsonReportsSigma) {
  const auto j = solve_json({"--generate", "rank1:n=20,sigma=3", "--k", "1"});
  EXPECT_EQ(j["method"], "gd");
  EXPECT_EQ(j["converged"], true);
  EXPECT_NEAR(j["pairs"][0]["sigma"].get<double>(), 3.0, 1e-8);
  EXPECT_EQ(j["pairs"][0]["u"].size(), 20u);
  EXPECT_TRUE(j["manifest"].contains("input_hash"));
  EXPECT_EQ(j["manifest"]["config"]["k"], "1");
}

TEST(Cli, SolveEveryMethod) {
  for (const char* m : {"gd", "power", "polyak", "nesterov", "nesterov-general"}) {
    const auto j = solve_json({"--generate", "explicit:n=12,sigma=3;1", "--k", "2", "--method", m, "--eps", "1e-10"});
    EXPECT_NEAR(j["pairs"][1]["sigma"].get<double>(), 1.0, 1e-6) << m;
  }
}

TEST(Cli, NotConvergedExits2) {
  const CliRun r = cli({"solve", "--generate", "rank2:n=30,gap=0.001", "--k", "1", "--max-iter", "3"});
  EXPECT_EQ(r.code, kExitNotConverged);
  EXPECT_NE(r.out.find("NOT converged"), std::string::npos);
}

TEST(Cli, RuntimeErrorsExit1) {
  EXPECT_EQ(cli({"solve", "--input", "/nonexistent/m.mtx", "--k", "1"}).code, kExitError);
  EXPECT_EQ(cli({"solve", "--generate", "rank2:n=4,gap=2", "--k", "1"}).code, kExitError);
}

TEST(Cli, SolveFromMatrixMarketFiles) {
  TempDir dir;
  write(dir / "sym.mtx", "%%MatrixMarket matrix array real symmetric\n2 2\n2\n1\n2\n");
  const auto j = solve_json({"--input", (dir / "sym.mtx").string(), "--k", "2", "--eps", "1e-12"});
  EXPECT_NEAR(j["pairs"][0]["sigma"].get<double>(), 3.0, 1e-9);
  EXPECT_NEAR(j["pairs"][1]["sigma"].get<double>(), 1.0, 1e-9);

  write(dir / "gen.mtx", "%%MatrixMarket matrix coordinate real general\n2 3 2\n1 1 3\n2 3 2\n");
  for (const char* s : {"gram", "dilation"}) {
    const auto a = solve_json({"--input", (dir / "gen.mtx").string(), "--k", "2", "--strategy", s, "--eps", "1e-12"});
    EXPECT_EQ(a["strategy"], s);
    EXPECT_NEAR(a["pairs"][0]["sigma"].get<double>(), 3.0, 1e-8);
    EXPECT_NEAR(a["pairs"][1]["sigma"].get<double>(), 2.0, 1e-8);
  }
}

TEST(Cli, TraceCsvReadsBack) {
  TempDir dir;
  const auto j = solve_json({"--generate", "rank2:n=10,gap=0.5", "--k", "2", "--trace", (dir / "t.csv").string()});
  std::ifstream in(dir / "t.csv");
  const auto rows = read_trace_csv(in);
  const std::size_t expected = j["iterations"][0].get<std::size_t>() + j["iterations"][1].get<std::size_t>() + 2;
  EXPECT_EQ(rows.size(), expected);
  EXPECT_TRUE(rows.front().record.cos_theta1.has_value());
  EXPECT_EQ(slurp(dir / "t.csv").rfind("# manifest {", 0), 0u);
}

TEST(Cli, ConfigPrecedence) {
  TempDir dir;
  write(dir / "run.cfg", "# comment\nk = 1\nmethod = power\ngenerate = exp:n=40\nseed = 3\n");
  const std::string cfg = (dir / "run.cfg").string();
  auto j = solve_json({"--config", cfg});
  EXPECT_EQ(j["method"], "power");
  EXPECT_EQ(j["manifest"]["seed"], 3);
  j = solve_json({"--config", cfg, "--method", "gd", "--seed", "1"});
  EXPECT_EQ(j["method"], "gd");
  EXPECT_EQ(j["manifest"]["seed"], 1);

  write(dir / "bad.cfg", "colour = red\n");
  EXPECT_EQ(cli({"solve", "--config", (dir / "bad.cfg").string(), "--k", "1"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve", "--config", (dir / "missing.cfg").string(), "--k", "1"}).code, kExitUsage);
}

TEST(Cli, SeedFallsBackToEnvironment) {
  TempDir dir;
  write(dir / "seeded.cfg", "seed = 3\n");
  ::setenv("KSVD_SEED", "5", 1);
  auto j = solve_json({"--generate", "rank1:n=4", "--k", "1"});
  EXPECT_EQ(j["manifest"]["seed"], 5);
  j = solve_json({"--generate", "rank1:n=4", "--k", "1", "--config", (dir / "seeded.cfg").string()});
  EXPECT_EQ(j["manifest"]["seed"], 3);
  j = solve_json({"--generate", "rank1:n=4", "--k", "1", "--seed", "8"});
  EXPECT_EQ(j["manifest"]["seed"], 8);
  ::unsetenv("KSVD_SEED");
  j = solve_json({"--generate", "rank1:n=4", "--k", "1"});
  EXPECT_EQ(j["manifest"]["seed"], 0);
}

TEST(Cli, GapSweepIsDeterministic) {
  TempDir a, b;
  const std::vector<std::string> common{"gapsweep", "--methods", "gd,nesterov", "--n-list", "20", "--gap-k-min", "2",
                                        "--gap-k-max", "5", "--repeats", "2", "--beta-grid", "0.5,0.8", "--jobs", "2"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out-dir", (a / "out").string()});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out-dir", (b / "out").string()});
  ASSERT_EQ(cli(args_a).code, kExitOk);
  ASSERT_EQ(cli(args_b).code, kExitOk);
  for (const char* f : {"manifest.json", "raw.csv", "report.csv", "slopes.json"}) {
    EXPECT_TRUE(fs::exists(a / "out" / f)) << f;
  }
  EXPECT_EQ(strip_csv(slurp(a / "out" / "raw.csv"), "wallclock_ms"), strip_csv(slurp(b / "out" / "raw.csv"), "wallclock_ms"));
  EXPECT_EQ(strip_csv(slurp(a / "out" / "report.csv"), "wallclock_ms"),
            strip_csv(slurp(b / "out" / "report.csv"), "wallclock_ms"));
  auto sa = nlohmann::json::parse(slurp(a / "out" / "slopes.json"));
  auto sb = nlohmann::json::parse(slurp(b / "out" / "slopes.json"));
  EXPECT_EQ(sa["manifest"]["input_hash"], sb["manifest"]["input_hash"]);
  sa.erase("manifest");
  sb.erase("manifest");
  EXPECT_EQ(sa, sb);
}

TEST(Cli, DecayBenchWritesCsv) {
  TempDir dir;
  const CliRun r = cli({"decaybench", "--families", "poly", "--n-list", "20", "--repeats", "1", "--out",
                     (dir / "d.csv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(dir / "d.csv");
  const CsvTable t = read_csv(in);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.text(0, "family"), "poly");
  EXPECT_LE(t.number(0, "eps_uv_mean"), 1e-4);
}

TEST(Cli, VerifyFastPasses) {
  const CliRun r = cli({"verify", "--level", "fast", "--seed", "4"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_NE(r.out.find("checks passed"), std::string::npos);
}
