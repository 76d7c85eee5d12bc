#pragma once

// Shared plumbing for the bench commands: run manifests, small statistics,
// slope fitting and CSV helpers.

#include <gdsvd/linalg.hpp>

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gdsvd::bench {

struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::string timestamp;
  std::string version;
  std::string input_hash;

  nlohmann::ordered_json to_json() const;
};

/// argv joined with single spaces; timestamp and version filled in.
RunManifest make_manifest(const std::vector<std::string>& argv, nlohmann::ordered_json config, std::uint64_t seed,
                          std::string input_hash);

/// ISO 8601 UTC, second resolution.
std::string utc_timestamp();

/// 64-bit FNV-1a over the row-major entries, as 16 hex digits.
std::string matrix_hash(const Matrix& m);
std::string matrix_hash(const RowMatrix& m);
std::string string_hash(const std::string& s);

/// "# manifest {...}" comment line; CSV readers skip lines starting with '#'.
void write_manifest_comment(std::ostream& out, const RunManifest& m);

double mean(const std::vector<double>& v);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(const std::vector<double>& v);
double median(std::vector<double> v);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope * x + intercept; empty with fewer than two
/// distinct x values.
std::optional<LineFit> fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Parsed CSV with a header row. Comment lines ('#') and blank lines skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
std::vector<std::string> split(const std::string& s, char sep);

/// Runs body(0..count-1) on up to `jobs` threads. Exceptions are rethrown
/// (the first one by index) after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);
unsigned default_jobs();

}  // namespace gdsvd::bench
