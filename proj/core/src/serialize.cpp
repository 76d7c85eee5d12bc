#include "gdsvd/serialize.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gdsvd {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json vec_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

std::string to_json(const KsvdResult& r, int indent) {
  json j;
  j["method"] = std::string(to_string(r.method));
  j["converged"] = r.converged;
  json pairs = json::array();
  for (const EigenPair& p : r.pairs) pairs.push_back({{"sigma", p.value}, {"u", vec_json(p.vector)}});
  j["pairs"] = std::move(pairs);
  j["iterations"] = r.per_pair_iterations;
  j["matvecs"] = r.total_matvecs;
  if (!r.gap_violations.empty()) j["gap_violations"] = r.gap_violations;
  return j.dump(indent);
}

std::string to_json(const AsymResult& r, int indent) {
  json j;
  j["method"] = std::string(to_string(r.method));
  j["strategy"] = std::string(to_string(r.strategy));
  j["converged"] = r.converged;
  json pairs = json::array();
  for (std::size_t i = 0; i < r.sigma.size(); ++i) {
    json p = {{"sigma", r.sigma[i]}, {"u", vec_json(r.u[i])}};
    p["v"] = r.right_skipped[i] ? json(nullptr) : vec_json(r.v[i]);
    p["right_skipped"] = static_cast<bool>(r.right_skipped[i]);
    pairs.push_back(std::move(p));
  }
  j["pairs"] = std::move(pairs);
  j["iterations"] = r.per_pair_iterations;
  j["matvecs"] = r.total_matvecs;
  return j.dump(indent);
}

std::string to_json(const Spectrum& s, int indent) {
  json j;
  j["values"] = s.values;
  json vecs = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) vecs.push_back(vec_json(s.vector(i)));
  j["vectors"] = std::move(vecs);
  return j.dump(indent);
}

Spectrum spectrum_from_json(const std::string& text) {
  const json j = json::parse(text);
  Spectrum s;
  s.values = j.at("values").get<std::vector<double>>();
  const auto& vecs = j.at("vectors");
  if (vecs.size() != s.values.size()) throw std::runtime_error("spectrum json: values/vectors size mismatch");
  if (s.values.empty()) return s;
  const auto n = static_cast<Index>(vecs.at(0).size());
  s.vectors.resize(n, static_cast<Index>(s.values.size()));
  for (std::size_t c = 0; c < vecs.size(); ++c) {
    const auto col = vecs[c].get<std::vector<double>>();
    if (static_cast<Index>(col.size()) != n) throw std::runtime_error("spectrum json: ragged vectors");
    for (Index i = 0; i < n; ++i) s.vectors(i, static_cast<Index>(c)) = col[static_cast<std::size_t>(i)];
  }
  return s;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::optional<double> read_opt(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) throw std::runtime_error("trace csv: bad number '" + cell + "'");
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<std::vector<TraceRecord>>& traces) {
  out << kTraceHeader << '\n';
  for (std::size_t p = 0; p < traces.size(); ++p) {
    for (const TraceRecord& r : traces[p]) {
      out << p << ',' << r.t << ',' << format_double(r.norm_x) << ',' << opt(r.cos_theta1) << ','
          << opt(r.heron_eps) << ',' << opt(r.grad_norm) << ',' << opt(r.eps_u) << ',' << opt(r.eps_sigma)
          << '\n';
    }
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::vector<TraceRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kTraceHeader) throw std::runtime_error("trace csv: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 8) throw std::runtime_error("trace csv: expected 8 columns in '" + line + "'");
    TraceRow row;
    row.pair = std::stoul(cells[0]);
    row.record.t = std::stoll(cells[1]);
    row.record.norm_x = read_opt(cells[2]).value_or(0.0);
    row.record.cos_theta1 = read_opt(cells[3]);
    row.record.heron_eps = read_opt(cells[4]);
    row.record.grad_norm = read_opt(cells[5]);
    row.record.eps_u = read_opt(cells[6]);
    row.record.eps_sigma = read_opt(cells[7]);
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::runtime_error("trace csv: missing header");
  return rows;
}

}  // namespace gdsvd
