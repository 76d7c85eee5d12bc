#pragma once

// JSON results and CSV traces. Doubles are printed with 17 significant digits
// so outputs round-trip exactly.

#include "gdsvd/ksvd.hpp"
#include "gdsvd/linalg.hpp"
#include "gdsvd/rank1.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace gdsvd {

std::string format_double(double v);

/// {method, converged, pairs:[{sigma,u:[...]}], iterations:[...], matvecs}
std::string to_json(const KsvdResult& r, int indent = -1);
/// As above plus strategy, and v / right_skipped per pair.
std::string to_json(const AsymResult& r, int indent = -1);
/// {values:[...], vectors:[[...], ...]} with one inner array per vector.
std::string to_json(const Spectrum& s, int indent = -1);
Spectrum spectrum_from_json(const std::string& text);

struct TraceRow {
  std::size_t pair = 0;
  TraceRecord record;
};

inline constexpr const char* kTraceHeader = "pair,t,norm_x,cos_theta1,heron_eps,grad_norm,eps_u,eps_sigma";

/// One row per record; absent optional fields are left empty.
void write_trace_csv(std::ostream& out, const std::vector<std::vector<TraceRecord>>& traces);
/// Lines starting with '#' are skipped. Throws std::runtime_error on bad input.
std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace gdsvd
