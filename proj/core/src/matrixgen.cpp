#include "gdsvd/matrixgen.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gdsvd {

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::Rank1: return "rank1";
    case Family::Rank2Gap: return "rank2";
    case Family::ExpDecay: return "exp";
    case Family::PolyDecay: return "poly";
    case Family::LinDecay: return "lin";
    case Family::Explicit: return "explicit";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "rank1") return Family::Rank1;
  if (name == "rank2" || name == "rank2gap") return Family::Rank2Gap;
  if (name == "exp" || name == "expdecay") return Family::ExpDecay;
  if (name == "poly" || name == "polydecay") return Family::PolyDecay;
  if (name == "lin" || name == "lindecay") return Family::LinDecay;
  if (name == "explicit") return Family::Explicit;
  throw std::invalid_argument("unknown matrix family '" + std::string(name) + "'");
}

Index decay_rank(Index n) {
  if (n < 1) throw std::invalid_argument("decay_rank: n must be positive");
  return static_cast<Index>(std::bit_width(static_cast<std::uint64_t>(n))) - 1;
}

std::vector<double> family_values(const GeneratorSpec& spec, std::mt19937_64& gen) {
  if (spec.n < 2) throw std::invalid_argument("generate: n must be at least 2");
  switch (spec.family) {
    case Family::Rank1: {
      if (spec.sigma.size() > 1) throw std::invalid_argument("generate: rank1 takes a single sigma");
      const double s = spec.sigma.empty() ? 1.0 : spec.sigma.front();
      if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("generate: rank1 sigma must be positive");
      return {s};
    }
    case Family::Rank2Gap:
      if (!(spec.gap > 0.0 && spec.gap < 1.0)) throw std::invalid_argument("generate: rank2 gap must lie in (0, 1)");
      return {1.0, 1.0 - spec.gap};
    case Family::ExpDecay: {
      const Index d = decay_rank(spec.n);
      if (d < 1) throw std::invalid_argument("generate: decay families need floor(log2 n) >= 1");
      const double a = std::uniform_int_distribution<int>(2, 10)(gen);
      std::vector<double> v;
      for (Index i = 1; i <= d; ++i) v.push_back(std::pow(a, -static_cast<double>(i)));
      return v;
    }
    case Family::PolyDecay: {
      const Index d = decay_rank(spec.n);
      if (d < 1) throw std::invalid_argument("generate: decay families need floor(log2 n) >= 1");
      std::vector<double> v;
      for (Index i = 1; i <= d; ++i) v.push_back(1.0 / static_cast<double>(i) + 1.0);
      return v;
    }
    case Family::LinDecay: {
      const Index d = decay_rank(spec.n);
      if (d < 1) throw std::invalid_argument("generate: decay families need floor(log2 n) >= 1");
      std::uniform_int_distribution<int> pick_a(1, 10);
      std::uniform_real_distribution<double> pick_b(0.0, 1.0);
      // b = 0 would give a repeated top value; negative tails are resampled.
      for (;;) {
        const double a = pick_a(gen);
        const double b = pick_b(gen);
        if (b > 0.0 && a - b * static_cast<double>(d) > 0.0) {
          std::vector<double> v;
          for (Index i = 1; i <= d; ++i) v.push_back(a - b * static_cast<double>(i));
          return v;
        }
      }
    }
    case Family::Explicit: {
      if (spec.sigma.empty()) throw std::invalid_argument("generate: explicit family needs sigma values");
      for (std::size_t i = 0; i < spec.sigma.size(); ++i) {
        if (!(spec.sigma[i] > 0.0) || !std::isfinite(spec.sigma[i])) {
          throw std::invalid_argument("generate: explicit sigma values must be positive");
        }
        if (i > 0 && spec.sigma[i] > spec.sigma[i - 1]) {
          throw std::invalid_argument("generate: explicit sigma values must be non-increasing");
        }
      }
      return spec.sigma;
    }
  }
  throw std::invalid_argument("generate: unknown family");
}

Matrix random_frame(Index n, Index d, std::mt19937_64& gen) {
  if (d < 1 || d > n) throw std::invalid_argument("random_frame: need 1 <= d <= n");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = normal(gen);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, d);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

std::mt19937_64 generator_engine(std::uint64_t seed) {
  // Tagged so that a matrix and a solver sharing one seed value do not draw the
  // same Gaussian stream (the first frame column would equal the solver's z).
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x6d617472u, 0x6978u};
  return std::mt19937_64(seq);
}

GeneratedMatrix generate(const GeneratorSpec& spec) {
  std::mt19937_64 gen = generator_engine(spec.seed);
  std::vector<double> values = family_values(spec, gen);
  const Index d = static_cast<Index>(values.size());
  if (d > spec.n) throw std::invalid_argument("generate: rank exceeds n");
  Matrix u = random_frame(spec.n, d, gen);

  Eigen::Map<const Vector> s(values.data(), d);
  const Matrix m = u * s.asDiagonal() * u.transpose();
  Spectrum truth;
  truth.values = std::move(values);
  truth.vectors = std::move(u);
  return GeneratedMatrix{DenseSymMatrix::symmetrize(m), std::move(truth)};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  std::string buf(v);
  char* end = nullptr;
  const double d = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw std::invalid_argument("generator: bad number for '" + std::string(key) + "': '" + buf + "'");
  }
  return d;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("generator: bad integer for '" + std::string(key) + "': '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

GeneratorSpec parse_generator(std::string_view text) {
  GeneratorSpec spec;
  const auto colon = text.find(':');
  spec.family = parse_family(trim(text.substr(0, colon)));
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("generator: expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = trim(item.substr(0, eq));
    const std::string_view val = trim(item.substr(eq + 1));
    if (key == "n") {
      spec.n = to_int<Index>(key, val);
    } else if (key == "gap") {
      spec.gap = to_double(key, val);
    } else if (key == "seed") {
      spec.seed = to_int<std::uint64_t>(key, val);
    } else if (key == "sigma") {
      spec.sigma.clear();
      std::string_view list = val;
      while (!list.empty()) {
        const auto semi = list.find(';');
        spec.sigma.push_back(to_double(key, trim(list.substr(0, semi))));
        list = semi == std::string_view::npos ? std::string_view{} : list.substr(semi + 1);
      }
    } else {
      throw std::invalid_argument("generator: unknown key '" + std::string(key) + "'");
    }
  }
  return spec;
}

std::string format_generator(const GeneratorSpec& spec) {
  std::string out(to_string(spec.family));
  out += ":n=" + std::to_string(spec.n);
  char buf[64];
  if (spec.family == Family::Rank2Gap) {
    std::snprintf(buf, sizeof buf, "%.17g", spec.gap);
    out += ",gap=";
    out += buf;
  }
  if (!spec.sigma.empty()) {
    out += ",sigma=";
    for (std::size_t i = 0; i < spec.sigma.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", spec.sigma[i]);
      if (i > 0) out += ';';
      out += buf;
    }
  }
  out += ",seed=" + std::to_string(spec.seed);
  return out;
}

std::vector<double> gap_grid(int kmin, int kmax) {
  std::vector<double> out;
  for (int k = kmin; k <= kmax; ++k) out.push_back(std::pow(10.0, -static_cast<double>(k) / 4.0));
  return out;
}

std::vector<double> gap_sweep_preset() { return gap_grid(1, 20); }

}  // namespace gdsvd
