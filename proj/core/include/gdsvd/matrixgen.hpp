#pragma once

// Synthetic PSD instances M = U diag(sigma) U^T with a random orthonormal
// frame U, for the rank-1, rank-2 gap and rank-floor(log2 n) decay families.

#include "gdsvd/linalg.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gdsvd {

enum class Family { Rank1, Rank2Gap, ExpDecay, PolyDecay, LinDecay, Explicit };

std::string_view to_string(Family f) noexcept;
/// Accepts rank1, rank2, exp, poly, lin, explicit (plus a few long spellings).
Family parse_family(std::string_view name);

struct GeneratorSpec {
  Index n = 2;
  Family family = Family::Rank1;
  double gap = 0.1;            // Rank2Gap: sigma = (1, 1 - gap)
  std::vector<double> sigma;   // Rank1 (one value, default 1) and Explicit
  std::uint64_t seed = 0;
};

struct GeneratedMatrix {
  DenseSymMatrix matrix;
  Spectrum truth;
};

/// Throws std::invalid_argument for invalid combinations (n < 2, gap outside
/// (0, 1), non-positive or unsorted explicit values, rank above n, ...).
GeneratedMatrix generate(const GeneratorSpec& spec);

/// Parses "family:key=value,..." e.g. "rank2:n=100,gap=0.1,seed=3" or
/// "explicit:n=10,sigma=3;2;1".
GeneratorSpec parse_generator(std::string_view text);
std::string format_generator(const GeneratorSpec& spec);

/// floor(log2 n), the rank used by the decay families.
Index decay_rank(Index n);

/// Engine behind generate(); seeded through a tagged seed_seq, so its stream
/// differs from mt19937_64(seed) used for solver initialization.
std::mt19937_64 generator_engine(std::uint64_t seed);

/// Nonzero spectrum of the family, drawing any random parameters from `gen`.
std::vector<double> family_values(const GeneratorSpec& spec, std::mt19937_64& gen);

/// n x d frame with orthonormal columns: Q of a Gaussian matrix's QR, with
/// column signs fixed so that diag(R) > 0.
Matrix random_frame(Index n, Index d, std::mt19937_64& gen);

/// {10^(-k/4) : k = 1..20}
std::vector<double> gap_sweep_preset();
/// {10^(-k/4) : k = kmin..kmax}
std::vector<double> gap_grid(int kmin, int kmax);

}  // namespace gdsvd
