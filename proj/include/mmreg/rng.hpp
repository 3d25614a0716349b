#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mmreg/types.hpp"

namespace mmreg {

/// Seedable generator with a fully specified output stream.
///
/// The core engine is std::mt19937_64, whose raw 64-bit sequence is pinned
/// by the C++ standard, so identical seeds give identical streams on every
/// conforming implementation. All variate transforms are implemented here
/// (uniform doubles from the top 53 bits, normals by Marsaglia's polar
/// method, bounded integers by rejection) rather than through the standard
/// distributions, whose streams are implementation-defined.
///
/// Reference sequence: Rng(0).next() yields
///   2947667278772165694, 18301848765998365067, 729919693006235833, ...
/// which is the raw std::mt19937_64(0) output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Substream for (seed, index) pairs: the engine is seeded with a
  /// splitmix64 mix of the pair, so streams for distinct indices are
  /// decorrelated and independent of execution order.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  /// Raw 64-bit engine output.
  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via the polar method (uses only sqrt and log).
  double normal();

  /// Uniform integer in [0, n), unbiased by rejection.
  std::size_t below(std::size_t n);

  /// k distinct indices from [0, n) via a partial Fisher-Yates shuffle.
  std::vector<Index> sample_without_replacement(Index n, Index k);

  /// Fill a matrix with iid standard normals, row by row.
  void fill_normal(Matrix& m);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 step; used for substream seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mmreg
