#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bdc/types.hpp"

namespace bdc {

/// Deterministic random stream. The engine is mt19937_64, whose output
/// sequence is fixed by the standard; the uniform, normal and integer
/// transforms are implemented here rather than taken from <random> so that
/// identical seeds give identical draws on every standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Independent child stream; the same (seed, stream) pair always yields the
  /// same child.
  RngStream split(std::uint64_t stream) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound);
  double normal();

  Matrix normal_matrix(Index rows, Index cols, double stddev = 1.0);

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<Index> permutation(Index n);
  /// First k entries of a seeded permutation: k distinct indices from [0, n).
  std::vector<Index> sample_without_replacement(Index n, Index k);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bdc
