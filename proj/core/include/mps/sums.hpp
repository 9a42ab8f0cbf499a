#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mps/model.hpp"

namespace mps {

// A moving window: the pair (p(n), n). S'_n = X_{p+1} + ... + X_{p+n}.
struct Window {
  std::int64_t p = 0;
  std::int64_t n = 0;
};

// Block decomposition n = m*ell + r with 0 <= r < ell.
struct BlockScheme {
  std::int64_t ell = 1;
  std::int64_t m = 0;
  std::int64_t r = 0;
};

// Normalized block sums Y_j = (S'_{j ell} - S'_{(j-1) ell}) / sqrt(ell),
// plus the retained remainder segment sum.
struct BlockIncrements {
  std::vector<double> values;
  double remainder_sum = 0.0;
};

// Exact moving sum over the window; n = 0 returns 0.
double moving_sum(const SamplePath& path, const Window& window);

// Default block rule ell = floor(n^{1/3}) (satisfies ell/n -> 0 with m -> inf).
BlockScheme make_block_scheme(std::int64_t n);
BlockScheme make_block_scheme(std::int64_t n, std::int64_t ell);

BlockIncrements block_increments(const SamplePath& path, const Window& window,
                                 const BlockScheme& scheme);

// Exact s'^2_n: the covariance double sum over the window (O(n) fast paths
// for every built-in covariance rule).
double window_variance(const SequenceModel& model, const Window& window);

struct MonteCarloVariance {
  double value = 0.0;
  double stderr_value = 0.0;
  std::size_t replicates = 0;
};

// Unbiased sample variance of S'_n over R replicates; standard error from the
// empirical fourth moment.
MonteCarloVariance window_variance_mc(const SequenceModel& model, const Window& window,
                                      std::size_t replicates, std::uint64_t seed);

// Exact variance tau'^2_j of block j (1-based) inside the window.
double block_variance(const SequenceModel& model, const Window& window,
                      const BlockScheme& scheme, std::int64_t j);

// Exact variance of the remainder segment (the last r window values).
double remainder_variance(const SequenceModel& model, const Window& window,
                          const BlockScheme& scheme);

}  // namespace mps
