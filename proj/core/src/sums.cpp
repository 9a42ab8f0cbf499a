#include "mps/sums.hpp"

#include <cmath>

#include "mps/errors.hpp"

namespace mps {

double moving_sum(const SamplePath& path, const Window& window) {
  if (window.p < 0 || window.n < 0) throw PreconditionError("moving_sum: invalid window");
  if (window.n == 0) return 0.0;
  if (window.p + 1 < path.first || window.p + window.n > path.last())
    throw PreconditionError("moving_sum: window exceeds path extent");
  double sum = 0.0;
  for (std::int64_t k = window.p + 1; k <= window.p + window.n; ++k) sum += path.at(k);
  return sum;
}

BlockScheme make_block_scheme(std::int64_t n) {
  if (n < 1) throw PreconditionError("make_block_scheme: n must be >= 1");
  const auto ell = static_cast<std::int64_t>(std::cbrt(static_cast<double>(n)));
  return make_block_scheme(n, ell < 1 ? 1 : ell);
}

BlockScheme make_block_scheme(std::int64_t n, std::int64_t ell) {
  if (n < 1) throw PreconditionError("make_block_scheme: n must be >= 1");
  if (ell < 1 || ell > n) throw PreconditionError("make_block_scheme: block rule must yield 1 <= ell <= n");
  BlockScheme scheme;
  scheme.ell = ell;
  scheme.m = n / ell;
  scheme.r = n - scheme.m * ell;
  return scheme;
}

BlockIncrements block_increments(const SamplePath& path, const Window& window,
                                 const BlockScheme& scheme) {
  if (scheme.m * scheme.ell + scheme.r != window.n)
    throw PreconditionError("block_increments: scheme inconsistent with window length");
  BlockIncrements out;
  out.values.reserve(static_cast<std::size_t>(scheme.m));
  const double root = std::sqrt(static_cast<double>(scheme.ell));
  for (std::int64_t j = 1; j <= scheme.m; ++j) {
    Window block{window.p + (j - 1) * scheme.ell, scheme.ell};
    out.values.push_back(moving_sum(path, block) / root);
  }
  Window tail{window.p + scheme.m * scheme.ell, scheme.r};
  out.remainder_sum = moving_sum(path, tail);
  return out;
}

double window_variance(const SequenceModel& model, const Window& window) {
  if (window.p < 0 || window.n < 0) throw PreconditionError("window_variance: invalid window");
  if (window.n == 0) return 0.0;
  const std::int64_t a = window.p + 1, b = window.p + window.n;
  return segment_covariance(model, a, b, a, b);
}

MonteCarloVariance window_variance_mc(const SequenceModel& model, const Window& window,
                                      std::size_t replicates, std::uint64_t seed) {
  if (replicates < 2) throw PreconditionError("window_variance_mc: needs R >= 2");
  std::vector<double> sums(replicates);
  double mean = 0.0;
  for (std::size_t r = 0; r < replicates; ++r) {
    const SamplePath path = gen_path(model, window.p, window.n, seed, r);
    sums[r] = moving_sum(path, window);
    mean += sums[r];
  }
  mean /= static_cast<double>(replicates);
  double m2 = 0.0, m4 = 0.0;
  for (double s : sums) {
    const double d = s - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(replicates);
  MonteCarloVariance out;
  out.replicates = replicates;
  out.value = m2 / (n - 1.0);
  // Var(s^2) ~ (m4 - m2^2) / R for the biased moments
  const double b2 = m2 / n, b4 = m4 / n;
  out.stderr_value = std::sqrt(std::max(b4 - b2 * b2, 0.0) / n);
  return out;
}

double block_variance(const SequenceModel& model, const Window& window,
                      const BlockScheme& scheme, std::int64_t j) {
  if (j < 1 || j > scheme.m) throw PreconditionError("block_variance: block index out of range");
  const std::int64_t a = window.p + (j - 1) * scheme.ell + 1;
  const std::int64_t b = window.p + j * scheme.ell;
  return segment_covariance(model, a, b, a, b);
}

double remainder_variance(const SequenceModel& model, const Window& window,
                          const BlockScheme& scheme) {
  if (scheme.r == 0) return 0.0;
  const std::int64_t a = window.p + scheme.m * scheme.ell + 1;
  const std::int64_t b = window.p + window.n;
  return segment_covariance(model, a, b, a, b);
}

}  // namespace mps
