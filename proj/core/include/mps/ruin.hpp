#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mps/conditions.hpp"
#include "mps/model.hpp"

namespace mps {

enum class CountProcess { OnePerPeriod, Poisson };

// Discrete-time surplus process P_{t_n} = u + c t_n - (claims up to t_n).
// Claims are `shift + X_k` with X_k drawn from a centered claim model; the
// nonnegative shift carries the claim mean.
struct SurplusModel {
  double initial_capital = 0.0;  // u
  double premium_rate = 0.0;     // c
  double period_length = 1.0;    // t_0
  SequenceModel claims;
  double claim_shift = 0.0;
  CountProcess count = CountProcess::OnePerPeriod;
  double lambda = 1.0;  // Poisson claim rate per unit time
};

void validate(const SurplusModel& model);

// Surplus values (P_{t_1}, ..., P_{t_N}) for one replicate.
std::vector<double> simulate_surplus(const SurplusModel& model, std::int64_t horizon,
                                     std::uint64_t seed, std::uint64_t replicate = 0);

// First period index with P < 0, or nullopt when the path stays nonnegative.
std::optional<std::int64_t> ruin_time(const std::vector<double>& path);

enum class RuinMethod { ExactSim, BrownianApprox };

struct RuinEstimate {
  double probability = 0.0;
  double stderr_value = 0.0;
  std::size_t replicates = 0;
  RuinMethod method = RuinMethod::ExactSim;
  bool claims_centered_internally = false;  // recorded for the Brownian surrogate
};

// Fraction of replicates ruined on {1, ..., horizon}. The Brownian surrogate
// replaces the centered claim sum by s_n W(a(t)) (scaling function validated
// by the conditions module) and carries the claim mean as deterministic drift.
RuinEstimate ruin_probability(const SurplusModel& model, std::int64_t horizon,
                              std::size_t replicates, std::uint64_t seed, RuinMethod method);

}  // namespace mps
