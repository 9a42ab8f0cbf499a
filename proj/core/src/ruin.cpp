#include "mps/ruin.hpp"

#include <cmath>

#include "mps/errors.hpp"
#include "mps/rng.hpp"
#include "mps/sums.hpp"

namespace mps {

void validate(const SurplusModel& model) {
  validate(model.claims);
  if (model.initial_capital < 0.0) throw SchemaError("u: must be >= 0");
  if (model.premium_rate < 0.0) throw SchemaError("c: must be >= 0");
  if (!(model.period_length > 0.0)) throw SchemaError("t0: must be > 0");
  if (model.claim_shift < 0.0) throw SchemaError("claim_shift: must be >= 0");
  if (model.count == CountProcess::Poisson) {
    if (!(model.lambda > 0.0)) throw SchemaError("lambda: must be > 0");
    if (model.claims.kind != ModelKind::Independent)
      throw SchemaError("count: poisson mode needs an independent claim model");
    if (model.claims.marginal.variance.kind != VarianceRuleKind::Constant)
      throw SchemaError("count: poisson mode needs a constant claim variance rule");
  }
}

namespace {

// Sequential claim draw for the Poisson mode; claim k follows the marginal
// variance rule at index k.
double draw_claim(const SequenceModel& claims, std::int64_t k, RandomStream& stream) {
  const double sigma2 = claims.marginal.variance.at(k);
  switch (claims.marginal.family) {
    case Family::Normal:
      return std::sqrt(sigma2) * stream.normal();
    case Family::Rademacher:
      return std::sqrt(sigma2) * stream.sign();
    case Family::Uniform:
      return std::sqrt(3.0 * sigma2) * (2.0 * stream.uniform01() - 1.0);
    case Family::Cauchy:
      return std::tan(3.1415926535897932384626433832795 * (stream.uniform01() - 0.5));
  }
  return 0.0;
}

}  // namespace

std::vector<double> simulate_surplus(const SurplusModel& model, std::int64_t horizon,
                                     std::uint64_t seed, std::uint64_t replicate) {
  if (horizon < 1) throw PreconditionError("simulate_surplus: horizon must be >= 1");
  validate(model);
  std::vector<double> surplus;
  surplus.reserve(static_cast<std::size_t>(horizon));
  double claims_total = 0.0;
  if (model.count == CountProcess::OnePerPeriod) {
    const SamplePath path = gen_path(model.claims, 0, horizon, seed, replicate);
    for (std::int64_t j = 1; j <= horizon; ++j) {
      claims_total += model.claim_shift + path.at(j);
      surplus.push_back(model.initial_capital +
                        model.premium_rate * static_cast<double>(j) * model.period_length -
                        claims_total);
    }
  } else {
    RandomStream stream(seed, replicate);
    std::int64_t claim_index = 0;
    for (std::int64_t j = 1; j <= horizon; ++j) {
      const std::uint64_t count = stream.poisson(model.lambda * model.period_length);
      for (std::uint64_t i = 0; i < count; ++i)
        claims_total += model.claim_shift + draw_claim(model.claims, ++claim_index, stream);
      surplus.push_back(model.initial_capital +
                        model.premium_rate * static_cast<double>(j) * model.period_length -
                        claims_total);
    }
  }
  return surplus;
}

std::optional<std::int64_t> ruin_time(const std::vector<double>& path) {
  for (std::size_t i = 0; i < path.size(); ++i)
    if (path[i] < 0.0) return static_cast<std::int64_t>(i) + 1;
  return std::nullopt;
}

namespace {

bool brownian_replicate_ruined(const SurplusModel& model, std::int64_t horizon,
                               const std::vector<double>& var_increment, std::uint64_t seed,
                               std::uint64_t replicate) {
  // stream id 1 keeps the surrogate independent of the exact-sim draws
  RandomStream stream(seed, replicate, 1);
  const double mean_claims_per_period =
      model.count == CountProcess::OnePerPeriod
          ? model.claim_shift
          : model.lambda * model.period_length * model.claim_shift;
  double brownian = 0.0;
  for (std::int64_t j = 1; j <= horizon; ++j) {
    brownian += std::sqrt(var_increment[static_cast<std::size_t>(j - 1)]) * stream.normal();
    const double surplus = model.initial_capital +
                           model.premium_rate * static_cast<double>(j) * model.period_length -
                           mean_claims_per_period * static_cast<double>(j) - brownian;
    if (surplus < 0.0) return true;
  }
  return false;
}

}  // namespace

RuinEstimate ruin_probability(const SurplusModel& model, std::int64_t horizon,
                              std::size_t replicates, std::uint64_t seed, RuinMethod method) {
  if (replicates < 100) throw PreconditionError("ruin_probability: needs R >= 100");
  validate(model);
  std::size_t ruined = 0;
  if (method == RuinMethod::ExactSim) {
    for (std::size_t r = 0; r < replicates; ++r)
      if (ruin_time(simulate_surplus(model, horizon, seed, r))) ++ruined;
  } else {
    // per-period variance increments of the centered claim sum
    std::vector<double> var_increment(static_cast<std::size_t>(horizon));
    if (model.count == CountProcess::OnePerPeriod) {
      double prev = 0.0;
      for (std::int64_t j = 1; j <= horizon; ++j) {
        const double s2 = window_variance(model.claims, {0, j});
        var_increment[static_cast<std::size_t>(j - 1)] = std::max(s2 - prev, 0.0);
        prev = s2;
      }
    } else {
      const double second_moment =
          model.claims.marginal.variance.at(1) + model.claim_shift * model.claim_shift;
      const double per_period = model.lambda * model.period_length * second_moment;
      for (auto& v : var_increment) v = per_period;
    }
    for (std::size_t r = 0; r < replicates; ++r)
      if (brownian_replicate_ruined(model, horizon, var_increment, seed, r)) ++ruined;
  }
  RuinEstimate estimate;
  estimate.replicates = replicates;
  estimate.method = method;
  estimate.claims_centered_internally = method == RuinMethod::BrownianApprox;
  const double count = static_cast<double>(replicates);
  estimate.probability = static_cast<double>(ruined) / count;
  estimate.stderr_value =
      std::sqrt(estimate.probability * (1.0 - estimate.probability) / count);
  return estimate;
}

}  // namespace mps
