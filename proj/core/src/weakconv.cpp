#include "mps/weakconv.hpp"

#include <algorithm>
#include <cmath>

#include "mps/errors.hpp"
#include "mps/parallel.hpp"
#include "mps/stats.hpp"

namespace mps {

ReplicateEnsemble mc_normalized_sums(const SequenceModel& model, const Window& window,
                                     std::size_t replicates, std::uint64_t seed,
                                     unsigned threads) {
  if (replicates < 2) throw PreconditionError("mc_normalized_sums: needs R >= 2");
  const double s2 = window_variance(model, window);
  if (s2 <= 0.0) throw PreconditionError("mc_normalized_sums: window variance is zero");
  const double s = std::sqrt(s2);
  ReplicateEnsemble ensemble;
  ensemble.replicates = replicates;
  ensemble.dim = 1;
  ensemble.data.resize(replicates);
  ensemble.provenance = model.id + " S'_n/s'_n p=" + std::to_string(window.p) +
                        " n=" + std::to_string(window.n);
  ensemble.seed = seed;
  parallel_for(replicates, threads, [&](std::size_t r) {
    const SamplePath path = gen_path(model, window.p, window.n, seed, r);
    ensemble.data[r] = moving_sum(path, window) / s;
  });
  return ensemble;
}

namespace {

std::vector<double> sorted_scalar(const ReplicateEnsemble& ensemble) {
  if (ensemble.replicates == 0) throw PreconditionError("empty ensemble");
  if (ensemble.dim != 1) throw PreconditionError("scalar ensemble required");
  std::vector<double> sorted(ensemble.data);
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

}  // namespace

double ks_to_normal(const ReplicateEnsemble& ensemble) {
  const auto sorted = sorted_scalar(ensemble);
  const double count = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = normal_cdf(sorted[i]);
    sup = std::max(sup, (static_cast<double>(i) + 1.0) / count - u);
    sup = std::max(sup, u - static_cast<double>(i) / count);
  }
  return sup;
}

double cvm_to_normal(const ReplicateEnsemble& ensemble) {
  const auto sorted = sorted_scalar(ensemble);
  const double count = static_cast<double>(sorted.size());
  double w2 = 1.0 / (12.0 * count);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = normal_cdf(sorted[i]);
    const double d = u - (2.0 * static_cast<double>(i) + 1.0) / (2.0 * count);
    w2 += d * d;
  }
  return w2;
}

CharFunctionEstimate ecf(const ReplicateEnsemble& ensemble,
                         const std::vector<std::vector<double>>& points) {
  if (ensemble.replicates == 0) throw PreconditionError("ecf: empty ensemble");
  CharFunctionEstimate estimate;
  estimate.replicates = ensemble.replicates;
  estimate.points = points;
  estimate.values.reserve(points.size());
  for (const auto& t : points) {
    if (t.size() != ensemble.dim) throw PreconditionError("ecf: point dimension mismatch");
    std::complex<double> sum(0.0, 0.0);
    for (std::size_t r = 0; r < ensemble.replicates; ++r) {
      double phase = 0.0;
      for (std::size_t c = 0; c < ensemble.dim; ++c) phase += t[c] * ensemble.at(r, c);
      sum += std::complex<double>(std::cos(phase), std::sin(phase));
    }
    estimate.values.push_back(sum / static_cast<double>(ensemble.replicates));
  }
  return estimate;
}

namespace {

// Closed-form Gaussian cf gap |exp(-t'St/2) - prod exp(-t_j^2 S_jj / 2)|.
double gaussian_cf_gap(const SequenceModel& model, const std::vector<double>& t) {
  double quad = 0.0, diag = 0.0;
  const auto k = static_cast<std::int64_t>(t.size());
  for (std::int64_t j = 1; j <= k; ++j)
    for (std::int64_t h = 1; h <= k; ++h)
      quad += t[static_cast<std::size_t>(j - 1)] * t[static_cast<std::size_t>(h - 1)] *
              covariance_at(model, j, h);
  for (std::int64_t j = 1; j <= k; ++j)
    diag += t[static_cast<std::size_t>(j - 1)] * t[static_cast<std::size_t>(j - 1)] *
            variance_at(model, j);
  return std::fabs(std::exp(-0.5 * quad) - std::exp(-0.5 * diag));
}

}  // namespace

NewmanReport newman_verify(const SequenceModel& model, std::size_t k,
                           const std::vector<std::vector<double>>& points,
                           std::size_t replicates, std::uint64_t seed, unsigned threads) {
  const auto certificate = certify_association(model);
  if (!certificate.certified)
    throw PreconditionError("newman_verify: model not certified associated (" +
                            certificate.reason + ")");
  if (k < 1) throw PreconditionError("newman_verify: k must be >= 1");
  if (replicates < 2) throw PreconditionError("newman_verify: needs R >= 2");

  ReplicateEnsemble ensemble;
  ensemble.replicates = replicates;
  ensemble.dim = k;
  ensemble.data.resize(replicates * k);
  ensemble.provenance = model.id + " joint(X_1..X_k)";
  ensemble.seed = seed;
  parallel_for(replicates, threads, [&](std::size_t r) {
    const SamplePath path = gen_path(model, 0, static_cast<std::int64_t>(k), seed, r);
    for (std::size_t c = 0; c < k; ++c) ensemble.data[r * k + c] = path.values[c];
  });

  NewmanReport report;
  report.replicates = replicates;
  report.seed = seed;
  report.slack = 6.0 / std::sqrt(static_cast<double>(replicates));
  const bool gaussian = is_gaussian(model);

  for (const auto& t : points) {
    if (t.size() != k) throw PreconditionError("newman_verify: point dimension mismatch");
    NewmanPointCheck check;
    check.point = t;
    // joint and marginal cf estimates from the one shared ensemble
    const auto joint = ecf(ensemble, {t});
    std::complex<double> product(1.0, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      std::complex<double> sum(0.0, 0.0);
      for (std::size_t r = 0; r < replicates; ++r) {
        const double phase = t[j] * ensemble.at(r, j);
        sum += std::complex<double>(std::cos(phase), std::sin(phase));
      }
      product *= sum / static_cast<double>(replicates);
    }
    check.gap = std::abs(joint.values.front() - product);
    double bound = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t h = 0; h < k; ++h) {
        if (j == h) continue;
        bound += std::fabs(t[j] * t[h]) *
                 covariance_at(model, static_cast<std::int64_t>(j) + 1,
                               static_cast<std::int64_t>(h) + 1);
      }
    check.bound = 0.5 * bound;
    if (gaussian) check.exact_gap = gaussian_cf_gap(model, t);
    check.holds = check.gap <= check.bound + report.slack;
    report.all_hold = report.all_hold && check.holds;
    report.checks.push_back(std::move(check));
  }
  return report;
}

ReplicateEnsemble fdd_ensemble(const SequenceModel& model, std::int64_t n,
                               const std::vector<double>& grid, std::size_t replicates,
                               std::uint64_t seed, unsigned threads) {
  if (grid.empty()) throw PreconditionError("fdd_ensemble: empty grid");
  double prev = 0.0;
  for (double t : grid) {
    if (t <= prev || t > 1.0)
      throw PreconditionError("fdd_ensemble: grid must be strictly increasing in (0,1]");
    prev = t;
  }
  if (static_cast<double>(n) * grid.front() < 1.0)
    throw PreconditionError("fdd_ensemble: n t_1 must be >= 1");
  if (replicates < 2) throw PreconditionError("fdd_ensemble: needs R >= 2");
  const double s2 = window_variance(model, {0, n});
  if (s2 <= 0.0) throw PreconditionError("fdd_ensemble: s^2_n is zero");
  const double s = std::sqrt(s2);
  std::vector<std::int64_t> cut;
  cut.reserve(grid.size());
  for (double t : grid) cut.push_back(static_cast<std::int64_t>(static_cast<double>(n) * t));

  ReplicateEnsemble ensemble;
  ensemble.replicates = replicates;
  ensemble.dim = grid.size();
  ensemble.grid = grid;
  ensemble.data.resize(replicates * grid.size());
  ensemble.provenance = model.id + " Y_n(t) n=" + std::to_string(n);
  ensemble.seed = seed;
  parallel_for(replicates, threads, [&](std::size_t r) {
    const SamplePath path = gen_path(model, 0, n, seed, r);
    double running = 0.0;
    std::int64_t k = 0;
    for (std::size_t c = 0; c < cut.size(); ++c) {
      while (k < cut[c]) running += path.values[static_cast<std::size_t>(k++)];
      ensemble.data[r * cut.size() + c] = running / s;
    }
  });
  return ensemble;
}

FddCovarianceReport fdd_covariance_check(const ReplicateEnsemble& ensemble,
                                         const ScalingFunction& a) {
  if (ensemble.grid.size() != ensemble.dim)
    throw PreconditionError("fdd_covariance_check: ensemble carries no time grid");
  const std::size_t k = ensemble.dim;
  const double count = static_cast<double>(ensemble.replicates);
  std::vector<double> mean(k, 0.0);
  for (std::size_t r = 0; r < ensemble.replicates; ++r)
    for (std::size_t c = 0; c < k; ++c) mean[c] += ensemble.at(r, c);
  for (auto& m : mean) m /= count;

  FddCovarianceReport report;
  report.empirical.assign(k, std::vector<double>(k, 0.0));
  report.target.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t r = 0; r < ensemble.replicates; ++r)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        report.empirical[i][j] += (ensemble.at(r, i) - mean[i]) * (ensemble.at(r, j) - mean[j]);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      report.empirical[i][j] /= count;
      report.target[i][j] = std::min(a.eval(ensemble.grid[i]), a.eval(ensemble.grid[j]));
      report.max_abs_deviation =
          std::max(report.max_abs_deviation, std::fabs(report.empirical[i][j] - report.target[i][j]));
    }
  return report;
}

double increment_decoupling_gap(const ReplicateEnsemble& ensemble,
                                const std::vector<double>& weights, double t) {
  const std::size_t k = ensemble.dim;
  if (weights.size() != k) throw PreconditionError("increment_decoupling_gap: weight dimension mismatch");
  if (k == 1) return 0.0;
  const double count = static_cast<double>(ensemble.replicates);
  std::complex<double> joint(0.0, 0.0);
  std::vector<std::complex<double>> marginal(k, {0.0, 0.0});
  for (std::size_t r = 0; r < ensemble.replicates; ++r) {
    double z_total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double increment = ensemble.at(r, c) - (c == 0 ? 0.0 : ensemble.at(r, c - 1));
      z_total += weights[c] * increment;
      const double phase = t * weights[c] * increment;
      marginal[c] += std::complex<double>(std::cos(phase), std::sin(phase));
    }
    joint += std::complex<double>(std::cos(t * z_total), std::sin(t * z_total));
  }
  std::complex<double> product(1.0, 0.0);
  for (auto& m : marginal) product *= m / count;
  return std::abs(joint / count - product);
}

double increment_newman_bound(const SequenceModel& model, std::int64_t n,
                              const std::vector<double>& grid,
                              const std::vector<double>& weights, double t) {
  if (weights.size() != grid.size())
    throw PreconditionError("increment_newman_bound: weight dimension mismatch");
  const double s2 = window_variance(model, {0, n});
  if (s2 <= 0.0) throw PreconditionError("increment_newman_bound: s^2_n is zero");
  std::vector<std::int64_t> cut{0};
  for (double g : grid) cut.push_back(static_cast<std::int64_t>(static_cast<double>(n) * g));
  double bound = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (std::size_t h = 0; h < grid.size(); ++h) {
      if (j == h) continue;
      const double cov = segment_covariance(model, cut[j] + 1, cut[j + 1], cut[h] + 1, cut[h + 1]);
      bound += std::fabs(weights[j] * weights[h]) * cov / s2;
    }
  return 0.5 * t * t * bound;
}

}  // namespace mps
