#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mps/conditions.hpp"
#include "mps/model.hpp"
#include "mps/sums.hpp"

namespace mps {

// R independent realizations of a scalar or k-vector statistic, stored
// row-major. Row r is produced from stream (seed, r), so the ensemble is
// identical for every worker count.
struct ReplicateEnsemble {
  std::size_t replicates = 0;
  std::size_t dim = 1;
  std::vector<double> data;  // replicates x dim
  std::vector<double> grid;  // fdd time grid, empty for scalar statistics
  std::string provenance;
  std::uint64_t seed = 0;

  double at(std::size_t row, std::size_t col) const { return data[row * dim + col]; }
};

struct CharFunctionEstimate {
  std::vector<std::vector<double>> points;
  std::vector<std::complex<double>> values;
  std::size_t replicates = 0;
};

// R draws of S'_n / s'_n (exact-mode normalization).
ReplicateEnsemble mc_normalized_sums(const SequenceModel& model, const Window& window,
                                     std::size_t replicates, std::uint64_t seed,
                                     unsigned threads = 1);

// Kolmogorov-Smirnov sup distance between the ensemble EDF and Phi.
double ks_to_normal(const ReplicateEnsemble& ensemble);

// Cramer-von Mises W^2 against Phi.
double cvm_to_normal(const ReplicateEnsemble& ensemble);

// Empirical characteristic function psi-hat(t) = mean of exp(i <t, row>).
// Points must have the ensemble's dimension.
CharFunctionEstimate ecf(const ReplicateEnsemble& ensemble,
                         const std::vector<std::vector<double>>& points);

struct NewmanPointCheck {
  std::vector<double> point;
  double gap = 0.0;    // | psi-hat_joint(t) - prod psi-hat_j(t_j) |
  double bound = 0.0;  // (1/2) sum_{j != h} |t_j t_h| Cov(X_j, X_h), exact
  double exact_gap = -1.0;  // closed-form gap for Gaussian models, else -1
  bool holds = false;  // gap <= bound + slack
};

struct NewmanReport {
  std::vector<NewmanPointCheck> checks;
  double slack = 0.0;  // 6/sqrt(R)
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  bool all_hold = true;
};

// Verifies the characteristic-function covariance bound on (X_1, ..., X_k)
// with one shared ensemble feeding the joint and marginal estimates. Requires
// a certified associated model.
NewmanReport newman_verify(const SequenceModel& model, std::size_t k,
                           const std::vector<std::vector<double>>& points,
                           std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

// R rows of (Y_n(t_1), ..., Y_n(t_k)), Y_n(t) = S_{[nt]} / s_n, one path per row.
ReplicateEnsemble fdd_ensemble(const SequenceModel& model, std::int64_t n,
                               const std::vector<double>& grid, std::size_t replicates,
                               std::uint64_t seed, unsigned threads = 1);

struct FddCovarianceReport {
  std::vector<std::vector<double>> empirical;
  std::vector<std::vector<double>> target;  // a(t_j) ^ a(t_h)
  double max_abs_deviation = 0.0;
};

// Empirical covariance of the fdd coordinates against a(t_j) ^ a(t_h).
FddCovarianceReport fdd_covariance_check(const ReplicateEnsemble& ensemble,
                                         const ScalingFunction& a);

// | psi-hat_{Z}(t) - prod_j psi-hat_{Z_j}(t u_j) | where Z_j are the row-wise
// grid increments and Z = sum u_j Z_j. Identically 0 for k = 1.
double increment_decoupling_gap(const ReplicateEnsemble& ensemble,
                                const std::vector<double>& weights, double t);

// Exact covariance bound matching increment_decoupling_gap:
// (1/2) sum_{j != h} |u_j u_h| t^2 Cov(Z_j, Z_h) from exact segment covariances.
double increment_newman_bound(const SequenceModel& model, std::int64_t n,
                              const std::vector<double>& grid,
                              const std::vector<double>& weights, double t);

}  // namespace mps
