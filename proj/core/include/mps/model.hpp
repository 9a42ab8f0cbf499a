#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mps {

// ---------------------------------------------------------------------------
// Sequence models
//
// Three generative laws for a centered sequence (X_k)_{k >= 1}:
//   independent    — independent marginals with a per-index variance rule
//   gaussian-assoc — centered Gaussian with nonnegative covariance rule
//                    (AR(1)-type phi^{|j-h|} v, or an explicit finite matrix)
//   ma-assoc       — nonnegative-coefficient moving average of independent
//                    centered innovations, X_k = sum_i a_i eps_{k-i}
// Innovations are indexed from 1; moving-average terms reaching index <= 0
// are dropped, so the first q values have reduced variance.
// ---------------------------------------------------------------------------

enum class ModelKind { Independent, GaussianAssoc, MaAssoc };

enum class Family { Normal, Rademacher, Uniform, Cauchy };

enum class VarianceRuleKind { Constant, Linear, Geometric };

// sigma^2_k as a function of k: constant scale, linear scale*k,
// or geometric scale*base^k.
struct VarianceRule {
  VarianceRuleKind kind = VarianceRuleKind::Constant;
  double scale = 1.0;
  double base = 1.0;

  double at(std::int64_t k) const;
};

struct Marginal {
  Family family = Family::Normal;
  VarianceRule variance;
  // Cauchy has no variance; it is admitted only as a flagged negative control.
  bool negative_control = false;
};

struct Ar1Covariance {
  double phi = 0.0;       // lag-one correlation, in [0,1) for association
  double variance = 1.0;  // stationary variance v; C(j,h) = v phi^{|j-h|}
};

// Explicit finite covariance section; indices outside its order are errors.
struct MatrixCovariance {
  std::vector<std::vector<double>> values;
};

struct SequenceModel {
  ModelKind kind = ModelKind::Independent;
  std::string id = "model";

  Marginal marginal;  // independent kind

  std::optional<Ar1Covariance> ar1;        // gaussian-assoc
  std::optional<MatrixCovariance> matrix;  // gaussian-assoc

  std::vector<double> coefficients;  // ma-assoc weights a_0..a_q
  Family innovation_family = Family::Normal;
  double innovation_variance = 1.0;
};

// Throws SchemaError naming the offending field.
void validate(const SequenceModel& model);

// True when every finite section of the law is Gaussian (closed-form moments
// for sums apply).
bool is_gaussian(const SequenceModel& model);

// Largest index the model defines, or nullopt for infinite-horizon models.
std::optional<std::int64_t> horizon(const SequenceModel& model);

// ---------------------------------------------------------------------------
// Sample paths
// ---------------------------------------------------------------------------

struct SamplePath {
  std::int64_t first = 1;  // index of values.front(), i.e. p+1
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;

  std::int64_t last() const { return first + static_cast<std::int64_t>(values.size()) - 1; }
  double at(std::int64_t k) const;  // value of X_k; throws when out of range
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Exact marginal variance sigma^2_k (analytic, never sampled).
double variance_at(const SequenceModel& model, std::int64_t k);

// Exact Cov(X_j, X_h); symmetric; equals variance_at on the diagonal.
double covariance_at(const SequenceModel& model, std::int64_t j, std::int64_t h);

// Exact Cov( sum_{k=a1..a2} X_k , sum_{k=b1..b2} X_k ), inclusive ranges.
// Empty ranges (a1 > a2) contribute zero. O(n) for every built-in rule.
double segment_covariance(const SequenceModel& model, std::int64_t a1, std::int64_t a2,
                          std::int64_t b1, std::int64_t b2);

// Realization of (X_{p+1}, ..., X_{p+n}); pure in all arguments.
// Gaussian matrix sections are drawn through a lower-triangular factorization
// with one jittered retry (diagonal + 1e-12 * max diagonal).
SamplePath gen_path(const SequenceModel& model, std::int64_t p, std::int64_t n,
                    std::uint64_t seed, std::uint64_t replicate = 0);

struct AssociationCertificate {
  bool certified = false;
  std::string reason;
};

// Rule-based association certificate: independent families, Gaussian laws
// with nonnegative covariances, and nonnegative-coefficient moving averages.
// Anything else is "not certified", never a guess.
AssociationCertificate certify_association(const SequenceModel& model);

// A moment together with its Monte Carlo standard error (0 for analytic).
struct MomentValue {
  double value = 0.0;
  double stderr_value = 0.0;
  bool analytic = true;
};

// E|X_k|^r. Analytic for normal / rademacher / uniform marginals and for all
// Gaussian models; Monte Carlo (R draws) otherwise.
MomentValue abs_moment(const SequenceModel& model, std::int64_t k, double r,
                       std::size_t mc_replicates = 1000000, std::uint64_t seed = 1);

// E[X_k^2 1_{|X_k| >= a}] (strict = false) or with strict inequality.
MomentValue tail_second_moment(const SequenceModel& model, std::int64_t k, double a,
                               bool strict = false, std::size_t mc_replicates = 1000000,
                               std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Model description files (JSON-shaped)
// ---------------------------------------------------------------------------

SequenceModel parse_model(const std::string& text);
SequenceModel load_model(const std::filesystem::path& file);

}  // namespace mps
