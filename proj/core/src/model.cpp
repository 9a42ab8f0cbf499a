#include "mps/model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mps/errors.hpp"
#include "mps/rng.hpp"
#include "mps/stats.hpp"

#include <json.hpp>

namespace mps {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935274463415059;

double require_positive(double v, const char* field) {
  if (!(v > 0.0)) throw SchemaError(std::string(field) + ": must be > 0");
  return v;
}

}  // namespace

double VarianceRule::at(std::int64_t k) const {
  switch (kind) {
    case VarianceRuleKind::Constant:
      return scale;
    case VarianceRuleKind::Linear:
      return scale * static_cast<double>(k);
    case VarianceRuleKind::Geometric:
      return scale * std::pow(base, static_cast<double>(k));
  }
  return scale;
}

void validate(const SequenceModel& model) {
  switch (model.kind) {
    case ModelKind::Independent: {
      const auto& m = model.marginal;
      if (m.family == Family::Cauchy && !m.negative_control)
        throw SchemaError("marginal.family: cauchy has infinite variance and is only "
                          "admitted with negative_control = true");
      if (m.variance.scale < 0.0) throw SchemaError("marginal.variance.scale: must be >= 0");
      if (m.variance.kind == VarianceRuleKind::Geometric && m.variance.base <= 0.0)
        throw SchemaError("marginal.variance.base: must be > 0");
      break;
    }
    case ModelKind::GaussianAssoc: {
      if (model.ar1) {
        if (model.ar1->phi < 0.0 || model.ar1->phi >= 1.0)
          throw SchemaError("covariance.phi: must lie in [0,1)");
        require_positive(model.ar1->variance, "covariance.variance");
      } else if (model.matrix) {
        const auto& v = model.matrix->values;
        const std::size_t order = v.size();
        if (order == 0) throw SchemaError("covariance.values: empty matrix");
        // Negative entries are legal here; they only block the association
        // certificate, not the model itself.
        for (std::size_t i = 0; i < order; ++i) {
          if (v[i].size() != order) throw SchemaError("covariance.values: not square");
          for (std::size_t j = 0; j < order; ++j)
            if (v[i][j] != v[j][i]) throw SchemaError("covariance.values: not symmetric");
        }
      } else {
        throw SchemaError("covariance: gaussian-assoc needs an ar1 rule or a matrix");
      }
      break;
    }
    case ModelKind::MaAssoc: {
      if (model.coefficients.empty()) throw SchemaError("coefficients: empty");
      for (double a : model.coefficients)
        if (a < 0.0) throw SchemaError("coefficients: negative weight");
      if (model.innovation_family == Family::Cauchy)
        throw SchemaError("innovation.family: must have finite variance");
      require_positive(model.innovation_variance, "innovation.variance");
      break;
    }
  }
}

bool is_gaussian(const SequenceModel& model) {
  switch (model.kind) {
    case ModelKind::Independent:
      return model.marginal.family == Family::Normal;
    case ModelKind::GaussianAssoc:
      return true;
    case ModelKind::MaAssoc:
      return model.innovation_family == Family::Normal;
  }
  return false;
}

std::optional<std::int64_t> horizon(const SequenceModel& model) {
  if (model.kind == ModelKind::GaussianAssoc && model.matrix)
    return static_cast<std::int64_t>(model.matrix->values.size());
  return std::nullopt;
}

double SamplePath::at(std::int64_t k) const {
  if (k < first || k > last()) throw PreconditionError("path index out of range");
  return values[static_cast<std::size_t>(k - first)];
}

namespace {

void check_index(const SequenceModel& model, std::int64_t k, const char* what) {
  if (k < 1) throw PreconditionError(std::string(what) + ": index must be >= 1");
  if (auto h = horizon(model); h && k > *h)
    throw PreconditionError(std::string(what) + ": index beyond the model horizon");
}

// MA sums truncate at innovation index 1, so variance is reduced for k <= q.
double ma_variance(const SequenceModel& model, std::int64_t k) {
  const auto& a = model.coefficients;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (k - static_cast<std::int64_t>(i) < 1) break;
    sum += a[i] * a[i];
  }
  return model.innovation_variance * sum;
}

double ma_covariance(const SequenceModel& model, std::int64_t j, std::int64_t h) {
  if (j > h) std::swap(j, h);
  const auto& a = model.coefficients;
  const std::int64_t q = static_cast<std::int64_t>(a.size()) - 1;
  // Common innovations eps_t with t in [max(1, h-q), j].
  const std::int64_t lo = std::max<std::int64_t>(1, h - q);
  double sum = 0.0;
  for (std::int64_t t = lo; t <= j; ++t) sum += a[static_cast<std::size_t>(j - t)] * a[static_cast<std::size_t>(h - t)];
  return model.innovation_variance * sum;
}

}  // namespace

double variance_at(const SequenceModel& model, std::int64_t k) {
  check_index(model, k, "variance_at");
  switch (model.kind) {
    case ModelKind::Independent:
      if (model.marginal.family == Family::Cauchy)
        throw PreconditionError("variance_at: infinite-variance negative control");
      return model.marginal.variance.at(k);
    case ModelKind::GaussianAssoc:
      if (model.ar1) return model.ar1->variance;
      return model.matrix->values[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(k - 1)];
    case ModelKind::MaAssoc:
      return ma_variance(model, k);
  }
  return 0.0;
}

double covariance_at(const SequenceModel& model, std::int64_t j, std::int64_t h) {
  check_index(model, j, "covariance_at");
  check_index(model, h, "covariance_at");
  if (j == h) return variance_at(model, j);
  switch (model.kind) {
    case ModelKind::Independent:
      return 0.0;
    case ModelKind::GaussianAssoc:
      if (model.ar1)
        return model.ar1->variance * std::pow(model.ar1->phi, static_cast<double>(std::llabs(j - h)));
      return model.matrix->values[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(h - 1)];
    case ModelKind::MaAssoc:
      return ma_covariance(model, j, h);
  }
  return 0.0;
}

namespace {

// Innovation-coefficient vector of sum_{k=a1..a2} X_k for independent and
// moving-average kinds: the sum equals sum_t c_t eps_t.
std::vector<double> segment_coefficients(const SequenceModel& model, std::int64_t a1,
                                         std::int64_t a2, std::int64_t& t0) {
  if (model.kind == ModelKind::Independent) {
    t0 = a1;
    return std::vector<double>(static_cast<std::size_t>(a2 - a1 + 1), 1.0);
  }
  const auto& a = model.coefficients;
  const std::int64_t q = static_cast<std::int64_t>(a.size()) - 1;
  t0 = std::max<std::int64_t>(1, a1 - q);
  std::vector<double> c(static_cast<std::size_t>(a2 - t0 + 1), 0.0);
  for (std::int64_t k = a1; k <= a2; ++k)
    for (std::int64_t i = 0; i <= q; ++i) {
      const std::int64_t t = k - i;
      if (t < 1) break;
      c[static_cast<std::size_t>(t - t0)] += a[static_cast<std::size_t>(i)];
    }
  return c;
}

double ar1_lag_sum(double phi, std::int64_t len) {
  // sum_{d=1}^{len} phi^d
  if (phi == 0.0 || len <= 0) return 0.0;
  return phi * (1.0 - std::pow(phi, static_cast<double>(len))) / (1.0 - phi);
}

double ar1_segment_covariance(double phi, double v, std::int64_t a1, std::int64_t a2,
                              std::int64_t b1, std::int64_t b2) {
  double total = 0.0;
  for (std::int64_t j = a1; j <= a2; ++j) {
    // inner sum over h in [b1,b2] of phi^{|j-h|}, closed form per side
    double inner;
    if (j < b1) {
      inner = std::pow(phi, static_cast<double>(b1 - j)) *
              (1.0 + ar1_lag_sum(phi, b2 - b1));
    } else if (j > b2) {
      inner = std::pow(phi, static_cast<double>(j - b2)) *
              (1.0 + ar1_lag_sum(phi, b2 - b1));
    } else {
      inner = 1.0 + ar1_lag_sum(phi, j - b1) + ar1_lag_sum(phi, b2 - j);
    }
    total += inner;
  }
  return v * total;
}

}  // namespace

double segment_covariance(const SequenceModel& model, std::int64_t a1, std::int64_t a2,
                          std::int64_t b1, std::int64_t b2) {
  if (a1 > a2 || b1 > b2) return 0.0;
  check_index(model, a1, "segment_covariance");
  check_index(model, a2, "segment_covariance");
  check_index(model, b1, "segment_covariance");
  check_index(model, b2, "segment_covariance");
  switch (model.kind) {
    case ModelKind::Independent: {
      const std::int64_t lo = std::max(a1, b1), hi = std::min(a2, b2);
      double sum = 0.0;
      for (std::int64_t k = lo; k <= hi; ++k) sum += variance_at(model, k);
      return sum;
    }
    case ModelKind::GaussianAssoc: {
      if (model.ar1)
        return ar1_segment_covariance(model.ar1->phi, model.ar1->variance, a1, a2, b1, b2);
      double sum = 0.0;
      for (std::int64_t j = a1; j <= a2; ++j)
        for (std::int64_t h = b1; h <= b2; ++h) sum += covariance_at(model, j, h);
      return sum;
    }
    case ModelKind::MaAssoc: {
      std::int64_t ta = 0, tb = 0;
      const auto ca = segment_coefficients(model, a1, a2, ta);
      const auto cb = segment_coefficients(model, b1, b2, tb);
      const std::int64_t lo = std::max(ta, tb);
      const std::int64_t hi = std::min(ta + static_cast<std::int64_t>(ca.size()),
                                       tb + static_cast<std::int64_t>(cb.size())) - 1;
      double sum = 0.0;
      for (std::int64_t t = lo; t <= hi; ++t)
        sum += ca[static_cast<std::size_t>(t - ta)] * cb[static_cast<std::size_t>(t - tb)];
      return model.innovation_variance * sum;
    }
  }
  return 0.0;
}

namespace {

double draw_family(Family family, double sigma2, RandomStream& stream) {
  switch (family) {
    case Family::Normal:
      return std::sqrt(sigma2) * stream.normal();
    case Family::Rademacher:
      return std::sqrt(sigma2) * stream.sign();
    case Family::Uniform:
      return std::sqrt(sigma2) * kSqrt3 * (2.0 * stream.uniform01() - 1.0);
    case Family::Cauchy:
      return std::tan(3.1415926535897932384626433832795 * (stream.uniform01() - 0.5));
  }
  return 0.0;
}

void gen_matrix_section(const SequenceModel& model, std::int64_t p, std::int64_t n,
                        RandomStream& stream, std::vector<double>& out) {
  const auto& v = model.matrix->values;
  if (p + n > static_cast<std::int64_t>(v.size()))
    throw PreconditionError("gen_path: window beyond the covariance matrix horizon");
  Eigen::MatrixXd section(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      section(i, j) = v[static_cast<std::size_t>(p + i)][static_cast<std::size_t>(p + j)];
  Eigen::LLT<Eigen::MatrixXd> llt(section);
  if (llt.info() != Eigen::Success) {
    // one retry with diagonal jitter 1e-12 * max diagonal
    const double jitter = 1e-12 * section.diagonal().maxCoeff();
    section.diagonal().array() += jitter;
    llt.compute(section);
    if (llt.info() != Eigen::Success)
      throw GenerationError("gen_path: covariance section not positive semidefinite "
                            "after jitter");
  }
  Eigen::VectorXd z(n);
  for (std::int64_t i = 0; i < n; ++i) z(i) = stream.normal();
  Eigen::VectorXd x = llt.matrixL() * z;
  for (std::int64_t i = 0; i < n; ++i) out.push_back(x(i));
}

}  // namespace

SamplePath gen_path(const SequenceModel& model, std::int64_t p, std::int64_t n,
                    std::uint64_t seed, std::uint64_t replicate) {
  if (p < 0 || n < 0) throw PreconditionError("gen_path: p and n must be >= 0");
  validate(model);
  SamplePath path;
  path.first = p + 1;
  path.seed = seed;
  path.replicate = replicate;
  if (n == 0) return path;
  path.values.reserve(static_cast<std::size_t>(n));
  RandomStream stream(seed, replicate);

  switch (model.kind) {
    case ModelKind::Independent: {
      for (std::int64_t k = p + 1; k <= p + n; ++k)
        path.values.push_back(draw_family(model.marginal.family, model.marginal.variance.at(k), stream));
      break;
    }
    case ModelKind::GaussianAssoc: {
      if (model.ar1) {
        // The AR(1) recursion is the closed-form lower-triangular factor of a
        // stationary phi^{|j-h|} v section applied to iid normals.
        const double phi = model.ar1->phi;
        const double v = model.ar1->variance;
        double x = std::sqrt(v) * stream.normal();
        path.values.push_back(x);
        const double innovation_sd = std::sqrt(v * (1.0 - phi * phi));
        for (std::int64_t i = 1; i < n; ++i) {
          x = phi * x + innovation_sd * stream.normal();
          path.values.push_back(x);
        }
      } else {
        gen_matrix_section(model, p, n, stream, path.values);
      }
      break;
    }
    case ModelKind::MaAssoc: {
      const auto& a = model.coefficients;
      const std::int64_t q = static_cast<std::int64_t>(a.size()) - 1;
      const std::int64_t t0 = std::max<std::int64_t>(1, p + 1 - q);
      std::vector<double> eps;
      eps.reserve(static_cast<std::size_t>(p + n - t0 + 1));
      for (std::int64_t t = t0; t <= p + n; ++t)
        eps.push_back(draw_family(model.innovation_family, model.innovation_variance, stream));
      for (std::int64_t k = p + 1; k <= p + n; ++k) {
        double x = 0.0;
        for (std::int64_t i = 0; i <= q; ++i) {
          const std::int64_t t = k - i;
          if (t < t0) break;
          x += a[static_cast<std::size_t>(i)] * eps[static_cast<std::size_t>(t - t0)];
        }
        path.values.push_back(x);
      }
      break;
    }
  }
  return path;
}

AssociationCertificate certify_association(const SequenceModel& model) {
  validate(model);
  switch (model.kind) {
    case ModelKind::Independent:
      return {true, "independent families are associated"};
    case ModelKind::GaussianAssoc: {
      if (model.ar1) {
        if (model.ar1->phi >= 0.0)
          return {true, "Gaussian with nonnegative AR(1) covariances"};
        return {false, "Gaussian covariance rule has negative entries"};
      }
      for (const auto& row : model.matrix->values)
        for (double entry : row)
          if (entry < 0.0) return {false, "Gaussian covariance matrix has negative entries"};
      return {true, "Gaussian with elementwise nonnegative covariance matrix"};
    }
    case ModelKind::MaAssoc: {
      for (double a : model.coefficients)
        if (a < 0.0) return {false, "moving-average weights contain a negative coefficient"};
      return {true, "nonnegative-coefficient filter of independent innovations"};
    }
  }
  return {false, "unknown model kind"};
}

namespace {

struct McAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  MomentValue finish() const {
    MomentValue out;
    out.analytic = false;
    out.value = sum / static_cast<double>(count);
    const double var = sum_sq / static_cast<double>(count) - out.value * out.value;
    out.stderr_value = std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
    return out;
  }
};

// Draws X_k under the model, one replicate per call site index.
double draw_xk(const SequenceModel& model, std::int64_t k, std::uint64_t seed,
               std::uint64_t replicate) {
  const std::int64_t p = k - 1;
  return gen_path(model, p, 1, seed, replicate).values.front();
}

}  // namespace

MomentValue abs_moment(const SequenceModel& model, std::int64_t k, double r,
                       std::size_t mc_replicates, std::uint64_t seed) {
  check_index(model, k, "abs_moment");
  if (is_gaussian(model)) return {normal_abs_moment(variance_at(model, k), r), 0.0, true};
  if (model.kind == ModelKind::Independent) {
    const double sigma2 = variance_at(model, k);
    switch (model.marginal.family) {
      case Family::Rademacher:
        return {std::pow(sigma2, r / 2.0), 0.0, true};
      case Family::Uniform: {
        const double bound = std::sqrt(sigma2) * kSqrt3;
        return {std::pow(bound, r) / (r + 1.0), 0.0, true};
      }
      default:
        break;
    }
  }
  McAccumulator acc;
  for (std::size_t i = 0; i < mc_replicates; ++i)
    acc.add(std::pow(std::fabs(draw_xk(model, k, seed, i)), r));
  return acc.finish();
}

MomentValue tail_second_moment(const SequenceModel& model, std::int64_t k, double a,
                               bool strict, std::size_t mc_replicates, std::uint64_t seed) {
  check_index(model, k, "tail_second_moment");
  if (a < 0.0) a = 0.0;
  if (is_gaussian(model))
    return {normal_tail_second_moment(variance_at(model, k), a), 0.0, true};
  if (model.kind == ModelKind::Independent) {
    const double sigma2 = variance_at(model, k);
    switch (model.marginal.family) {
      case Family::Rademacher: {
        const double mag = std::sqrt(sigma2);
        const bool in = strict ? (mag > a) : (mag >= a);
        return {in ? sigma2 : 0.0, 0.0, true};
      }
      case Family::Uniform: {
        const double bound = std::sqrt(sigma2) * kSqrt3;
        if (bound == 0.0 || a >= bound) return {0.0, 0.0, true};
        // 2 * int_a^b x^2 / (2b) dx = (b^3 - a^3) / (3b)
        return {(bound * bound * bound - a * a * a) / (3.0 * bound), 0.0, true};
      }
      default:
        break;
    }
  }
  McAccumulator acc;
  for (std::size_t i = 0; i < mc_replicates; ++i) {
    const double x = draw_xk(model, k, seed, i);
    const bool in = strict ? (std::fabs(x) > a) : (std::fabs(x) >= a);
    acc.add(in ? x * x : 0.0);
  }
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

VarianceRule parse_variance_rule(const json& j, const char* where) {
  VarianceRule rule;
  if (j.is_number()) {
    rule.scale = j.get<double>();
    return rule;
  }
  const std::string kind = j.value("rule", "constant");
  if (kind == "constant")
    rule.kind = VarianceRuleKind::Constant;
  else if (kind == "linear")
    rule.kind = VarianceRuleKind::Linear;
  else if (kind == "geometric")
    rule.kind = VarianceRuleKind::Geometric;
  else
    throw SchemaError(std::string(where) + ".rule: unknown rule '" + kind + "'");
  rule.scale = j.value("scale", j.value("value", 1.0));
  rule.base = j.value("base", 1.0);
  return rule;
}

Family parse_family(const std::string& name, const char* where) {
  if (name == "normal") return Family::Normal;
  if (name == "rademacher") return Family::Rademacher;
  if (name == "uniform") return Family::Uniform;
  if (name == "cauchy") return Family::Cauchy;
  throw SchemaError(std::string(where) + ": unknown family '" + name + "'");
}

}  // namespace

SequenceModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
  SequenceModel model;
  model.id = j.value("id", "model");
  const std::string kind = j.value("kind", "");
  if (kind == "independent") {
    model.kind = ModelKind::Independent;
    if (!j.contains("marginal")) throw SchemaError("marginal: missing");
    const auto& m = j.at("marginal");
    model.marginal.family = parse_family(m.value("family", "normal"), "marginal.family");
    if (m.contains("variance"))
      model.marginal.variance = parse_variance_rule(m.at("variance"), "marginal.variance");
    model.marginal.negative_control = m.value("negative_control", false);
    if (m.value("mean", 0.0) != 0.0)
      throw SchemaError("marginal.mean: non-centered families are rejected, not auto-centered");
  } else if (kind == "gaussian-assoc") {
    model.kind = ModelKind::GaussianAssoc;
    if (!j.contains("covariance")) throw SchemaError("covariance: missing");
    const auto& c = j.at("covariance");
    const std::string rule = c.value("rule", "ar1");
    if (rule == "ar1") {
      Ar1Covariance ar1;
      ar1.phi = c.value("phi", 0.0);
      ar1.variance = c.value("variance", 1.0);
      model.ar1 = ar1;
    } else if (rule == "matrix") {
      MatrixCovariance matrix;
      if (!c.contains("values")) throw SchemaError("covariance.values: missing");
      matrix.values = c.at("values").get<std::vector<std::vector<double>>>();
      model.matrix = matrix;
    } else {
      throw SchemaError("covariance.rule: unknown rule '" + rule + "'");
    }
  } else if (kind == "ma-assoc") {
    model.kind = ModelKind::MaAssoc;
    if (!j.contains("coefficients")) throw SchemaError("coefficients: missing");
    model.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (j.contains("innovation")) {
      const auto& inn = j.at("innovation");
      model.innovation_family = parse_family(inn.value("family", "normal"), "innovation.family");
      model.innovation_variance = inn.value("variance", 1.0);
    }
  } else {
    throw SchemaError("kind: expected one of independent, gaussian-assoc, ma-assoc");
  }
  validate(model);
  return model;
}

SequenceModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError("model file: cannot open " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

}  // namespace mps
