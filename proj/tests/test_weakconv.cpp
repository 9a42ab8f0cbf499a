#include <doctest.h>

#include <cmath>

#include "mps/errors.hpp"
#include "mps/stats.hpp"
#include "mps/weakconv.hpp"

using namespace mps;

namespace {

ReplicateEnsemble literal_ensemble(std::vector<double> values) {
  ReplicateEnsemble e;
  e.replicates = values.size();
  e.dim = 1;
  e.data = std::move(values);
  return e;
}

SequenceModel ar1_model(double phi) {
  SequenceModel model;
  model.kind = ModelKind::GaussianAssoc;
  model.ar1 = Ar1Covariance{phi, 1.0};
  return model;
}

}  // namespace

TEST_CASE("ks and cvm at plotting positions") {
  // x_i = Phi^{-1}((i - 1/2)/R) makes both statistics exact closed forms:
  // D = 1/(2R), W^2 = 1/(12 R)
  const std::size_t R = 100;
  std::vector<double> values;
  for (std::size_t i = 1; i <= R; ++i)
    values.push_back(normal_quantile((static_cast<double>(i) - 0.5) / R));
  const auto e = literal_ensemble(std::move(values));
  CHECK(ks_to_normal(e) == doctest::Approx(0.005).epsilon(1e-9));
  CHECK(cvm_to_normal(e) == doctest::Approx(1.0 / 1200.0).epsilon(1e-9));
}

TEST_CASE("ks degenerate and ordering cases") {
  CHECK(ks_to_normal(literal_ensemble(std::vector<double>(100, 0.0))) == doctest::Approx(0.5));
  // unsorted input must give the same value as sorted input
  CHECK(ks_to_normal(literal_ensemble({1.3, -0.2, 0.7, -1.9})) ==
        ks_to_normal(literal_ensemble({-1.9, -0.2, 0.7, 1.3})));
  CHECK_THROWS_AS(ks_to_normal(literal_ensemble({})), PreconditionError);
}

TEST_CASE("ecf on a two-point ensemble is a cosine") {
  const auto e = literal_ensemble({1.0, -1.0});
  const auto cf = ecf(e, {{0.0}, {1.0}, {2.5}});
  REQUIRE(cf.values.size() == 3);
  CHECK(cf.values[0].real() == doctest::Approx(1.0));
  CHECK(cf.values[1].real() == doctest::Approx(std::cos(1.0)));
  CHECK(cf.values[2].real() == doctest::Approx(std::cos(2.5)));
  for (const auto& v : cf.values) CHECK(v.imag() == doctest::Approx(0.0));
  CHECK_THROWS_AS(ecf(e, {{1.0, 2.0}}), PreconditionError);  // wrong dimension
}

TEST_CASE("mc_normalized_sums: determinism, thread invariance, normality") {
  SequenceModel model;  // iid standard normal: S'_n / s'_n is exactly N(0,1)
  const Window window{5, 64};
  const auto e1 = mc_normalized_sums(model, window, 2000, 7, 1);
  const auto e4 = mc_normalized_sums(model, window, 2000, 7, 4);
  CHECK(e1.data == e4.data);  // worker count must not move a single bit
  CHECK(e1.replicates == 2000);
  CHECK(ks_to_normal(e1) < 1.5 * 1.36 / std::sqrt(2000.0));
  CHECK(cvm_to_normal(e1) < 0.46);  // 5% point of the CvM null distribution

  const auto other = mc_normalized_sums(model, window, 2000, 8, 1);
  CHECK(e1.data != other.data);  // seed actually enters
}

TEST_CASE("newman_verify: bivariate gaussian closed form") {
  const auto model = ar1_model(0.5);
  const auto report = newman_verify(model, 2, {{1.0, 1.0}}, 20000, 3);
  REQUIRE(report.checks.size() == 1);
  const auto& check = report.checks[0];
  // |exp(-t'Ct/2) - prod exp(-t_j^2 C_jj / 2)| with C = [[1,.5],[.5,1]]
  const double exact = std::exp(-1.0) - std::exp(-1.5);
  CHECK(check.exact_gap == doctest::Approx(exact).epsilon(1e-12));
  CHECK(check.bound == doctest::Approx(0.5));
  CHECK(std::fabs(check.gap - exact) < report.slack);
  CHECK(check.holds);
  CHECK(report.all_hold);
  CHECK(report.slack == doctest::Approx(6.0 / std::sqrt(20000.0)));
}

TEST_CASE("newman_verify: independent coordinates have zero bound") {
  SequenceModel model;
  const auto report = newman_verify(model, 3, {{0.5, -1.0, 2.0}}, 5000, 11);
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].bound == 0.0);
  CHECK(report.checks[0].exact_gap == doctest::Approx(0.0));
  CHECK(report.checks[0].gap <= report.slack);
  CHECK(report.checks[0].holds);
}

TEST_CASE("newman_verify refuses uncertified models") {
  SequenceModel model;
  model.kind = ModelKind::GaussianAssoc;
  model.matrix = MatrixCovariance{{{1.0, -0.3}, {-0.3, 1.0}}};
  CHECK_THROWS_AS(newman_verify(model, 2, {{1.0, 1.0}}, 100, 1), PreconditionError);
}

TEST_CASE("fdd_ensemble shape, determinism, marginal variances") {
  SequenceModel model;
  const std::vector<double> grid{0.25, 0.5, 1.0};
  const auto e = fdd_ensemble(model, 400, grid, 3000, 21, 1);
  CHECK(e.replicates == 3000);
  CHECK(e.dim == 3);
  CHECK(e.grid == grid);
  const auto e4 = fdd_ensemble(model, 400, grid, 3000, 21, 4);
  CHECK(e.data == e4.data);

  // Var Y_n(t) = [nt]/n exactly for iid unit-variance terms
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r = 0; r < e.replicates; ++r) {
      sum += e.at(r, c);
      sum_sq += e.at(r, c) * e.at(r, c);
    }
    const double mean = sum / static_cast<double>(e.replicates);
    const double var = sum_sq / static_cast<double>(e.replicates) - mean * mean;
    CHECK(var == doctest::Approx(grid[c]).epsilon(0.12));
  }
}

TEST_CASE("fdd_covariance_check against the min-scaling target") {
  SequenceModel model;
  const std::vector<double> grid{0.25, 0.5, 1.0};
  const auto e = fdd_ensemble(model, 400, grid, 4000, 33, 1);
  const auto a = scaling_ratio(model, 400, grid);
  const auto report = fdd_covariance_check(e, a);
  REQUIRE(report.target.size() == 3);
  CHECK(report.target[0][2] == doctest::Approx(0.25));  // min(a(0.25), a(1))
  CHECK(report.target[1][1] == doctest::Approx(0.5));
  CHECK(report.max_abs_deviation < 0.06);
}

TEST_CASE("increment decoupling gap and bound") {
  SequenceModel iid;
  const std::vector<double> grid{0.5, 1.0};
  const auto e = fdd_ensemble(iid, 200, grid, 2000, 5, 1);
  // k = 1: the gap is identically zero by construction
  const auto e1 = fdd_ensemble(iid, 200, {1.0}, 500, 5, 1);
  CHECK(increment_decoupling_gap(e1, {1.0}, 0.7) == 0.0);
  // independent increments: exact bound is zero, gap is pure MC noise
  CHECK(increment_newman_bound(iid, 200, grid, {1.0, 1.0}, 0.7) == 0.0);
  CHECK(increment_decoupling_gap(e, {1.0, 1.0}, 0.7) < 6.0 / std::sqrt(2000.0));

  // AR(1): positive bound dominating the empirical gap
  const auto ar = ar1_model(0.5);
  const auto ea = fdd_ensemble(ar, 200, grid, 4000, 5, 1);
  const double bound = increment_newman_bound(ar, 200, grid, {1.0, 1.0}, 0.7);
  CHECK(bound > 0.0);
  CHECK(increment_decoupling_gap(ea, {1.0, 1.0}, 0.7) <= bound + 6.0 / std::sqrt(4000.0));
}
