#include <doctest.h>

#include <cmath>

#include "mps/errors.hpp"
#include "mps/rng.hpp"
#include "mps/sums.hpp"

using namespace mps;

namespace {

SamplePath literal_path(std::int64_t first, std::vector<double> values) {
  SamplePath path;
  path.first = first;
  path.values = std::move(values);
  return path;
}

SequenceModel linear_variance_model() {
  SequenceModel model;
  model.marginal.variance.kind = VarianceRuleKind::Linear;
  return model;
}

}  // namespace

TEST_CASE("moving_sum") {
  const auto path = literal_path(1, {1, 2, 3, 4, 5});
  CHECK(moving_sum(path, {1, 3}) == 9.0);
  CHECK(moving_sum(path, {0, 5}) == 15.0);  // p = 0 reduces to the plain partial sum
  CHECK(moving_sum(path, {3, 0}) == 0.0);   // S'_0 = 0
  CHECK_THROWS_AS(moving_sum(path, {3, 3}), PreconditionError);
}

TEST_CASE("moving_sum: window additivity") {
  SequenceModel model;
  const auto path = gen_path(model, 0, 64, 5);
  for (std::int64_t p : {0, 3})
    for (std::int64_t n1 : {0, 7, 20})
      for (std::int64_t n2 : {0, 5, 30}) {
        const double whole = moving_sum(path, {p, n1 + n2});
        const double split = moving_sum(path, {p, n1}) + moving_sum(path, {p + n1, n2});
        CHECK(whole == doctest::Approx(split).epsilon(1e-12));
      }
}

TEST_CASE("make_block_scheme") {
  auto scheme = make_block_scheme(10, 3);
  CHECK(scheme.ell == 3);
  CHECK(scheme.m == 3);
  CHECK(scheme.r == 1);

  scheme = make_block_scheme(12);  // floor(12^{1/3}) = 2
  CHECK(scheme.ell == 2);
  CHECK(scheme.m == 6);
  CHECK(scheme.r == 0);

  CHECK_THROWS_AS(make_block_scheme(5, 9), PreconditionError);
  CHECK_THROWS_AS(make_block_scheme(5, 0), PreconditionError);

  // block-count exactness over a sweep
  for (std::int64_t n = 1; n <= 200; ++n) {
    const auto s = make_block_scheme(n);
    CHECK(s.m * s.ell + s.r == n);
    CHECK(s.r < s.ell);
  }
}

TEST_CASE("block_increments") {
  const auto path = literal_path(1, {1, 2, 3, 4, 5, 6});
  const auto blocks = block_increments(path, {0, 6}, make_block_scheme(6, 2));
  REQUIRE(blocks.values.size() == 3);
  const double root2 = std::sqrt(2.0);
  CHECK(blocks.values[0] == doctest::Approx(3.0 / root2));
  CHECK(blocks.values[1] == doctest::Approx(7.0 / root2));
  CHECK(blocks.values[2] == doctest::Approx(11.0 / root2));
  CHECK(blocks.remainder_sum == 0.0);

  const auto zero = block_increments(literal_path(1, std::vector<double>(6, 0.0)), {0, 6},
                                     make_block_scheme(6, 2));
  for (double y : zero.values) CHECK(y == 0.0);

  CHECK_THROWS_AS(block_increments(path, {0, 5}, make_block_scheme(6, 2)), PreconditionError);
}

TEST_CASE("block_increments: reconstruction identity on random paths") {
  SequenceModel model;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto path = gen_path(model, 2, 50, seed);
    const Window window{2, 50};
    const auto scheme = make_block_scheme(50, 7);
    const auto blocks = block_increments(path, window, scheme);
    double total = 0.0;
    for (double y : blocks.values) total += y;
    total = std::sqrt(static_cast<double>(scheme.ell)) * total + blocks.remainder_sum;
    CHECK(total == doctest::Approx(moving_sum(path, window)).epsilon(1e-12));
  }
}

TEST_CASE("window_variance: exact values") {
  CHECK(window_variance(linear_variance_model(), {2, 3}) == doctest::Approx(12.0));  // 3+4+5

  SequenceModel gaussian;
  gaussian.kind = ModelKind::GaussianAssoc;
  gaussian.ar1 = Ar1Covariance{0.5, 4.0 / 3.0};
  CHECK(window_variance(gaussian, {0, 2}) == doctest::Approx(4.0));

  // the AR(1) fast path must agree with the covariance double sum
  double brute = 0.0;
  for (std::int64_t j = 4; j <= 20; ++j)
    for (std::int64_t h = 4; h <= 20; ++h) brute += covariance_at(gaussian, j, h);
  CHECK(window_variance(gaussian, {3, 17}) == doctest::Approx(brute).epsilon(1e-12));

  SequenceModel ma;
  ma.kind = ModelKind::MaAssoc;
  ma.coefficients = {1.0, 0.5};
  brute = 0.0;
  for (std::int64_t j = 3; j <= 14; ++j)
    for (std::int64_t h = 3; h <= 14; ++h) brute += covariance_at(ma, j, h);
  CHECK(window_variance(ma, {2, 12}) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("window_variance: monte carlo agrees with exact") {
  SequenceModel gaussian;
  gaussian.kind = ModelKind::GaussianAssoc;
  gaussian.ar1 = Ar1Covariance{0.5, 4.0 / 3.0};
  const Window window{3, 32};
  const double exact = window_variance(gaussian, window);
  const auto mc = window_variance_mc(gaussian, window, 40000, 17);
  CHECK(std::fabs(mc.value - exact) <= 3.0 * mc.stderr_value);
  CHECK_THROWS_AS(window_variance_mc(gaussian, window, 1, 17), PreconditionError);
}

TEST_CASE("window_variance: superadditivity and lower bound for associated models") {
  SequenceModel gaussian;
  gaussian.kind = ModelKind::GaussianAssoc;
  gaussian.ar1 = Ar1Covariance{0.5, 4.0 / 3.0};
  SequenceModel ma;
  ma.kind = ModelKind::MaAssoc;
  ma.coefficients = {1.0, 0.5, 0.25};
  for (const auto& model : {gaussian, ma}) {
    const Window window{5, 50};
    const auto scheme = make_block_scheme(window.n, 7);
    const double s2 = window_variance(model, window);
    CHECK(s2 >= 0.0);
    double marginal_sum = 0.0;
    for (std::int64_t k = window.p + 1; k <= window.p + window.n; ++k)
      marginal_sum += variance_at(model, k);
    CHECK(s2 >= marginal_sum - 1e-12);
    const double bulk = window_variance(model, {window.p, scheme.m * scheme.ell});
    const double tail = remainder_variance(model, window, scheme);
    CHECK(1.0 >= (bulk + tail) / s2 - 1e-12);
  }
}

TEST_CASE("block_variance matches brute-force segment sums") {
  SequenceModel gaussian;
  gaussian.kind = ModelKind::GaussianAssoc;
  gaussian.ar1 = Ar1Covariance{0.25, 1.0};
  const Window window{4, 30};
  const auto scheme = make_block_scheme(30, 7);
  for (std::int64_t j = 1; j <= scheme.m; ++j) {
    const std::int64_t a = window.p + (j - 1) * scheme.ell + 1;
    double brute = 0.0;
    for (std::int64_t x = a; x < a + scheme.ell; ++x)
      for (std::int64_t y = a; y < a + scheme.ell; ++y) brute += covariance_at(gaussian, x, y);
    CHECK(block_variance(gaussian, window, scheme, j) == doctest::Approx(brute).epsilon(1e-12));
  }
}
