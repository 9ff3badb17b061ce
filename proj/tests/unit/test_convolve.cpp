#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ruzsa/convolve.hpp"
#include "ruzsa/entropy.hpp"
#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"

using namespace ruzsa;

namespace {

FinitePMF two_point(std::int64_t m) {
  std::vector<double> p(static_cast<std::size_t>(m), 0.0);
  p[0] = p[1] = 0.5;
  return FinitePMF(GroupSpec::cyclic(m), p);
}

void expect_probs(const FinitePMF& p, const std::vector<double>& expected, double tol = 1e-15) {
  ASSERT_EQ(p.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(p[i], expected[i], tol) << "index " << i;
}

double max_abs_diff(const FinitePMF& a, const FinitePMF& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(Convolve, TwoPointOnZ4) {
  const auto x = two_point(4);
  expect_probs(convolve(x, x, Sign::Plus), {0.25, 0.5, 0.25, 0.0});
  expect_probs(convolve(x, x, Sign::Minus), {0.5, 0.25, 0.0, 0.25});
}

TEST(Convolve, NaiveMatchesTransform) {
  Rng rng(17);
  for (int t = 0; t < 1000; ++t) {
    const auto g = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 511));
    const auto p = random_pmf(g, 1.0, rng), q = random_pmf(g, 0.5, rng);
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      ASSERT_LE(max_abs_diff(convolve(p, q, s, ConvolutionMethod::Naive), convolve(p, q, s, ConvolutionMethod::Transform)),
                1e-12);
    }
  }
}

TEST(Convolve, ProductGroupTransform) {
  Rng rng(3);
  const auto g = GroupSpec::finite({4, 6});
  const auto p = random_pmf(g, 1.0, rng), q = random_pmf(g, 1.0, rng);
  EXPECT_LE(max_abs_diff(convolve(p, q, Sign::Minus, ConvolutionMethod::Naive),
                         convolve(p, q, Sign::Minus, ConvolutionMethod::Transform)),
            1e-14);
}

TEST(Convolve, AlgebraicProperties) {
  Rng rng(23);
  const auto g = GroupSpec::cyclic(37);
  const auto a = random_pmf(g, 1.0, rng), b = random_pmf(g, 1.0, rng), c = random_pmf(g, 1.0, rng);
  EXPECT_LE(max_abs_diff(convolve(a, b), convolve(b, a)), 1e-12);
  EXPECT_LE(max_abs_diff(convolve(convolve(a, b), c), convolve(a, convolve(b, c))), 1e-12);
  // Uniform summand makes the sum exactly uniform.
  const auto u = FinitePMF::uniform(g);
  EXPECT_LE(max_abs_diff(convolve(a, u), u), 1e-15);
  FinitePMF chain = a;
  for (int k = 0; k < 8; ++k) chain = convolve(chain, k % 2 ? b : c, k % 3 ? Sign::Plus : Sign::Minus);
  double total = 0.0;
  for (double p : chain.probs()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(Convolve, ClosedForms) {
  const Density n = ParametricDensity::standard_gaussian(1);
  const Density sum = convolve(n, n);
  ASSERT_TRUE(std::holds_alternative<ParametricDensity>(sum));
  EXPECT_NEAR(std::get<ParametricDensity>(sum).covariance()(0, 0), 2.0, 1e-15);

  const Density e = ParametricDensity::exponential(1.0);
  const Density lap = convolve(e, e, Sign::Minus);
  ASSERT_TRUE(std::holds_alternative<ParametricDensity>(lap));
  EXPECT_NEAR(entropy(lap).nats, 1.0 + std::log(2.0), 1e-14);
  EXPECT_TRUE(has_closed_form(e, e, Sign::Plus));
  EXPECT_NEAR(entropy(convolve(e, e)).nats, 1.0 + std::numbers::egamma, 1e-12);
}

TEST(Convolve, GridGaussianSelfConvolution) {
  const auto g = GridDensity::from_cdf_1d(GroupSpec::real(1), GridAxis{-8.0, 8.0, 4096, false},
                                          [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  const GridDensity s = convolve(g, g);
  EXPECT_EQ(s.total_cells(), 2u * 4096 - 1);
  EXPECT_NEAR(entropy(s).nats, 0.5 * std::log(2 * std::numbers::pi * std::numbers::e * 2.0), 5e-3);
}

TEST(Convolve, GridCellCap) {
  const auto g = GridDensity::uniform(GroupSpec::real(2), {GridAxis{0, 1, 512, false}, GridAxis{0, 1, 512, false}});
  ConvolutionOptions o;
  o.grid.max_cells = 1u << 18;
  EXPECT_THROW(convolve(g, g, Sign::Plus, o), ResolutionError);
}

TEST(Convolve, GroupMismatch) {
  EXPECT_THROW(convolve(two_point(4), two_point(5)), DomainError);
}

TEST(WeightedSum, Examples) {
  const auto x = two_point(4);
  const auto diff = weighted_sum({1.0, -1.0}, {Density(x), Density(x)});
  expect_probs(std::get<FinitePMF>(diff.law), {0.5, 0.25, 0.0, 0.25});

  const auto twice = weighted_sum({2.0}, {Density(x)});
  expect_probs(std::get<FinitePMF>(twice.law), {0.5, 0.0, 0.5, 0.0});

  const auto y = two_point(8);
  const auto w = weighted_sum({2.0, 1.0}, {Density(y), Density(y)});
  expect_probs(std::get<FinitePMF>(w.law), {0.25, 0.25, 0.25, 0.25, 0, 0, 0, 0});

  const auto zero = weighted_sum({0.0, 1.0}, {Density(y), Density(y)});
  EXPECT_TRUE(zero.zero_coefficient);
  EXPECT_THROW(weighted_sum({0.0}, {Density(y)}), ValidationError);
}

TEST(SelfConvolve, Examples) {
  const auto y = two_point(8);
  EXPECT_EQ(std::get<FinitePMF>(self_convolve(y, 1)), y);
  expect_probs(std::get<FinitePMF>(self_convolve(y, 3)), {0.125, 0.375, 0.375, 0.125, 0, 0, 0, 0});
  const Density n2 = self_convolve(ParametricDensity::standard_gaussian(1), 2);
  EXPECT_NEAR(std::get<ParametricDensity>(n2).covariance()(0, 0), 2.0, 1e-15);
}
