#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ruzsa/convolve.hpp"
#include "ruzsa/entropy.hpp"
#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"

using namespace ruzsa;

namespace {

const double kE = std::numbers::e;
const double kHalfLog2PiE = 0.5 * std::log(2.0 * std::numbers::pi * kE);

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

GridDensity gaussian_grid(std::size_t cells) {
  return GridDensity::from_cdf_1d(GroupSpec::real(1), GridAxis{-8.0, 8.0, cells, false}, normal_cdf);
}

}  // namespace

TEST(Entropy, Uniform) {
  EXPECT_NEAR(entropy(FinitePMF::uniform(GroupSpec::cyclic(8))).nats, std::log(8.0), 1e-15);
  const auto g = GridDensity::uniform(GroupSpec::real(1), {GridAxis{0.0, 1.0, 1024, false}});
  EXPECT_NEAR(entropy(g).nats, 0.0, 1e-12);
  EXPECT_EQ(entropy(g).path, EntropyPath::Grid);
}

TEST(Entropy, ZeroLogZero) {
  EXPECT_DOUBLE_EQ(discrete_entropy(std::vector<double>{0.5, 0.0, 0.5}), std::log(2.0));
  EXPECT_DOUBLE_EQ(entropy(FinitePMF::point_mass(GroupSpec::cyclic(5), 2)).nats, 0.0);
}

TEST(Entropy, ClosedForms) {
  EXPECT_NEAR(entropy(ParametricDensity::standard_gaussian(1)).nats, kHalfLog2PiE, 1e-14);
  EXPECT_NEAR(entropy(ParametricDensity::exponential(2.0)).nats, 1.0 - std::log(2.0), 1e-14);
  EXPECT_NEAR(entropy(ParametricDensity::uniform({0.0, 0.0}, {2.0, 3.0})).nats, std::log(6.0), 1e-14);
  EXPECT_NEAR(entropy(ParametricDensity::laplace(0.0, 1.5)).nats, 1.0 + std::log(3.0), 1e-14);
  // Gamma(2, 1): 1 + Euler's constant.
  EXPECT_NEAR(entropy(ParametricDensity::gamma(2.0, 1.0)).nats, 1.0 + std::numbers::egamma, 1e-12);
  EXPECT_EQ(entropy(ParametricDensity::exponential(1.0)).path, EntropyPath::ClosedForm);
}

TEST(Entropy, PointMassGridIsNegInfinity) {
  const auto g = GridDensity::from_weights(GroupSpec::real(1), {GridAxis{0.0, 0.0, 1, false}}, {1.0});
  const EntropyValue h = entropy(g);
  EXPECT_TRUE(h.neg_infinity);
  EXPECT_EQ(entropy_power(h, 1), 0.0);
}

TEST(Entropy, MutualInformation) {
  Rng rng(1);
  const auto z5 = GroupSpec::cyclic(5);
  const std::vector<FinitePMF> f = {random_pmf(z5, 1.0, rng), random_pmf(z5, 1.0, rng)};
  EXPECT_NEAR(mutual_information(JointPMF::product(f), vars({0}), vars({1})), 0.0, 1e-12);

  const auto z4 = GroupSpec::cyclic(4);
  std::vector<double> diag(16, 0.0);
  for (int i = 0; i < 4; ++i) diag[5 * i] = 0.25;
  EXPECT_NEAR(mutual_information(JointPMF::from_matrix(z4, z4, diag), vars({0}), vars({1})), std::log(4.0), 1e-14);

  const std::vector<double> m = {0.4, 0.1, 0.1, 0.4};
  double oracle = 0.0;
  for (double p : m) oracle += p * std::log(p / 0.25);
  const auto z2 = GroupSpec::cyclic(2);
  EXPECT_NEAR(mutual_information(JointPMF::from_matrix(z2, z2, m), vars({0}), vars({1})), oracle, 1e-14);
  EXPECT_NEAR(oracle, 0.19274, 1e-5);
}

TEST(Entropy, ChainRuleAndDataProcessing) {
  Rng rng(2);
  for (int t = 0; t < 1000; ++t) {
    const auto gx = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 6));
    const auto gy = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 6));
    const JointPMF j = random_joint({gx, gy}, rng);
    ASSERT_NEAR(joint_entropy(j), entropy(j.marginal_pmf(0)).nats + conditional_entropy(j, vars({1}), vars({0})),
                1e-12);
    // Random function of Y.
    const std::size_t mx = gx.order(), my = gy.order();
    std::vector<std::size_t> g(my);
    for (auto& v : g) v = rng() % my;
    std::vector<double> w(mx * my, 0.0);
    for (std::size_t x = 0; x < mx; ++x)
      for (std::size_t y = 0; y < my; ++y) w[x * my + g[y]] += j.tensor()[x * my + y];
    const JointPMF jg = JointPMF::from_weights({gx, gy}, w);
    ASSERT_GE(mutual_information(j, vars({0}), vars({1})) - mutual_information(jg, vars({0}), vars({1})), -1e-10);
  }
}

TEST(Entropy, TranslationInvariance) {
  Rng rng(3);
  const auto p = random_pmf(GroupSpec::finite({3, 4}), 1.0, rng);
  for (std::size_t s = 0; s < 12; ++s) EXPECT_EQ(entropy(p.shifted(s)).nats, entropy(p).nats);
}

TEST(Entropy, UnimodularInvariance) {
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const auto g = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 15));
    const auto g2 = g.power(2);
    const auto p = random_pmf(g2, 1.0, rng);
    const IntegerMatrix a = random_gl2z(rng);
    std::vector<double> w(g2.order(), 0.0);
    for (std::size_t x = 0; x < g2.order(); ++x) w[apply_integer_matrix_index(a, g, g2, x)] += p[x];
    ASSERT_NEAR(entropy(FinitePMF(g2, w)).nats, entropy(p).nats, 1e-12);
  }
}

TEST(Entropy, GridScaling) {
  Rng rng(5);
  const GridDensity g = random_logconcave_grid(512, rng);
  EXPECT_NEAR(entropy(g.scaled(2.0)).nats, entropy(g).nats + std::log(2.0), 1e-10);
}

TEST(Entropy, GridConvergesToGaussian) {
  double previous = 1.0;
  for (std::size_t cells : {64u, 128u, 256u, 512u}) {
    const double err = std::abs(entropy(gaussian_grid(cells)).nats - kHalfLog2PiE);
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Entropy, EntropyPower) {
  EXPECT_NEAR(entropy_power(Density(ParametricDensity::standard_gaussian(1))), 2 * std::numbers::pi * kE, 1e-10);
  EXPECT_NEAR(entropy_power(Density(ParametricDensity::uniform({0.0}, {1.0}))), 1.0, 1e-14);
  EXPECT_NEAR(entropy_power(Density(ParametricDensity::standard_gaussian(2))), 2 * std::numbers::pi * kE, 1e-10);
  EXPECT_THROW(entropy_power(Density(FinitePMF::uniform(GroupSpec::cyclic(4)))), DomainError);
}

TEST(Entropy, GaussianRelativeEntropy) {
  Eigen::MatrixXd k(2, 2);
  k << 2.0, 0.3, 0.3, 1.0;
  EXPECT_NEAR(gaussian_relative_entropy(ParametricDensity::gaussian(Eigen::VectorXd::Zero(2), k)), 0.0, 1e-10);
  EXPECT_NEAR(gaussian_relative_entropy(ParametricDensity::exponential(1.0)), kHalfLog2PiE - 1.0, 1e-12);
  EXPECT_NEAR(gaussian_relative_entropy(ParametricDensity::uniform({0.0}, {1.0})),
              0.5 * std::log(2 * std::numbers::pi * kE / 12.0), 1e-12);
  EXPECT_NEAR(gaussian_relative_entropy(as_grid(ParametricDensity::exponential(1.0))), 0.41894, 5e-3);
  EXPECT_NEAR(gaussian_relative_entropy(gaussian_grid(4096)), 0.0, 1e-6);
}

TEST(Entropy, Multiplicative) {
  const MultiplicativeEntropy ln = multiplicative_entropy(ParametricDensity::lognormal(0.0, 1.0));
  EXPECT_NEAR(ln.intrinsic, kHalfLog2PiE, 1e-12);
  EXPECT_NEAR(ln.log_mean, 0.0, 1e-14);

  // X uniform on [1, e]: L = log X has density e^l / (e - 1) on [0, 1].
  const auto g = GridDensity::from_pdf(GroupSpec::multiplicative_positive(), {GridAxis{0.0, 1.0, 4096, false}},
                                       [](std::span<const double> l) { return std::exp(l[0]); });
  const MultiplicativeEntropy u = multiplicative_entropy(g);
  EXPECT_NEAR(u.log_mean, 1.0 / (kE - 1.0), 1e-6);
  EXPECT_NEAR(u.lebesgue, std::log(kE - 1.0), 1e-6);
  EXPECT_NEAR(u.intrinsic, std::log(kE - 1.0) - 1.0 / (kE - 1.0), 1e-6);
  EXPECT_NEAR(lebesgue_entropy_quadrature(g), std::log(kE - 1.0), 1e-6);
}

TEST(Entropy, CircleAndComplex) {
  const auto u = GridDensity::uniform(GroupSpec::circle(), {GridAxis::periodic_axis(256)});
  EXPECT_NEAR(circle_relative_entropy(u), 0.0, 1e-12);
  EXPECT_NEAR(entropy(u).nats, 0.0, 1e-12);

  // log|Z| uniform on [0, 1], angle uniform: intrinsic entropy log(2 pi).
  const auto z = GridDensity::uniform(GroupSpec::multiplicative_complex(),
                                      {GridAxis{0.0, 1.0, 64, false}, GridAxis::periodic_axis(64)});
  const MultiplicativeEntropy c = complex_multiplicative_entropy(z);
  EXPECT_NEAR(c.intrinsic, std::log(kTwoPi), 1e-12);
  EXPECT_NEAR(c.log_mean, 0.5, 1e-12);
  EXPECT_NEAR(c.lebesgue, std::log(kTwoPi) + 1.0, 1e-12);
}
