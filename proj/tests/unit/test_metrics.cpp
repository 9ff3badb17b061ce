#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"
#include "ruzsa/ruzsa_metrics.hpp"

using namespace ruzsa;

namespace {

double h2(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

JointPMF correlated_z2() {
  const auto z2 = GroupSpec::cyclic(2);
  return JointPMF::from_matrix(z2, z2, {0.4, 0.1, 0.1, 0.4});
}

FinitePMF push(const FinitePMF& p, const IntegerMatrix& a) {
  const auto& g2 = p.group();
  const auto g = GroupSpec::cyclic(g2.moduli()[0]);
  std::vector<double> w(p.size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) w[apply_integer_matrix_index(a, g, g2, x)] += p[x];
  return FinitePMF(g2, w);
}

}  // namespace

TEST(RuzsaDivergence, UniformAbsorbs) {
  Rng rng(1);
  const auto g = GroupSpec::cyclic(9);
  EXPECT_NEAR(ruzsa_divergence(FinitePMF::uniform(g), random_pmf(g, 1.0, rng)).nats, 0.0, 1e-14);
}

TEST(RuzsaDivergence, ClosedFormAnchors) {
  const Density n = ParametricDensity::standard_gaussian(1);
  EXPECT_NEAR(ruzsa_divergence(n, n).nats, 0.5 * std::log(2.0), 1e-12);
  const Density e = ParametricDensity::exponential(1.0);
  EXPECT_NEAR(ruzsa_divergence(e, e).nats, std::log(2.0), 1e-12);
}

TEST(RuzsaDivergence, NonnegativeAndCrossChecked) {
  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const auto g = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 30));
    const auto v = ruzsa_divergence(random_pmf_mixed(g, rng), random_pmf_mixed(g, rng));
    ASSERT_GE(v.nats, -1e-10);
    ASSERT_NEAR(v.nats, v.cross_check, 1e-10);
  }
}

TEST(RuzsaDivergence, UnimodularCorollary) {
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const auto g2 = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 7)).power(2);
    const auto x = random_pmf(g2, 1.0, rng), y = random_pmf(g2, 1.0, rng);
    const IntegerMatrix a = random_gl2z(rng);
    ASSERT_NEAR(ruzsa_divergence(x, push(y, a)).nats, ruzsa_divergence(push(x, a.inverse()), y).nats, 1e-10);
  }
  const auto z7 = GroupSpec::cyclic(7);
  const auto x = random_pmf(z7, 1.0, rng), y = random_pmf(z7, 1.0, rng);
  EXPECT_NEAR(ruzsa_divergence(x, y.negated()).nats, ruzsa_divergence(x.negated(), y).nats, 1e-12);
}

TEST(ConditionalRuzsa, Examples) {
  const auto z3 = GroupSpec::cyclic(3);
  const std::vector<FinitePMF> indep = {FinitePMF::uniform(z3), FinitePMF(z3, {0.2, 0.3, 0.5}),
                                        FinitePMF(z3, {0.1, 0.1, 0.8})};
  EXPECT_NEAR(conditional_ruzsa_divergence(JointPMF::product(indep)).nats, 0.0, 1e-14);

  const auto z2 = GroupSpec::cyclic(2);
  const JointPMF same = markov_triple(JointPMF::from_matrix(z2, z2, {0.5, 0.0, 0.0, 0.5}));
  EXPECT_NEAR(conditional_ruzsa_divergence(same).nats, 0.0, 1e-14);

  // Given Y, X1 and X2 are i.i.d. (0.8, 0.2) up to a shift: X1 - X2 is 0 with
  // probability 0.68.
  const RuzsaValue v = conditional_ruzsa_divergence(markov_triple(correlated_z2()));
  EXPECT_NEAR(v.nats, h2(0.68) - h2(0.8), 1e-14);
  EXPECT_NEAR(v.cross_check, v.nats, 1e-10);
  EXPECT_EQ(v.kind, RuzsaKind::Conditional);
}

TEST(ConditionalRuzsa, RejectsNonMarkov) {
  const auto z2 = GroupSpec::cyclic(2);
  // X1 = X2 regardless of Y.
  std::vector<double> t(8, 0.0);
  t[0] = t[2] = t[5] = t[7] = 0.25;
  EXPECT_THROW(conditional_ruzsa_divergence(JointPMF({z2, z2, z2}, t)), PreconditionError);
}

TEST(ConditionalRuzsa, ConditioningDecomposition) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto g = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 7));
    const auto gy = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 4));
    const FinitePMF x1 = random_pmf(g, 1.0, rng);
    const JointPMF yx2 = random_joint({gy, g}, rng);
    std::vector<double> w;
    for (double a : x1.probs())
      for (double b : yx2.tensor()) w.push_back(a * b);
    const JointPMF j({g, gy, g}, w);
    const double lhs = ruzsa_divergence(x1, yx2.marginal_pmf(1)).nats;
    const double rhs = conditional_ruzsa_divergence(j, 0, 2, vars({1})).nats +
                       mutual_information(j, vars({1}), {LinearForm::diff(0, 2)});
    ASSERT_NEAR(lhs, rhs, 1e-10);
  }
}

TEST(RuzsaDifference, Examples) {
  Rng rng(5);
  const auto g = GroupSpec::cyclic(6);
  const auto p = random_pmf(g, 1.0, rng), q = random_pmf(g, 1.0, rng);
  const std::vector<FinitePMF> f = {p, q};
  EXPECT_NEAR(ruzsa_difference(JointPMF::product(f)).nats, ruzsa_divergence(p, q).nats, 1e-12);

  std::vector<double> diag(36, 0.0);
  for (std::size_t i = 0; i < 6; ++i) diag[7 * i] = p[i];
  const JointPMF same = JointPMF::from_matrix(g, g, diag);
  EXPECT_NEAR(ruzsa_difference(same).nats, -entropy(p).nats, 1e-14);

  const RuzsaValue d = ruzsa_difference(correlated_z2());
  EXPECT_NEAR(d.nats, h2(0.8) - std::log(2.0), 1e-14);
  EXPECT_NEAR(d.cross_check, d.nats, 1e-10);
  EXPECT_LT(d.nats, 0.0);
}

TEST(Sigma, GaussianIsOne) {
  const Density n = ParametricDensity::standard_gaussian(3);
  EXPECT_NEAR(sigma(n, Sign::Plus).value, 1.0, 1e-12);
  EXPECT_NEAR(sigma(n, Sign::Minus).value, 1.0, 1e-12);
}

TEST(Sigma, ExponentialClosedForms) {
  const Density e = ParametricDensity::exponential(1.0);
  const SigmaValue minus = difference_constant(e);
  EXPECT_NEAR(minus.value, 2.0, 1e-8);
  EXPECT_NEAR(minus.via_identity / minus.value, 1.0, 1e-8);
  const SigmaValue plus = doubling_constant(e);
  // h(Gamma(2, 1)) = 1 + Euler's constant.
  EXPECT_NEAR(plus.value, 0.5 * std::exp(2.0 * std::numbers::egamma), 1e-6);
  EXPECT_NEAR(plus.value, 1.586109, 1e-6);
  EXPECT_NEAR(plus.via_identity / plus.value, 1.0, 1e-8);
}

TEST(Sigma, ScaleInvariant) {
  const double a = sigma(ParametricDensity::exponential(1.0), Sign::Plus).value;
  const double b = sigma(ParametricDensity::exponential(7.5), Sign::Plus).value;
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(Sigma, LowerBoundOnGrids) {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const GridDensity g = t % 2 ? random_logconcave_grid(256, rng) : random_lattice_grid(8, 4, rng);
    ASSERT_GE(sigma(g, Sign::Plus).value, 1.0 - 1e-6);
    ASSERT_GE(sigma(g, Sign::Minus).value, 1.0 - 1e-6);
  }
}

TEST(Sigma, RejectsFinite) {
  EXPECT_THROW(sigma(FinitePMF::uniform(GroupSpec::cyclic(4)), Sign::Plus), DomainError);
}
