#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ruzsa/density_io.hpp"
#include "ruzsa/entropy.hpp"
#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"
#include "ruzsa/joint_pmf.hpp"

using namespace ruzsa;

namespace {

const std::vector<double> kCorrelated = {0.4, 0.1, 0.1, 0.4};

JointPMF correlated_z2() {
  const auto z2 = GroupSpec::cyclic(2);
  return JointPMF::from_matrix(z2, z2, kCorrelated);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ruzsa_test_" + name);
}

}  // namespace

TEST(FinitePMF, Validation) {
  const auto z3 = GroupSpec::cyclic(3);
  EXPECT_NO_THROW(FinitePMF(z3, {0.2, 0.3, 0.5}));
  EXPECT_THROW(FinitePMF(z3, {0.3, 0.3, 0.3}), ValidationError);
  EXPECT_THROW(FinitePMF(z3, {-0.1, 0.6, 0.5}), ValidationError);
  EXPECT_THROW(FinitePMF(z3, {0.5, 0.5}), ValidationError);
  EXPECT_TRUE(FinitePMF::point_mass(z3, 1).is_point_mass());
}

TEST(JointPMF, Marginals) {
  Rng rng(3);
  const auto p = random_pmf(GroupSpec::cyclic(5), 1.0, rng);
  const auto q = random_pmf(GroupSpec::cyclic(3), 1.0, rng);
  const std::vector<FinitePMF> f = {p, q};
  const JointPMF j = JointPMF::product(f);
  const FinitePMF m0 = j.marginal_pmf(0);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(m0[i], p[i], 1e-15);

  const auto z2 = GroupSpec::cyclic(2);
  const JointPMF u = JointPMF::from_matrix(z2, z2, {0.25, 0.25, 0.25, 0.25});
  EXPECT_DOUBLE_EQ(u.marginal_pmf(1)[0], 0.5);

  const JointPMF d = JointPMF::from_matrix(z2, z2, {0.5, 0.0, 0.0, 0.5});
  EXPECT_DOUBLE_EQ(d.marginal_pmf(0)[0], 0.5);
  EXPECT_DOUBLE_EQ(d.marginal_pmf(0)[1], 0.5);
  EXPECT_THROW(d.marginal({}), ValidationError);
}

TEST(JointPMF, ConditionThenMixReconstructs) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto g = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 7));
    const JointPMF j = random_joint({g, g}, rng);
    const JointPMF back = mix(condition_on(j, {0}));
    ASSERT_EQ(back.size(), j.size());
    for (std::size_t i = 0; i < j.size(); ++i) ASSERT_NEAR(back.tensor()[i], j.tensor()[i], 1e-12);
  }
}

TEST(MarkovTriple, ProductCase) {
  const auto z3 = GroupSpec::cyclic(3);
  const FinitePMF p(z3, {0.2, 0.3, 0.5});
  const FinitePMF q(z3, {0.6, 0.3, 0.1});
  const std::vector<FinitePMF> f = {p, q};
  const JointPMF t = markov_triple(JointPMF::product(f));
  const std::vector<FinitePMF> expected = {p, q, p};
  const JointPMF e = JointPMF::product(expected);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(t.tensor()[i], e.tensor()[i], 1e-15);
}

TEST(MarkovTriple, DeterministicCase) {
  const auto z2 = GroupSpec::cyclic(2);
  const JointPMF t = markov_triple(JointPMF::from_matrix(z2, z2, {0.3, 0.0, 0.0, 0.7}));
  // Index (x1, y, x2) = 4 x1 + 2 y + x2.
  EXPECT_NEAR(t.tensor()[0], 0.3, 1e-15);
  EXPECT_NEAR(t.tensor()[7], 0.7, 1e-15);
}

TEST(MarkovTriple, CorrelatedTensor) {
  const JointPMF t = markov_triple(correlated_z2());
  for (int x1 = 0; x1 < 2; ++x1)
    for (int y = 0; y < 2; ++y)
      for (int x2 = 0; x2 < 2; ++x2) {
        // p(y) = 1/2, p(x|y) = 0.8 on the diagonal.
        const double c1 = x1 == y ? 0.8 : 0.2, c2 = x2 == y ? 0.8 : 0.2;
        EXPECT_NEAR(t.tensor()[4 * x1 + 2 * y + x2], 0.5 * c1 * c2, 1e-15);
      }
  EXPECT_NEAR(conditional_mutual_information(t, vars({0}), vars({2}), vars({1})), 0.0, 1e-10);
}

TEST(MarkovTriple, RandomJointsAreMarkov) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto g = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 6));
    const JointPMF tr = markov_triple(random_joint({g, g}, rng));
    ASSERT_NEAR(conditional_mutual_information(tr, vars({0}), vars({2}), vars({1})), 0.0, 1e-10);
  }
}

TEST(MarkovChain4, PairMarginals) {
  const JointPMF pxy = correlated_z2();
  const JointPMF c = markov_chain4(pxy);  // (X2, Y1, X1, Y2)
  for (const auto& axes : {std::vector<std::size_t>{0, 1}, {2, 1}, {2, 3}}) {
    const JointPMF m = c.marginal(axes);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(m.tensor()[i], kCorrelated[i], 1e-12);
  }
  EXPECT_NEAR(conditional_mutual_information(c, vars({0}), vars({2, 3}), vars({1})), 0.0, 1e-10);
  EXPECT_NEAR(conditional_mutual_information(c, vars({0, 1}), vars({3}), vars({2})), 0.0, 1e-10);
}

TEST(MarkovChain4, ExtremeCases) {
  const auto z2 = GroupSpec::cyclic(2);
  const JointPMF same = markov_chain4(JointPMF::from_matrix(z2, z2, {0.5, 0.0, 0.0, 0.5}));
  EXPECT_NEAR(same.tensor()[0], 0.5, 1e-15);
  EXPECT_NEAR(same.tensor()[15], 0.5, 1e-15);
  const JointPMF indep = markov_chain4(JointPMF::from_matrix(z2, z2, {0.06, 0.14, 0.24, 0.56}));
  EXPECT_NEAR(mutual_information(indep, vars({0, 1}), vars({2, 3})), 0.0, 1e-12);
}

TEST(Generators, LogConcaveValidator) {
  EXPECT_TRUE(is_discrete_logconcave(std::vector<double>{0.0, 1.0, 0.0}));
  std::vector<double> g;
  for (int k = -10; k <= 10; ++k) g.push_back(std::exp(-0.5 * k * k));
  EXPECT_TRUE(is_discrete_logconcave(g));
  EXPECT_FALSE(is_discrete_logconcave(std::vector<double>{0.4, 0.1, 0.4}));
  EXPECT_FALSE(is_discrete_logconcave(std::vector<double>{0.5, 0.0, 0.5}));
}

TEST(Generators, LogConcaveOutputsPassValidator) {
  Rng rng(99);
  for (int t = 0; t < 10000; ++t) {
    const auto p = random_logconcave_pmf(3 + rng() % 62, rng);
    ASSERT_TRUE(is_discrete_logconcave(p.probs()));
  }
  for (int t = 0; t < 500; ++t) {
    const auto g = random_logconcave_grid(256, rng);
    ASSERT_TRUE(is_discrete_logconcave(g.masses()));
  }
}

TEST(Generators, DeterministicFromSeed) {
  Rng a(42), b(42);
  EXPECT_EQ(random_pmf(GroupSpec::cyclic(9), 0.5, a), random_pmf(GroupSpec::cyclic(9), 0.5, b));
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
}

TEST(DensityIO, RoundTripBitIdentical) {
  Rng rng(4);
  const Density p = random_pmf(GroupSpec::finite({3, 4}), 1.0, rng);
  const auto path = temp_file("roundtrip.json");
  write_density(path, p);
  const Density back = read_density(path);
  EXPECT_EQ(std::get<FinitePMF>(back), std::get<FinitePMF>(p));

  const Density grid = random_logconcave_grid(64, rng);
  write_density(path, grid);
  const auto g2 = std::get<GridDensity>(read_density(path));
  const auto& g1 = std::get<GridDensity>(grid);
  ASSERT_EQ(g1.total_cells(), g2.total_cells());
  for (std::size_t i = 0; i < g1.total_cells(); ++i) EXPECT_EQ(g1.masses()[i], g2.masses()[i]);

  const Density gauss = ParametricDensity::standard_gaussian(2);
  EXPECT_EQ(density_to_json(density_from_json(density_to_json(gauss))), density_to_json(gauss));
  std::filesystem::remove(path);
}

TEST(DensityIO, RejectsBadFiles) {
  const auto path = temp_file("bad.json");
  auto write = [&](const std::string& s) { std::ofstream(path) << s; };
  const std::string head = R"({"version": 1, "type": "finite", "group": {"kind": "finite", "moduli": [3]}, )";

  write(head + R"("probs": [0.3, 0.3, 0.3]})");
  EXPECT_THROW(read_density(path), ValidationError);
  write(head + R"("probs": [-0.2, 0.6, 0.6]})");
  EXPECT_THROW(read_density(path), ValidationError);
  write(head + R"("probs": [0.3, 0.3)");
  try {
    read_density(path);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST(DensityIO, MassesCsv) {
  const Density p = FinitePMF::uniform(GroupSpec::cyclic(2));
  const std::string csv = masses_csv(p);
  EXPECT_NE(csv.find("0.5"), std::string::npos);
}
