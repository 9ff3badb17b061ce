#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "ruzsa/checks.hpp"
#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"
#include "ruzsa/report.hpp"

using namespace ruzsa;

namespace {

CheckInputs densities(std::vector<Density> d) {
  CheckInputs in;
  in.densities = std::move(d);
  return in;
}

Eigen::MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

}  // namespace

TEST(Registry, ThirtyUniqueChecks) {
  const auto& reg = check_registry();
  EXPECT_EQ(reg.size(), 30u);
  std::set<std::string> names;
  for (const auto& c : reg) {
    names.insert(c.name);
    EXPECT_FALSE(c.reference.empty()) << c.name;
    EXPECT_FALSE(c.statement.empty()) << c.name;
  }
  EXPECT_EQ(names.size(), reg.size());
  EXPECT_EQ(find_check("conjecture_sd").status, CheckStatus::Conjecture);
  EXPECT_EQ(find_check("discrete_sd_ratio").status, CheckStatus::Observational);
  EXPECT_THROW(find_check("no_such_check"), ValidationError);
}

TEST(CheckResult, PassMeansSlackAboveTolerance) {
  const CheckResult r = run_check("ruzsa_triangle", builtin_example("random-z8-triple"));
  EXPECT_EQ(r.pass, r.slack >= -r.tolerance);
  EXPECT_DOUBLE_EQ(r.slack, r.rhs - r.lhs);
  EXPECT_EQ(r.tolerance, 1e-9);
  EXPECT_FALSE(r.digest.empty());
  const CheckResult again = run_check("ruzsa_triangle", builtin_example("random-z8-triple"));
  EXPECT_EQ(r.to_json(), again.to_json());
}

TEST(CheckResult, ToleranceOverride) {
  CheckOptions o;
  o.tolerance = 0.5;
  EXPECT_EQ(run_check("ruzsa_triangle", builtin_example("random-z8-triple"), o).tolerance, 0.5);
}

TEST(Checks, TriangleEqualityAtUniformZ2) {
  const CheckResult r = run_check("ruzsa_triangle", builtin_example("uniform-z2-triple"));
  EXPECT_NEAR(r.lhs, 0.0, 1e-15);
  EXPECT_NEAR(r.rhs, 0.0, 1e-15);
}

TEST(Checks, TriangleSharpRoutesAgree) {
  const CheckResult r = run_check("ruzsa_triangle_sharp", builtin_example("random-z8-triple"));
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.metadata.at("conditional_route_difference").get<double>(), 1e-12);
}

TEST(Checks, ArityAndDomainErrors) {
  EXPECT_THROW(run_check("sum_difference", builtin_example("random-z8-triple")), PreconditionError);
  EXPECT_THROW(run_check("ruzsa_triangle_sharp", builtin_example("gaussian-triple")), DomainError);
  EXPECT_THROW(run_check("reverse_epi_iid", densities({FinitePMF::uniform(GroupSpec::cyclic(4))})), DomainError);
  // Gamma with shape < 1 is not log-concave.
  EXPECT_THROW(run_check("reverse_epi_iid", densities({ParametricDensity::gamma(0.5, 1.0)})), PreconditionError);
}

TEST(Checks, DoublingRatioSkipsDegenerate) {
  const CheckResult r =
      run_check("doubling_difference_ratio", densities({FinitePMF::point_mass(GroupSpec::cyclic(5), 0)}));
  EXPECT_EQ(r.verdict, Verdict::Skipped);
  EXPECT_FALSE(r.skip_reason.empty());
}

TEST(Checks, UniformRatioIsOne) {
  const CheckResult r = run_check("doubling_difference_ratio", builtin_example("uniform-01-grid"));
  EXPECT_NEAR(r.metadata.at("ratio").get<double>(), 1.0, 1e-12);
}

TEST(Checks, WeightedSumTau) {
  const CheckResult r = run_check("weighted_sum_theorem", builtin_example("weighted-thm-z16"));
  // a = 3, b = 5: 6 (1 + 1 + 2).
  EXPECT_EQ(r.metadata.at("tau").get<double>(), 24.0);
  EXPECT_TRUE(r.pass);
}

TEST(Checks, WeightedSumLemmaVariant) {
  CheckInputs in = builtin_example("weighted-z16");
  EXPECT_EQ(run_check("weighted_sum_lemma", in).status, CheckStatus::Theorem);
  in.variant = "aX+bX'";
  EXPECT_EQ(run_check("weighted_sum_lemma", in).status, CheckStatus::Observational);
}

TEST(Checks, BallNguyenExponential) {
  const CheckResult r = run_check("ball_nguyen", builtin_example("ball-nguyen-exp"));
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.lhs, 0.41894, 1e-5);
  EXPECT_NEAR(r.rhs, 10.0 * std::log(1.586109), 1e-5);
}

TEST(Checks, EpiLowerEqualityForGaussian) {
  const CheckResult r = run_check("epi_lower", builtin_example("gaussian-1d"));
  EXPECT_NEAR(r.slack, 0.0, 1e-12);
  EXPECT_TRUE(r.pass);
}

TEST(Checks, ConjectureEqualityForExponential) {
  const CheckResult r = run_check("conjecture_sd", builtin_example("exp-1"));
  EXPECT_EQ(r.status, CheckStatus::Conjecture);
  EXPECT_NEAR(r.slack, 0.0, 1e-12);
}

TEST(Checks, Determinants) {
  CheckInputs in;
  in.matrices = {PDMatrix(diag({1.0, 4.0})), PDMatrix(diag({4.0, 1.0}))};
  const CheckResult mink = run_check("det_minkowski", in);
  // det(A+B)^(1/2) = 5 >= 2 + 2.
  EXPECT_NEAR(mink.lhs, 4.0, 1e-12);
  EXPECT_NEAR(mink.rhs, 5.0, 1e-12);
  const CheckResult rot = run_check("det_rotfeld", in);
  EXPECT_NEAR(rot.lhs, 36.0, 1e-12);
  EXPECT_NEAR(rot.rhs, 100.0, 1e-12);
  EXPECT_EQ(rot.tolerance, 1e-9 * 100.0);

  const CheckResult sum = run_check("det_sum", builtin_example("identity-2-triple"));
  EXPECT_NEAR(sum.lhs, 9.0, 1e-12);
  EXPECT_NEAR(sum.rhs, 16.0, 1e-12);
  EXPECT_LE(sum.metadata.at("route_relative_difference").get<double>(), 1e-9);
}

TEST(Checks, SumsetTriangle) {
  CheckInputs in;
  in.set_group = GroupSpec::cyclic(5);
  in.sets = {{0, 1}, {0, 2}, {0, 1}};
  const CheckResult r = run_check("sumset_triangle", in);
  EXPECT_EQ(r.lhs, 6.0);
  EXPECT_EQ(r.rhs, 16.0);
}

TEST(Checks, CondRuzsaBoundNeedsMarkov) {
  const auto z2 = GroupSpec::cyclic(2);
  std::vector<double> t(8, 0.0);
  t[0] = t[2] = t[5] = t[7] = 0.25;
  CheckInputs in;
  in.joints.push_back(JointPMF({z2, z2, z2}, t));
  EXPECT_THROW(run_check("cond_ruzsa_bound", in), PreconditionError);
}

TEST(Checks, MultiplicativeRoutesAgree) {
  const CheckResult closed = run_check("multiplicative_pair", builtin_example("lognormal-01"));
  const CheckResult grid = run_check("multiplicative_pair", builtin_example("lognormal-01-grid"));
  ASSERT_EQ(closed.parts.size(), grid.parts.size());
  for (std::size_t i = 0; i < closed.parts.size(); ++i) {
    EXPECT_NEAR(closed.parts[i].lhs, grid.parts[i].lhs, 5e-3);
    EXPECT_NEAR(closed.parts[i].rhs, grid.parts[i].rhs, 5e-3);
  }
}

TEST(Checks, CoverZhangComonotoneEquality) {
  const CheckResult r = run_check("cover_zhang", builtin_example("coupling-comonotone"));
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.metadata.at("marginal_error").get<double>(), 1e-9);
}

TEST(Checks, JsonHasReference) {
  const nlohmann::json j = run_check("submodularity", builtin_example("random-z8-triple")).to_json();
  for (const char* key : {"name", "reference", "status", "verdict", "lhs", "rhs", "slack", "tolerance", "pass",
                          "inputs_digest", "metadata"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(CheckInputs, JsonRoundTrip) {
  for (const auto& name : builtin_example_names()) {
    const CheckInputs in = builtin_example(name);
    EXPECT_EQ(CheckInputs::from_json(in.to_json()).to_json(), in.to_json()) << name;
  }
}

TEST(Checks, BsgRoutesAgree) {
  const CheckResult r = run_check("bsg", builtin_example("random-z6-joint"));
  EXPECT_LE(r.metadata.at("conditional_route_difference").get<double>(), 1e-12);
  EXPECT_LE(r.metadata.at("markov_residual").get<double>(), 1e-10);
}
