#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"
#include "ruzsa/search.hpp"

using namespace ruzsa;

namespace {

bool concave(const std::vector<double>& v, double tol = 1e-12) {
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i + 1] - 2 * v[i] + v[i - 1] > tol) return false;
  return true;
}

}  // namespace

TEST(Projection, ConcaveIsIdempotent) {
  Rng rng(1);
  std::normal_distribution<double> n;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(3 + rng() % 60);
    for (auto& x : v) x = n(rng);
    const auto p = project_concave(v);
    ASSERT_TRUE(concave(p));
    const auto pp = project_concave(p);
    for (std::size_t i = 0; i < p.size(); ++i) ASSERT_NEAR(pp[i], p[i], 1e-12);
    // Mean is kept.
    ASSERT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), std::accumulate(v.begin(), v.end(), 0.0), 1e-9);
  }
  const std::vector<double> already = {0.0, 1.0, 1.5, 1.0, -1.0};
  EXPECT_EQ(project_concave(already), already);
}

TEST(Projection, Simplex) {
  const auto p = project_simplex({0.5, 2.0, -1.0});
  EXPECT_NEAR(p[0], 0.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0, 1e-15);
  EXPECT_NEAR(p[2], 0.0, 1e-15);
  const auto q = project_simplex({0.2, 0.3, 0.5});
  EXPECT_NEAR(q[0], 0.2, 1e-15);
  const auto r = project_simplex({1.0, 1.0});
  EXPECT_NEAR(r[0], 0.5, 1e-15);
}

TEST(Projection, KnotGridIsLogConcave) {
  const auto g = knot_grid(project_concave({0.0, 0.3, 0.1, -0.5, -2.0}), 256);
  EXPECT_EQ(g.total_cells(), 256u);
  EXPECT_TRUE(is_discrete_logconcave(g.masses(), 1e-9));
}

TEST(Search, DeterministicAndMonotone) {
  SearchProblem p;
  p.knots = 16;
  p.cells = 256;
  SearchConfig c;
  c.restarts = 2;
  c.max_evaluations = 300;
  c.seed = 9;
  const SearchTrace a = optimize(p, c);
  const SearchTrace b = optimize(p, c);
  EXPECT_EQ(a.best_point, b.best_point);
  EXPECT_EQ(a.best_objective, b.best_objective);
  for (const auto& r : a.restarts) {
    EXPECT_LE(r.evaluations, c.max_evaluations);
    for (std::size_t i = 1; i < r.accepted.size(); ++i) ASSERT_GE(r.accepted[i], r.accepted[i - 1]);
  }
  EXPECT_GT(a.best_objective, 1.0);
  EXPECT_FALSE(a.best_inputs.densities.empty());
  EXPECT_TRUE(a.to_json().contains("timing"));
  EXPECT_EQ(a.to_csv().substr(0, 26), "restart,iteration,objectiv");
}

TEST(Search, AllMethodsRespectConstraints) {
  for (SearchMethod m : {SearchMethod::NelderMead, SearchMethod::ProjectedGradient, SearchMethod::SimulatedAnnealing}) {
    SearchProblem p;
    p.objective = Objective::MaximizeSigmaPlus;
    p.knots = 12;
    p.cells = 256;
    SearchConfig c;
    c.method = m;
    c.restarts = 1;
    c.max_evaluations = 200;
    const SearchTrace t = optimize(p, c);
    const auto& g = std::get<GridDensity>(t.best_inputs.densities.at(0));
    EXPECT_TRUE(is_discrete_logconcave(g.masses(), 1e-9)) << to_string(m);
    EXPECT_LE(t.best_objective, 2.0 + 5e-3) << to_string(m);
  }
}

TEST(Search, TriangleSlackReachesZero) {
  SearchProblem p;
  p.objective = Objective::MinimizeSlack;
  p.check = "ruzsa_triangle";
  p.space = SearchSpace::Simplex;
  p.modulus = 8;
  SearchConfig c;
  c.method = SearchMethod::SimulatedAnnealing;
  c.restarts = 2;
  c.max_evaluations = 3000;
  const SearchTrace t = optimize(p, c);
  EXPECT_GE(t.best_objective, -1e-9);
  EXPECT_LE(t.best_objective, 1e-3);
  EXPECT_FALSE(t.violation_confirmed);
}

TEST(Search, ParametricGamma) {
  SearchProblem p;
  p.space = SearchSpace::Parametric;
  p.family = "gamma";
  SearchConfig c;
  c.restarts = 2;
  c.max_evaluations = 200;
  const SearchTrace t = optimize(p, c);
  // Gamma(1) is the exponential, the best log-concave gamma for sigma_-.
  EXPECT_NEAR(t.best_objective, 2.0, 1e-3);
}

TEST(Search, RejectsBadProblems) {
  SearchProblem p;
  p.objective = Objective::MinimizeSlack;
  EXPECT_THROW(optimize(p, {}), ValidationError);
  EXPECT_THROW(SearchProblem::from_json({{"objective", "minimize-slack"}}), ParseError);
  EXPECT_THROW(SearchProblem::from_json({{"space", "hilbert"}}), ParseError);
}
