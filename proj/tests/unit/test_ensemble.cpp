#include <gtest/gtest.h>

#include "ruzsa/ensemble.hpp"
#include "ruzsa/error.hpp"

using namespace ruzsa;

TEST(Ensemble, DeterministicAcrossThreads) {
  EnsembleOptions one, four;
  four.threads = 4;
  const auto a = run_ensemble("sum_difference", {}, 200, 7, one);
  const auto b = run_ensemble("sum_difference", {}, 200, 7, four);
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_EQ(a.evaluated + a.skipped, 200u);
  EXPECT_EQ(a.violations, 0u);
}

TEST(Ensemble, SeedChangesInputs) {
  const auto a = run_ensemble("ruzsa_triangle", {}, 20, 1);
  const auto b = run_ensemble("ruzsa_triangle", {}, 20, 2);
  EXPECT_NE(a.argmin_digest, b.argmin_digest);
}

TEST(Ensemble, ArgminReplays) {
  const auto e = run_ensemble("subadditivity", {}, 50, 3);
  const CheckResult r = run_check("subadditivity", e.argmin_inputs);
  EXPECT_EQ(r.digest, e.argmin_digest);
  EXPECT_EQ(r.slack, e.min_slack);
}

TEST(Ensemble, IncompatibleGenerator) {
  GeneratorSpec g;
  g.family = "pd-matrix";
  EXPECT_THROW(run_ensemble("ruzsa_triangle", g, 10, 1), ValidationError);
  g.family = "no-such-family";
  EXPECT_THROW(run_ensemble("ruzsa_triangle", g, 10, 1), ValidationError);
}

TEST(Ensemble, CompatibleFamilies) {
  const auto fams = compatible_families(find_check("reverse_epi_iid"));
  EXPECT_NE(std::find(fams.begin(), fams.end(), "logconcave-grid"), fams.end());
  EXPECT_EQ(std::find(fams.begin(), fams.end(), "finite-pmf"), fams.end());
}

TEST(Ensemble, GeneratorJsonRoundTrip) {
  GeneratorSpec g;
  g.family = "markov-joint";
  g.m_max = 16;
  g.cells = 128;
  EXPECT_EQ(GeneratorSpec::from_json(g.to_json()).to_json(), g.to_json());
}

TEST(Ensemble, ContinuousFamiliesRun) {
  struct Case {
    const char* check;
    const char* family;
  };
  for (const auto& c : {Case{"reverse_epi_iid", "logconcave-grid"}, Case{"gauss_distance", "logconcave-grid"},
                        Case{"circle_ratio", "circle-grid"}, Case{"multiplicative_pair", "positive-grid"},
                        Case{"complex_pair", "complex-grid"}, Case{"cover_zhang", "coupling"},
                        Case{"epi_lower", "gaussian"}, Case{"det_rotfeld", "pd-matrix"},
                        Case{"sumset_triangle", "sets"}, Case{"bsg", "markov-joint"}}) {
    GeneratorSpec g;
    g.family = c.family;
    g.m_max = 8;
    const auto e = run_ensemble(c.check, g, 10, 5);
    EXPECT_EQ(e.errors, 0u) << c.check << ": " << e.first_error;
    EXPECT_EQ(e.evaluated + e.skipped, 10u) << c.check;
  }
}
