#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ruzsa/density_io.hpp"
#include "ruzsa/error.hpp"
#include "ruzsa/report.hpp"

using namespace ruzsa;
using nlohmann::json;

namespace {

json strip_run(json doc) {
  doc.erase("run");
  return doc;
}

}  // namespace

TEST(Campaign, BuiltinSuiteCoversEveryCheck) {
  const Campaign c = builtin_campaign("paper-suite");
  std::set<std::string> covered;
  for (const auto& e : c.entries) covered.insert(e.check);
  for (const auto& spec : check_registry()) EXPECT_TRUE(covered.count(spec.name)) << spec.name;
}

TEST(Campaign, BuiltinSuitePasses) {
  const Report r = run_campaign(builtin_campaign("paper-suite"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.document.at("summary").at("fail"), 0);
  EXPECT_GT(r.document.at("summary").at("pass").get<int>(), 30);
  for (const auto& row : r.document.at("results")) EXPECT_FALSE(row.at("reference").get<std::string>().empty());
}

TEST(Campaign, ReplayIsIdentical) {
  json j = {{"seed", 5},
            {"entries",
             {{{"check", "ruzsa_triangle"}, {"generator", "finite-pmf"}, {"trials", 30}},
              {{"check", "epi_lower"}, {"example", "exp-1"}}}}};
  const Campaign c = Campaign::from_json(j);
  Report a = run_campaign(c), b = run_campaign(c, 3);
  stamp_run(a.document, 1.0);
  stamp_run(b.document, 2.0);
  EXPECT_EQ(strip_run(a.document), strip_run(b.document));
  EXPECT_EQ(a.document.at("version"), kReportVersion);
  EXPECT_EQ(a.document.at("tool_version"), kToolVersion);
  EXPECT_EQ(a.document.at("seed"), 5);
}

TEST(Campaign, EmptyWarns) {
  const Report r = run_campaign(Campaign::from_json(json{{"entries", json::array()}}));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.document.at("results").empty());
  EXPECT_FALSE(r.document.at("warnings").empty());
}

TEST(Campaign, MalformedEntries) {
  EXPECT_THROW(Campaign::from_json(json{{"entries", {{{"check", "ruzsa_triangle"}}}}}), ParseError);
  EXPECT_THROW(Campaign::from_json(json{{"entries", {{{"check", "nope"}, {"example", "exp-1"}}}}}), ParseError);
  EXPECT_THROW(builtin_campaign("other"), ParseError);
  EXPECT_THROW(builtin_example("other"), ParseError);
}

TEST(Campaign, CorruptDensityFileNamesPath) {
  const auto dir = std::filesystem::temp_directory_path() / "ruzsa_campaign_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "p.json") << R"({"version": 1, "type": "finite", "group": {"kind": "finite", "moduli": [2]},
                                       "probs": [0.7, 0.7]})";
  std::ofstream(dir / "c.json") << R"({"entries": [{"check": "epi_lower", "density_files": ["p.json"]}]})";
  const Campaign c = load_campaign(dir / "c.json");
  try {
    run_campaign(c);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("p.json"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST(Report, DetSuite) {
  const Report r = det_report(3, 500, 1);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.document.at("ensembles").size(), 3u);
  for (const auto& e : r.document.at("ensembles")) EXPECT_EQ(e.at("violations"), 0);
}

TEST(Report, ScanRatioRange) {
  GeneratorSpec g;
  g.family = "logconcave-grid";
  const Report r = scan_report("doubling_difference_ratio", g, 100, 7);
  const auto& range = r.document.at("ensembles").at(0).at("metadata_range").at("ratio");
  EXPECT_GE(range.at(0).get<double>(), 0.5);
  EXPECT_LE(range.at(1).get<double>(), 2.0);
}

TEST(Report, ReferenceTable) {
  const json t = reference_table();
  const std::string text = reference_table_text(t);
  EXPECT_NE(text.find("Exp(1): σ₋ = 2.000"), std::string::npos);
  EXPECT_NE(text.find("N(0,1): σ₋ = 1.000"), std::string::npos);
  EXPECT_NE(text.find("closed-form"), std::string::npos);
  EXPECT_NE(text.find("grid"), std::string::npos);
}

TEST(Report, Csv) {
  const Report r = run_campaign(Campaign::from_json(json{{"entries", {{{"check", "epi_lower"}, {"example", "exp-1"}}}}}));
  const std::string csv = results_csv(r.document);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,status,verdict,lhs,rhs,slack,tolerance,digest,reference");
  EXPECT_NE(csv.find("epi_lower,theorem,PASS"), std::string::npos);
}
