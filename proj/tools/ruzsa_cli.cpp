#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ruzsa/density_io.hpp"
#include "ruzsa/error.hpp"
#include "ruzsa/report.hpp"
#include "ruzsa/search.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string out;
  std::string format = "json";
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_tolerance = true) {
  cmd->add_option("--seed", c.seed, "Master seed");
  if (with_tolerance) cmd->add_option("--tolerance", c.tolerance, "Absolute tolerance override");
  cmd->add_option("--out", c.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    ruzsa::write_text_file(c.out, text);
  }
}

std::string render(const Common& c, const json& doc) {
  return c.format == "csv" ? ruzsa::results_csv(doc) : doc.dump(2) + "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int finish(const Common& c, ruzsa::Report r, std::chrono::steady_clock::time_point t0) {
  ruzsa::stamp_run(r.document, seconds_since(t0));
  emit(c, render(c, r.document));
  const json& s = r.document.at("summary");
  std::cerr << "pass " << s.at("pass") << ", fail " << s.at("fail") << ", skipped " << s.at("skipped")
            << ", conjecture " << s.at("conjecture") << ", observational " << s.at("observational") << "\n";
  return r.exit_code;
}

// A generator is a family name or a path to a GeneratorSpec JSON file.
ruzsa::GeneratorSpec parse_generator(const std::string& arg) {
  if (fs::exists(arg)) return ruzsa::GeneratorSpec::from_json(ruzsa::read_json_file(arg));
  ruzsa::GeneratorSpec g;
  g.family = arg;
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of entropic Ruzsa-distance inequalities"};
  app.set_version_flag("--version", ruzsa::kToolVersion);
  app.require_subcommand(1);

  Common common;

  auto* verify = app.add_subcommand("verify", "Run a verification campaign");
  std::string campaign_path;
  std::string builtin;
  verify->add_option("--campaign", campaign_path, "Campaign JSON file");
  verify->add_option("--builtin", builtin, "Built-in campaign name (paper-suite)");
  add_common(verify, common);

  auto* scan = app.add_subcommand("scan", "Run one check over a random ensemble");
  std::string scan_check;
  std::string scan_gen = "finite-pmf";
  std::size_t trials = 1000;
  scan->add_option("check", scan_check, "Check name")->required();
  scan->add_option("--generator", scan_gen, "Generator family or GeneratorSpec JSON file");
  scan->add_option("--trials", trials, "Number of random instances");
  add_common(scan, common);

  auto* search = app.add_subcommand("search", "Search for extremal inputs");
  std::string problem_path;
  search->add_option("--campaign,--problem", problem_path, "Search file {problem, config}")->required();
  add_common(search, common, false);

  auto* det = app.add_subcommand("det", "Determinant inequality suite");
  int dimension = 3;
  std::size_t det_trials = 10000;
  det->add_option("--dimension", dimension, "Matrix dimension")->check(CLI::PositiveNumber);
  det->add_option("--trials", det_trials, "Matrices per check");
  add_common(det, common);

  auto* table = app.add_subcommand("table", "Reference values for classical laws");
  add_common(table, common, false);

  auto* examples = app.add_subcommand("examples", "List built-in example inputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*verify) {
      if (campaign_path.empty() == builtin.empty()) {
        std::cerr << "verify: give exactly one of --campaign or --builtin\n";
        return kExitUsage;
      }
      ruzsa::Campaign c = builtin.empty() ? ruzsa::load_campaign(campaign_path) : ruzsa::builtin_campaign(builtin);
      if (common.seed) c.seed = *common.seed;
      if (common.tolerance) c.tolerance = common.tolerance;
      if (common.out.empty() && !c.out.empty()) common.out = c.out;
      auto r = ruzsa::run_campaign(c, common.threads);
      r.document["command"] = "verify";
      for (const auto& w : r.document.at("warnings")) std::cerr << "warning: " << w.get<std::string>() << "\n";
      return finish(common, std::move(r), t0);
    }
    if (*scan) {
      ruzsa::EnsembleOptions eo;
      eo.threads = common.threads;
      eo.check.tolerance = common.tolerance;
      return finish(common,
                    ruzsa::scan_report(scan_check, parse_generator(scan_gen), trials, common.seed.value_or(1), eo),
                    t0);
    }
    if (*det) {
      ruzsa::EnsembleOptions eo;
      eo.threads = common.threads;
      eo.check.tolerance = common.tolerance;
      return finish(common, ruzsa::det_report(dimension, det_trials, common.seed.value_or(1), eo), t0);
    }
    if (*table) {
      json doc = ruzsa::reference_table();
      ruzsa::stamp_run(doc, seconds_since(t0));
      emit(common, common.format == "csv" ? ruzsa::reference_table_text(doc) : doc.dump(2));
      return 0;
    }
    if (*examples) {
      for (const auto& n : ruzsa::builtin_example_names()) std::cout << n << "\n";
      return 0;
    }
    if (*search) {
      const json file = ruzsa::read_json_file(problem_path);
      if (!file.is_object() || !file.contains("problem")) {
        throw ruzsa::ParseError(problem_path + ": expected {\"problem\": {...}, \"config\": {...}}");
      }
      const auto problem = ruzsa::SearchProblem::from_json(file.at("problem"));
      auto config = ruzsa::SearchConfig::from_json(file.value("config", json::object()));
      if (common.seed) config.seed = *common.seed;
      if (common.threads > 1) config.threads = common.threads;
      const ruzsa::SearchTrace trace = ruzsa::optimize(problem, config);

      json doc = trace.to_json();
      doc["schema"] = "ruzsa-search";
      doc["version"] = ruzsa::kReportVersion;
      doc["tool_version"] = ruzsa::kToolVersion;
      doc["command"] = "search";
      doc["seed"] = config.seed;
      const fs::path stem = common.out.empty() ? fs::path("search") : fs::path(common.out);
      const fs::path best = fs::path(stem).concat(".best.json");
      if (!trace.best_inputs.densities.empty()) {
        ruzsa::write_density(best, trace.best_inputs.densities.front());
        doc["best_density_file"] = best.string();
      }
      ruzsa::write_text_file(fs::path(stem).concat(".trace.json"), doc.dump(2));
      ruzsa::write_text_file(fs::path(stem).concat(".trace.csv"), trace.to_csv());
      std::cout << "best objective " << trace.best_objective << " (2x resolution " << trace.confirmed_objective
                << "), " << trace.termination << "\n";
      return trace.violation_confirmed ? 1 : 0;
    }
  } catch (const std::exception& e) {
    // Malformed input, bad options and unmet preconditions all land here.
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
