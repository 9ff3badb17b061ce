#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruzsa/checks.hpp"
#include "ruzsa/ensemble.hpp"

namespace ruzsa {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportVersion = 1;

// Inputs come from exactly one source: a named built-in example, an inputs
// file, a list of density files, inline inputs, or a generator.
struct CampaignEntry {
  std::string check;
  std::string example;
  std::filesystem::path inputs_file;
  std::vector<std::filesystem::path> density_files;
  std::optional<CheckInputs> inputs;
  std::optional<GeneratorSpec> generator;
  std::size_t trials = 1;
  std::optional<double> tolerance;
};

struct Campaign {
  std::uint64_t seed = 1;
  std::optional<double> tolerance;
  std::vector<CampaignEntry> entries;
  std::string out;

  // Relative file paths are resolved against `base`.
  static Campaign from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
};

Campaign load_campaign(const std::filesystem::path& path);
// "paper-suite": every registered check on built-in examples.
Campaign builtin_campaign(const std::string& name);

std::vector<std::string> builtin_example_names();
CheckInputs builtin_example(const std::string& name);

// The report document plus the process exit status it implies:
// 0 when no theorem-status check failed, 1 otherwise.
struct Report {
  nlohmann::json document;
  int exit_code = 0;
};

Report run_campaign(const Campaign& campaign, unsigned threads = 1);
Report scan_report(const std::string& check, const GeneratorSpec& gen, std::size_t trials, std::uint64_t seed,
                   const EnsembleOptions& options = {});
// The three determinant checks on random positive-definite matrices.
Report det_report(int dimension, std::size_t trials, std::uint64_t seed, const EnsembleOptions& options = {});

// Reference values for Gaussian, exponential and uniform laws.
nlohmann::json reference_table();
std::string reference_table_text(const nlohmann::json& table);

// One row per result: name, status, verdict, lhs, rhs, slack, tolerance, digest, reference.
std::string results_csv(const nlohmann::json& report);

// Stamps wall-clock data into the separate "run" block.
void stamp_run(nlohmann::json& report, double wall_seconds);

}  // namespace ruzsa
