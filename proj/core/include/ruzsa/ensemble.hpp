#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruzsa/checks.hpp"
#include "ruzsa/generators.hpp"

namespace ruzsa {

// Random input family for ensemble runs. Families:
//   finite-pmf       pmfs on Z_m (m drawn from [m_min, m_max]), point masses included
//   logconcave-pmf   discrete log-concave pmfs on Z_m
//   markov-joint     joints on Z_m for the joint-law checks (m <= 16 recommended)
//   lattice-grid     pmfs on {0..m-1} embedded as grids on R
//   logconcave-grid  1-D log-concave grids with `cells` cells
//   gaussian         parametric Gaussians on R^dimension
//   exponential      parametric exponentials
//   pd-matrix        positive-definite dimension x dimension matrices
//   sets             nonempty subsets of Z_m
//   circle-grid      wrapped Gaussians on the circle
//   positive-grid    log-concave laws of log X on the multiplicative half-line
//   complex-grid     product laws of (log|Z|, arg Z) on C^x
//   coupling         log-concave grid plus a coupling of two copies of it
struct GeneratorSpec {
  std::string family = "finite-pmf";
  std::int64_t m_min = 4;
  std::int64_t m_max = 64;
  int dimension = 1;
  std::size_t cells = 256;
  int operands = 0;  // count for variable-arity checks; 0 draws 2..4

  nlohmann::json to_json() const;
  static GeneratorSpec from_json(const nlohmann::json& j);
};

// Families that can feed a check; generator/check incompatibility is a ValidationError.
std::vector<std::string> compatible_families(const CheckSpec& check);

CheckInputs generate_inputs(const CheckSpec& check, const GeneratorSpec& gen, Rng& rng);

struct EnsembleOptions {
  CheckOptions check;
  unsigned threads = 1;
};

struct EnsembleResult {
  std::string check;
  GeneratorSpec generator;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t violations = 0;  // FAIL verdicts after the resolution retry
  std::size_t skipped = 0;
  std::size_t evaluated = 0;
  std::size_t errors = 0;      // trials whose evaluation threw
  std::string first_error;
  double min_slack = 0.0;
  double max_slack = 0.0;
  double max_tolerance = 0.0;
  std::size_t argmin_trial = 0;
  std::string argmin_digest;
  CheckInputs argmin_inputs;
  CheckResult argmin_result;
  // Range of every numeric metadata field seen, e.g. {"ratio": [min, max]}.
  nlohmann::json metadata_range = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// Trial t draws its inputs from derive_seed(seed, t), so the result does not
// depend on the thread count.
EnsembleResult run_ensemble(const std::string& check, const GeneratorSpec& gen, std::size_t trials,
                            std::uint64_t seed, const EnsembleOptions& options = {});

}  // namespace ruzsa
