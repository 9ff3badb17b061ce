#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruzsa/checks.hpp"

namespace ruzsa {

enum class Objective { MaximizeSigmaMinus, MaximizeSigmaPlus, MinimizeSlack };
enum class SearchSpace { Simplex, LogConcaveGrid, Parametric };
enum class SearchMethod { NelderMead, ProjectedGradient, SimulatedAnnealing };

std::string to_string(Objective o);
std::string to_string(SearchSpace s);
std::string to_string(SearchMethod m);

struct SearchProblem {
  Objective objective = Objective::MaximizeSigmaMinus;
  std::string check;  // MinimizeSlack only
  SearchSpace space = SearchSpace::LogConcaveGrid;
  std::int64_t modulus = 8;   // simplex over Z_m
  std::size_t knots = 64;     // log-concave grid: knots of the piecewise-linear log-density
  std::size_t cells = 1024;   // log-concave grid: cells on [0, 1]
  std::string family = "gamma";  // parametric: gamma (shape >= 1) or laplace
  std::vector<std::int64_t> integers;  // passed through to the check
  std::vector<double> reals;

  nlohmann::json to_json() const;
  static SearchProblem from_json(const nlohmann::json& j);
};

struct SearchConfig {
  SearchMethod method = SearchMethod::ProjectedGradient;
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
  std::size_t max_evaluations = 10000;  // per restart
  double time_budget_seconds = 0.0;     // per restart; 0 disables
  unsigned threads = 1;

  nlohmann::json to_json() const;
  static SearchConfig from_json(const nlohmann::json& j);
};

struct RestartTrace {
  std::uint64_t seed = 0;
  // Best objective after every accepted step; non-decreasing.
  std::vector<double> accepted;
  std::size_t evaluations = 0;
  double best = 0.0;
  std::string termination;
};

struct SearchTrace {
  SearchProblem problem;
  SearchConfig config;
  std::vector<RestartTrace> restarts;
  double best_value = 0.0;           // internal maximization scale: sigma, or -slack
  double best_objective = 0.0;       // sigma, or slack for MinimizeSlack
  double confirmed_objective = 0.0;  // recomputed at twice the resolution
  bool violation_confirmed = false;  // theorem violated at both resolutions
  std::vector<double> best_point;    // parameters after projection
  CheckInputs best_inputs;           // densities at the best point
  std::string termination;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;  // wall-clock time sits under "timing"
  std::string to_csv() const;      // restart,iteration,objective
};

SearchTrace optimize(const SearchProblem& problem, const SearchConfig& config);

// Concave projection of a sequence: its first differences are made
// non-increasing by pool-adjacent-violators, then re-integrated keeping the
// mean. Idempotent.
std::vector<double> project_concave(const std::vector<double>& values);

// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(const std::vector<double>& v);

// Grid on [0, 1) whose log-density interpolates `knot_values` linearly
// between equally spaced knots at 0 and 1.
GridDensity knot_grid(const std::vector<double>& knot_values, std::size_t cells);

}  // namespace ruzsa
