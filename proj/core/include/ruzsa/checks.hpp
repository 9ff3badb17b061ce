#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ruzsa/convolve.hpp"
#include "ruzsa/density.hpp"
#include "ruzsa/entropy.hpp"
#include "ruzsa/joint_pmf.hpp"
#include "ruzsa/matrix.hpp"

namespace ruzsa {

enum class CheckStatus { Theorem, Conjecture, Observational };
enum class Verdict { Pass, Fail, Skipped };

std::string to_string(CheckStatus s);
std::string to_string(Verdict v);

// Everything a check may consume. Unused slots stay empty.
struct CheckInputs {
  std::vector<Density> densities;
  std::vector<JointPMF> joints;
  std::vector<PDMatrix> matrices;
  std::vector<ElementSet> sets;
  std::optional<GroupSpec> set_group;
  std::vector<std::int64_t> integers;
  std::vector<double> reals;
  std::string variant;  // check-specific switch, e.g. the weighted-sum left side

  nlohmann::json to_json() const;
  static CheckInputs from_json(const nlohmann::json& j);
};

struct CheckOptions {
  std::optional<double> tolerance;  // overrides the per-path default
  ConvolutionOptions conv;
  bool retry = true;                // re-run grid violations at 2x resolution
};

// One inequality lhs <= rhs; checks with several displays report several.
struct CheckPart {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct CheckResult {
  std::string name;
  std::string reference;
  std::string statement;
  CheckStatus status = CheckStatus::Theorem;
  Verdict verdict = Verdict::Pass;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs of the binding part
  double tolerance = 0.0;
  bool pass = true;    // slack >= -tolerance for every part
  std::string digest;  // FNV-1a of the canonical inputs document
  std::string skip_reason;
  std::vector<CheckPart> parts;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// Result of evaluating a check once, before tolerances are applied.
enum class ToleranceClass { Exact, ClosedForm, Grid, Relative };

struct Evaluation {
  std::vector<CheckPart> parts;
  ToleranceClass tolerance_class = ToleranceClass::Exact;
  nlohmann::json metadata = nlohmann::json::object();
  std::string skip_reason;  // nonempty means SKIPPED
  std::optional<CheckStatus> status;  // overrides the registered status
};

double default_tolerance(ToleranceClass c);

// What a check consumes; generators use this to build inputs.
enum class InputDomain {
  AnyGroup,      // densities on a common group
  Continuous,    // grid or parametric on R^n
  LogConcave,    // log-concave on R^n
  Finite,        // finite-group pmfs
  MarkovTriple,  // joints[0] over (X1, Y, X2)
  JointPair,     // joints[0] over (X, Y)
  DensityJoint,  // densities[0] and joints[0] over (Y, Z)
  Positive,      // densities on the multiplicative half-line
  Circle,
  Complex,
  Matrices,
  Sets,
  Coupling,      // densities[0] log-concave grid, optional joints[0] coupling of its cells
};

struct CheckSpec {
  std::string name;
  std::string reference;  // classical statement name
  std::string statement;  // the inequality, in plain text
  CheckStatus status = CheckStatus::Theorem;
  InputDomain domain = InputDomain::AnyGroup;
  int densities = 0;  // -1: two or more
  int matrices = 0;   // -1: two or more
  int integers = 0;
  int reals = 0;
  std::function<Evaluation(const CheckInputs&, const ConvolutionOptions&)> evaluate;
};

const std::vector<CheckSpec>& check_registry();
// Throws ValidationError naming the unknown check.
const CheckSpec& find_check(const std::string& name);

CheckResult run_check(const std::string& name, const CheckInputs& inputs, const CheckOptions& options = {});

// 16 hex digits of FNV-1a over `text`.
std::string fnv1a_hex(const std::string& text);

}  // namespace ruzsa
