#include "ruzsa/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ruzsa/density_io.hpp"
#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

using nlohmann::json;

Density refine_density(const Density& d) {
  if (const auto* g = std::get_if<GridDensity>(&d)) return g->refined(2);
  return d;
}

CheckResult finalize(const CheckSpec& spec, const Evaluation& e, const std::optional<double>& tol_override) {
  CheckResult r;
  r.name = spec.name;
  r.reference = spec.reference;
  r.statement = spec.statement;
  r.status = e.status.value_or(spec.status);
  r.metadata = e.metadata;
  r.metadata["tolerance_class"] = e.tolerance_class == ToleranceClass::Exact        ? "exact"
                                  : e.tolerance_class == ToleranceClass::ClosedForm ? "closed-form"
                                  : e.tolerance_class == ToleranceClass::Grid       ? "grid"
                                                                                   : "relative";
  if (!e.skip_reason.empty()) {
    r.verdict = Verdict::Skipped;
    r.skip_reason = e.skip_reason;
    r.pass = true;
    r.parts = e.parts;
    return r;
  }
  if (e.parts.empty()) throw Error("check " + spec.name + " produced no inequality");
  const double base = tol_override.value_or(default_tolerance(e.tolerance_class));
  double worst = std::numeric_limits<double>::infinity();
  for (auto p : e.parts) {
    p.slack = p.rhs - p.lhs;
    p.tolerance = e.tolerance_class == ToleranceClass::Relative ? base * std::max(std::abs(p.lhs), std::abs(p.rhs)) : base;
    p.pass = p.slack >= -p.tolerance;
    r.pass = r.pass && p.pass;
    // The binding part is the one closest to (or furthest past) its tolerance.
    const double margin = p.tolerance > 0 ? (p.slack + p.tolerance) / p.tolerance : p.slack;
    if (r.parts.empty() || margin < worst) {
      worst = margin;
      r.lhs = p.lhs;
      r.rhs = p.rhs;
      r.slack = p.slack;
      r.tolerance = p.tolerance;
    }
    r.parts.push_back(p);
  }
  r.verdict = r.pass ? Verdict::Pass : Verdict::Fail;
  return r;
}

void require_count(const std::string& name, const char* what, std::size_t have, int want) {
  if (want == 0) return;
  if (want < 0 ? have < 2 : have != static_cast<std::size_t>(want)) {
    throw PreconditionError(name + " needs " + (want < 0 ? std::string("two or more") : std::to_string(want)) + " " +
                            what + ", got " + std::to_string(have));
  }
}

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Theorem: return "theorem";
    case CheckStatus::Conjecture: return "conjecture";
    case CheckStatus::Observational: return "observational";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skipped: return "SKIPPED";
  }
  return "unknown";
}

double default_tolerance(ToleranceClass c) {
  switch (c) {
    case ToleranceClass::Exact: return 1e-9;
    case ToleranceClass::ClosedForm: return 1e-6;
    case ToleranceClass::Grid: return 5e-3;
    case ToleranceClass::Relative: return 1e-9;
  }
  return 1e-9;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json CheckInputs::to_json() const {
  json j = json::object();
  if (!densities.empty()) {
    j["densities"] = json::array();
    for (const auto& d : densities) j["densities"].push_back(density_to_json(d));
  }
  if (!joints.empty()) {
    j["joints"] = json::array();
    for (const auto& x : joints) j["joints"].push_back(joint_to_json(x));
  }
  if (!matrices.empty()) {
    j["matrices"] = json::array();
    for (const auto& m : matrices) j["matrices"].push_back(matrix_to_json(m));
  }
  if (!sets.empty()) {
    j["sets"] = sets;
    if (set_group) j["set_group"] = group_to_json(*set_group);
  }
  if (!integers.empty()) j["integers"] = integers;
  if (!reals.empty()) j["reals"] = reals;
  if (!variant.empty()) j["variant"] = variant;
  return j;
}

CheckInputs CheckInputs::from_json(const json& j) {
  CheckInputs in;
  try {
    if (j.contains("densities"))
      for (const auto& d : j.at("densities")) in.densities.push_back(density_from_json(d));
    if (j.contains("joints"))
      for (const auto& d : j.at("joints")) in.joints.push_back(joint_from_json(d));
    if (j.contains("matrices"))
      for (const auto& d : j.at("matrices")) in.matrices.push_back(matrix_from_json(d));
    if (j.contains("sets")) {
      in.sets = j.at("sets").get<std::vector<ElementSet>>();
      in.set_group = group_from_json(j.at("set_group"));
      for (auto& s : in.sets) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        if (!s.empty() && s.back() >= in.set_group->order()) throw ValidationError("set element outside the group");
      }
    }
    if (j.contains("integers")) in.integers = j.at("integers").get<std::vector<std::int64_t>>();
    if (j.contains("reals")) in.reals = j.at("reals").get<std::vector<double>>();
    in.variant = j.value("variant", std::string());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed check inputs: ") + e.what());
  }
  return in;
}

json CheckResult::to_json() const {
  json parts_json = json::array();
  for (const auto& p : parts) {
    parts_json.push_back({{"label", p.label},
                          {"lhs", p.lhs},
                          {"rhs", p.rhs},
                          {"slack", p.slack},
                          {"tolerance", p.tolerance},
                          {"pass", p.pass}});
  }
  json j{{"name", name},
         {"reference", reference},
         {"statement", statement},
         {"status", to_string(status)},
         {"verdict", to_string(verdict)},
         {"lhs", lhs},
         {"rhs", rhs},
         {"slack", slack},
         {"tolerance", tolerance},
         {"pass", pass},
         {"inputs_digest", digest},
         {"parts", parts_json},
         {"metadata", metadata}};
  if (!skip_reason.empty()) j["skip_reason"] = skip_reason;
  return j;
}

const CheckSpec& find_check(const std::string& name) {
  for (const auto& c : check_registry()) {
    if (c.name == name) return c;
  }
  throw ValidationError("unknown check '" + name + "'");
}

CheckResult run_check(const std::string& name, const CheckInputs& inputs, const CheckOptions& options) {
  const CheckSpec& spec = find_check(name);
  require_count(name, "densities", inputs.densities.size(), spec.densities);
  require_count(name, "matrices", inputs.matrices.size(), spec.matrices);
  require_count(name, "integers", inputs.integers.size(), spec.integers);
  require_count(name, "reals", inputs.reals.size(), spec.reals);

  Evaluation e = spec.evaluate(inputs, options.conv);
  CheckResult r = finalize(spec, e, options.tolerance);
  if (options.retry && !r.pass && r.status == CheckStatus::Theorem && e.tolerance_class == ToleranceClass::Grid) {
    // Numerical-resolution incident first; only a repeat violation is a failure.
    CheckInputs fine = inputs;
    for (auto& d : fine.densities) d = refine_density(d);
    ConvolutionOptions conv = options.conv;
    conv.grid.cells *= 2;
    const double first = r.slack;
    r = finalize(spec, spec.evaluate(fine, conv), options.tolerance);
    r.metadata["retried_at_double_resolution"] = true;
    r.metadata["first_slack"] = first;
  }
  r.digest = fnv1a_hex(json{{"check", name}, {"inputs", inputs.to_json()}}.dump());
  return r;
}

}  // namespace ruzsa
