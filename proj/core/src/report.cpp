#include "ruzsa/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <map>
#include <sstream>

#include "ruzsa/density_io.hpp"
#include "ruzsa/error.hpp"
#include "ruzsa/ruzsa_metrics.hpp"

namespace ruzsa {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;


Rng example_rng(std::uint64_t stream) { return Rng(derive_seed(0x5eed, stream)); }

GridDensity gaussian_grid_pm8() {
  return GridDensity::from_cdf_1d(GroupSpec::real(1), GridAxis{-8.0, 8.0, 4096, false},
                                  [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
}

// Asymmetric law on the circle: two wrapped normals.
GridDensity wrapped_example() {
  const std::size_t n = 1024;
  const GridAxis axis = GridAxis::periodic_axis(n);
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = -4; k <= 4; ++k) {
      const double x = axis.midpoint(i) + k * kTwoPi;
      w[i] += 0.7 * std::exp(-0.5 * std::pow((x - 1.0) / 0.4, 2)) / 0.4 +
              0.3 * std::exp(-0.5 * std::pow((x - 3.5) / 0.9, 2)) / 0.9;
    }
  }
  return GridDensity::from_weights(GroupSpec::circle(), {axis}, std::move(w));
}

// log|Z| ~ N(0.3, 0.5^2) independent of a skewed angle.
GridDensity complex_example() {
  const std::size_t n = 128;
  const GridAxis radial{0.3 - 3.0, 0.3 + 3.0, n, false};
  const GridAxis angle = GridAxis::periodic_axis(n);
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = (radial.midpoint(i) - 0.3) / 0.5;
    for (std::size_t j = 0; j < n; ++j) {
      double a = 0.0;
      for (int k = -3; k <= 3; ++k) {
        const double t = angle.midpoint(j) + k * kTwoPi;
        a += std::exp(-0.5 * std::pow((t - 2.0) / 0.6, 2)) + 0.5 * std::exp(-0.5 * std::pow((t - 4.0) / 1.2, 2));
      }
      w[i * n + j] = std::exp(-0.5 * l * l) * a;
    }
  }
  return GridDensity::from_weights(GroupSpec::multiplicative_complex(), {radial, angle}, std::move(w));
}

JointPMF comonotone(const GridDensity& g) {
  const std::size_t n = g.total_cells();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[i * n + i] = g.masses()[i];
  const auto c = GroupSpec::cyclic(static_cast<std::int64_t>(n));
  return JointPMF::from_weights({c, c}, std::move(w));
}

std::vector<Density> random_pmfs(std::int64_t m, std::size_t count, std::uint64_t stream) {
  Rng rng = example_rng(stream);
  std::vector<Density> out;
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(random_pmf(GroupSpec::cyclic(m), 1.0, rng));
  return out;
}

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

CheckInputs dens(std::vector<Density> d) {
  CheckInputs in;
  in.densities = std::move(d);
  return in;
}

using ExampleFn = CheckInputs (*)();

const std::map<std::string, ExampleFn>& examples() {
  static const std::map<std::string, ExampleFn> table = {
      {"uniform-z2-triple",
       [] {
         const auto u = FinitePMF::uniform(GroupSpec::cyclic(2));
         return dens({u, u, u});
       }},
      {"random-z8-triple", [] { return dens(random_pmfs(8, 3, 1)); }},
      {"random-z12-pair", [] { return dens(random_pmfs(12, 2, 2)); }},
      {"random-z8-single", [] { return dens(random_pmfs(8, 1, 3)); }},
      {"random-z6-joint",
       [] {
         Rng rng = example_rng(4);
         const auto g = GroupSpec::cyclic(6);
         CheckInputs in;
         in.joints.push_back(random_joint({g, g}, rng));
         return in;
       }},
      {"markov-triple-z5",
       [] {
         Rng rng = example_rng(5);
         const auto g = GroupSpec::cyclic(5);
         std::vector<FinitePMF> c1, c2;
         for (int y = 0; y < 5; ++y) {
           c1.push_back(random_pmf(g, 1.0, rng));
           c2.push_back(random_pmf(g, 1.0, rng));
         }
         CheckInputs in;
         in.joints.push_back(markov_triple(random_pmf(g, 1.0, rng), c1, c2));
         return in;
       }},
      {"density-joint-z6",
       [] {
         Rng rng = example_rng(6);
         const auto g = GroupSpec::cyclic(6);
         CheckInputs in;
         in.densities.emplace_back(random_pmf(g, 1.0, rng));
         in.joints.push_back(random_joint({GroupSpec::cyclic(4), g}, rng));
         return in;
       }},
      {"weighted-z16",
       [] {
         CheckInputs in = dens(random_pmfs(16, 2, 7));
         in.integers = {4, 3};
         return in;
       }},
      {"weighted-thm-z16",
       [] {
         CheckInputs in = dens(random_pmfs(16, 2, 8));
         in.integers = {3, 5};
         return in;
       }},
      {"gaussian-1d", [] { return dens({ParametricDensity::standard_gaussian(1)}); }},
      {"gaussian-1d-grid", [] { return dens({gaussian_grid_pm8()}); }},
      {"gaussian-2d",
       [] {
         return dens({ParametricDensity::gaussian(Eigen::VectorXd::Zero(2), mat({{2.0, 0.5}, {0.5, 1.0}}))});
       }},
      {"gaussian-triple",
       [] {
         Eigen::VectorXd m(1);
         m(0) = 0.5;
         return dens({ParametricDensity::standard_gaussian(1), ParametricDensity::gaussian(m, mat({{2.0}})),
                             ParametricDensity::gaussian(-m, mat({{0.25}}))});
       }},
      {"exp-1", [] { return dens({ParametricDensity::exponential(1.0)}); }},
      {"exp-1-grid", [] { return dens({as_grid(ParametricDensity::exponential(1.0))}); }},
      {"uniform-01", [] { return dens({ParametricDensity::uniform({0.0}, {1.0})}); }},
      {"uniform-01-grid", [] { return dens({as_grid(ParametricDensity::uniform({0.0}, {1.0}))}); }},
      {"ball-nguyen-exp",
       [] {
         CheckInputs in = dens({ParametricDensity::exponential(1.0)});
         in.reals = {0.25};
         return in;
       }},
      {"lognormal-01", [] { return dens({ParametricDensity::lognormal(0.0, 1.0)}); }},
      {"lognormal-01-grid", [] { return dens({as_grid(ParametricDensity::lognormal(0.0, 1.0))}); }},
      {"wrapped-gaussian", [] { return dens({wrapped_example()}); }},
      {"complex-example", [] { return dens({complex_example()}); }},
      {"coupling-comonotone",
       [] {
         const GridDensity g = GridDensity::from_cdf_1d(GroupSpec::real(1), GridAxis{-4.0, 4.0, 64, false},
                                                        [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
         CheckInputs in = dens({g});
         in.joints.push_back(comonotone(g));
         return in;
       }},
      {"identity-2-triple",
       [] {
         CheckInputs in;
         in.matrices = {PDMatrix::identity(2), PDMatrix::identity(2), PDMatrix::identity(2)};
         return in;
       }},
      {"pd-pair-3",
       [] {
         CheckInputs in;
         in.matrices = {PDMatrix(mat({{2.0, 0.3, 0.0}, {0.3, 1.0, 0.2}, {0.0, 0.2, 0.5}})),
                        PDMatrix(mat({{1.0, -0.4, 0.1}, {-0.4, 3.0, 0.0}, {0.1, 0.0, 0.8}}))};
         return in;
       }},
      {"sets-z12",
       [] {
         const auto g = GroupSpec::cyclic(12);
         CheckInputs in;
         in.sets = {{0, 1, 2}, {0, 3}, {1, 5, 7}};
         in.set_group = g;
         return in;
       }},
  };
  return table;
}

const std::vector<std::pair<std::string, std::vector<std::string>>>& builtin_suite() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> suite = {
      {"ruzsa_triangle", {"uniform-z2-triple", "random-z8-triple", "gaussian-triple"}},
      {"ruzsa_triangle_sharp", {"uniform-z2-triple", "random-z8-triple"}},
      {"subadditivity", {"random-z8-triple", "gaussian-triple"}},
      {"monotonicity", {"random-z8-triple", "gaussian-triple"}},
      {"plunnecke_ruzsa", {"random-z8-triple", "gaussian-triple"}},
      {"submodularity", {"random-z8-triple", "gaussian-triple"}},
      {"cond_reduces", {"density-joint-z6"}},
      {"cond_ruzsa_bound", {"markov-triple-z5"}},
      {"cond_ruzsa_symmetric", {"random-z6-joint"}},
      {"bsg", {"random-z6-joint"}},
      {"sum_difference", {"random-z12-pair"}},
      {"doubling_difference_ratio", {"random-z8-single", "exp-1", "uniform-01-grid"}},
      {"weighted_sum_lemma", {"weighted-z16"}},
      {"weighted_sum_theorem", {"weighted-thm-z16"}},
      {"multiplicative_pair", {"lognormal-01", "lognormal-01-grid"}},
      {"circle_ratio", {"wrapped-gaussian"}},
      {"complex_pair", {"complex-example"}},
      {"epi_lower", {"gaussian-1d", "gaussian-1d-grid", "exp-1"}},
      {"ball_nguyen", {"ball-nguyen-exp"}},
      {"gauss_distance", {"exp-1", "uniform-01-grid", "gaussian-2d"}},
      {"cover_zhang", {"coupling-comonotone", "exp-1"}},
      {"reverse_epi_iid", {"gaussian-1d", "exp-1", "exp-1-grid", "uniform-01-grid"}},
      {"rogers_shephard_entropy", {"gaussian-1d", "exp-1", "exp-1-grid", "uniform-01-grid"}},
      {"ruzsa_div_ub", {"gaussian-1d", "exp-1", "uniform-01-grid"}},
      {"conjecture_sd", {"exp-1", "uniform-01-grid"}},
      {"det_minkowski", {"pd-pair-3"}},
      {"det_rotfeld", {"pd-pair-3"}},
      {"det_sum", {"identity-2-triple"}},
      {"sumset_triangle", {"sets-z12"}},
      {"discrete_sd_ratio", {"random-z8-single"}},
  };
  return suite;
}

struct Summary {
  std::size_t pass = 0, fail = 0, skipped = 0, conjecture = 0, observational = 0;

  void add(const CheckResult& r) {
    if (r.status == CheckStatus::Conjecture) {
      ++conjecture;
    } else if (r.status == CheckStatus::Observational) {
      ++observational;
    } else if (r.verdict == Verdict::Skipped) {
      ++skipped;
    } else if (r.verdict == Verdict::Pass) {
      ++pass;
    } else {
      ++fail;
    }
  }
  void add(const EnsembleResult& e, CheckStatus status) {
    const std::size_t n = e.evaluated + e.skipped;
    if (status == CheckStatus::Conjecture) {
      conjecture += n;
    } else if (status == CheckStatus::Observational) {
      observational += n;
    } else {
      skipped += e.skipped;
      pass += e.evaluated - e.violations;
      fail += e.violations;
    }
  }
  json to_json() const {
    return {{"pass", pass}, {"fail", fail}, {"skipped", skipped}, {"conjecture", conjecture},
            {"observational", observational}};
  }
};

json report_header(const char* command, std::uint64_t seed) {
  return {{"schema", "ruzsa-report"}, {"version", kReportVersion}, {"tool_version", kToolVersion},
          {"command", command}, {"seed", seed}};
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() || base.empty() ? p : base / p; }

CheckInputs load_entry_inputs(const CampaignEntry& e) {
  if (!e.example.empty()) return builtin_example(e.example);
  if (e.inputs) return *e.inputs;
  if (!e.inputs_file.empty()) {
    try {
      return CheckInputs::from_json(read_json_file(e.inputs_file));
    } catch (const ParseError& err) {
      const std::string what = err.what();
      if (what.find(e.inputs_file.string()) != std::string::npos) throw;
      throw ParseError(e.inputs_file.string() + ": " + what);
    }
  }
  CheckInputs in;
  for (const auto& p : e.density_files) in.densities.push_back(read_density(p));
  return in;
}

}  // namespace

Campaign Campaign::from_json(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ParseError("campaign must be a JSON object");
  Campaign c;
  try {
    if (j.contains("version") && j.at("version").get<int>() != 1) throw ParseError("unsupported campaign version");
    c.seed = j.value("seed", c.seed);
    if (j.contains("tolerance") && !j.at("tolerance").is_null()) c.tolerance = j.at("tolerance").get<double>();
    c.out = j.value("out", c.out);
    for (const auto& x : j.value("entries", json::array())) {
      CampaignEntry e;
      e.check = x.at("check").get<std::string>();
      find_check(e.check);
      int sources = 0;
      if (x.contains("example")) e.example = x.at("example").get<std::string>(), ++sources;
      if (x.contains("inputs_file")) e.inputs_file = resolve(base, x.at("inputs_file").get<std::string>()), ++sources;
      if (x.contains("density_files")) {
        for (const auto& p : x.at("density_files")) e.density_files.push_back(resolve(base, p.get<std::string>()));
        ++sources;
      }
      if (x.contains("inputs")) e.inputs = CheckInputs::from_json(x.at("inputs")), ++sources;
      if (x.contains("generator")) {
        e.generator = x.at("generator").is_string() ? GeneratorSpec{x.at("generator").get<std::string>()}
                                                    : GeneratorSpec::from_json(x.at("generator"));
        e.trials = x.value("trials", std::size_t{100});
        ++sources;
      }
      if (sources != 1) throw ParseError("campaign entry for " + e.check + " needs exactly one input source");
      if (x.contains("tolerance")) e.tolerance = x.at("tolerance").get<double>();
      c.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("campaign: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(std::string("campaign: ") + e.what());
  }
  return c;
}

Campaign load_campaign(const fs::path& path) {
  const json j = read_json_file(path);
  try {
    return Campaign::from_json(j, path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Campaign builtin_campaign(const std::string& name) {
  if (name != "paper-suite") throw ParseError("unknown built-in campaign \"" + name + "\"");
  Campaign c;
  for (const auto& [check, names] : builtin_suite()) {
    for (const auto& ex : names) {
      CampaignEntry e;
      e.check = check;
      e.example = ex;
      c.entries.push_back(std::move(e));
    }
  }
  return c;
}

std::vector<std::string> builtin_example_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : examples()) names.push_back(name);
  return names;
}

CheckInputs builtin_example(const std::string& name) {
  const auto& table = examples();
  const auto it = table.find(name);
  if (it == table.end()) throw ParseError("unknown built-in example \"" + name + "\"");
  return it->second();
}

Report run_campaign(const Campaign& campaign, unsigned threads) {
  json doc = report_header("verify", campaign.seed);
  doc["results"] = json::array();
  doc["ensembles"] = json::array();
  doc["warnings"] = json::array();
  if (campaign.entries.empty()) doc["warnings"].push_back("campaign has no entries");
  Summary summary;
  for (std::size_t i = 0; i < campaign.entries.size(); ++i) {
    const CampaignEntry& e = campaign.entries[i];
    CheckOptions options;
    options.tolerance = e.tolerance ? e.tolerance : campaign.tolerance;
    if (e.generator) {
      EnsembleOptions eo;
      eo.check = options;
      eo.threads = threads;
      const EnsembleResult r = run_ensemble(e.check, *e.generator, e.trials, derive_seed(campaign.seed, i), eo);
      summary.add(r, find_check(e.check).status);
      json row = r.to_json();
      row["reference"] = find_check(e.check).reference;
      row["status"] = to_string(find_check(e.check).status);
      doc["ensembles"].push_back(std::move(row));
      continue;
    }
    const CheckResult r = run_check(e.check, load_entry_inputs(e), options);
    summary.add(r);
    json row = r.to_json();
    if (!e.example.empty()) row["example"] = e.example;
    doc["results"].push_back(std::move(row));
  }
  doc["summary"] = summary.to_json();
  return {doc, summary.fail > 0 ? 1 : 0};
}

Report scan_report(const std::string& check, const GeneratorSpec& gen, std::size_t trials, std::uint64_t seed,
                   const EnsembleOptions& options) {
  const EnsembleResult r = run_ensemble(check, gen, trials, seed, options);
  const CheckSpec& spec = find_check(check);
  json doc = report_header("scan", seed);
  json row = r.to_json();
  row["reference"] = spec.reference;
  row["status"] = to_string(spec.status);
  row["argmin_inputs"] = r.argmin_inputs.to_json();
  doc["ensembles"] = json::array({row});
  Summary s;
  s.add(r, spec.status);
  doc["summary"] = s.to_json();
  return {doc, s.fail > 0 ? 1 : 0};
}

Report det_report(int dimension, std::size_t trials, std::uint64_t seed, const EnsembleOptions& options) {
  if (dimension < 1) throw ValidationError("matrix dimension must be >= 1");
  json doc = report_header("det", seed);
  doc["dimension"] = dimension;
  doc["ensembles"] = json::array();
  Summary s;
  GeneratorSpec gen;
  gen.family = "pd-matrix";
  gen.dimension = dimension;
  const char* checks[] = {"det_minkowski", "det_rotfeld", "det_sum"};
  for (std::size_t i = 0; i < 3; ++i) {
    const EnsembleResult r = run_ensemble(checks[i], gen, trials, derive_seed(seed, i), options);
    s.add(r, CheckStatus::Theorem);
    json row = r.to_json();
    row["reference"] = find_check(checks[i]).reference;
    row["status"] = "theorem";
    doc["ensembles"].push_back(std::move(row));
  }
  doc["summary"] = s.to_json();
  return {doc, s.fail > 0 ? 1 : 0};
}

json reference_table() {
  struct Law {
    const char* label;
    Density closed;
    Density grid;
  };
  const std::vector<Law> laws = {
      {"N(0,1)", ParametricDensity::standard_gaussian(1), gaussian_grid_pm8()},
      {"Exp(1)", ParametricDensity::exponential(1.0), as_grid(ParametricDensity::exponential(1.0))},
      {"Uniform[0,1]", ParametricDensity::uniform({0.0}, {1.0}),
       as_grid(ParametricDensity::uniform({0.0}, {1.0}))},
  };
  json rows = json::array();
  for (const auto& law : laws) {
    for (const Density* d : {&law.closed, &law.grid}) {
      const SigmaValue plus = sigma(*d, Sign::Plus);
      const SigmaValue minus = sigma(*d, Sign::Minus);
      // d(X||X) and d(X||-X) are h(X -+ X') - h(X).
      rows.push_back({{"law", law.label},
                      {"sigma_plus", plus.value},
                      {"sigma_minus", minus.value},
                      {"d_xx", minus.h_combined - minus.h_x},
                      {"d_x_negx", plus.h_combined - plus.h_x},
                      {"provenance_plus", to_string(plus.path)},
                      {"provenance_minus", to_string(minus.path)}});
    }
  }
  json doc = report_header("table", 0);
  doc["rows"] = rows;
  return doc;
}

std::string reference_table_text(const json& table) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  for (const auto& r : table.at("rows")) {
    const std::string law = r.at("law").get<std::string>();
    out << law << ": σ₋ = " << r.at("sigma_minus").get<double>() << ", σ₊ = " << r.at("sigma_plus").get<double>()
        << ", d(X||X) = " << r.at("d_xx").get<double>() << ", d(X||-X) = " << r.at("d_x_negx").get<double>() << "  ["
        << r.at("provenance_minus").get<std::string>();
    if (r.at("provenance_plus") != r.at("provenance_minus")) out << " / " << r.at("provenance_plus").get<std::string>();
    out << "]\n";
  }
  return out.str();
}

std::string results_csv(const json& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "name,status,verdict,lhs,rhs,slack,tolerance,digest,reference\n";
  auto quote = [](const std::string& s) { return "\"" + s + "\""; };
  for (const auto& r : report.value("results", json::array())) {
    out << r.at("name").get<std::string>() << ',' << r.at("status").get<std::string>() << ','
        << r.at("verdict").get<std::string>() << ',' << r.at("lhs").get<double>() << ',' << r.at("rhs").get<double>()
        << ',' << r.at("slack").get<double>() << ',' << r.at("tolerance").get<double>() << ','
        << r.at("inputs_digest").get<std::string>() << ',' << quote(r.at("reference").get<std::string>()) << '\n';
  }
  for (const auto& e : report.value("ensembles", json::array())) {
    const auto& r = e.contains("argmin_result") ? e.at("argmin_result") : json::object();
    out << e.at("check").get<std::string>() << ',' << e.at("status").get<std::string>() << ','
        << (e.at("violations").get<std::size_t>() > 0 ? "FAIL" : "PASS") << ',' << r.value("lhs", 0.0) << ','
        << r.value("rhs", 0.0) << ',' << e.at("min_slack").get<double>() << ',' << e.at("max_tolerance").get<double>()
        << ',' << e.at("argmin_digest").get<std::string>() << ',' << quote(e.at("reference").get<std::string>())
        << '\n';
  }
  return out.str();
}

void stamp_run(json& report, double wall_seconds) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  report["run"] = {{"timestamp", ts.str()}, {"wall_seconds", wall_seconds}};
}

}  // namespace ruzsa
