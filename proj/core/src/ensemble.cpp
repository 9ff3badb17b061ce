#include "ruzsa/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "ruzsa/density_io.hpp"
#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

using json = nlohmann::json;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

std::size_t operand_count(const CheckSpec& check, const GeneratorSpec& gen, Rng& rng) {
  if (check.densities >= 0) return static_cast<std::size_t>(check.densities);
  if (gen.operands >= 2) return static_cast<std::size_t>(gen.operands);
  return static_cast<std::size_t>(uniform_int(rng, 2, 4));
}

std::size_t matrix_count(const CheckSpec& check, const GeneratorSpec& gen, Rng& rng) {
  if (check.matrices >= 0) return static_cast<std::size_t>(check.matrices);
  if (gen.operands >= 2) return static_cast<std::size_t>(gen.operands);
  return static_cast<std::size_t>(uniform_int(rng, 2, 4));
}

GroupSpec random_cyclic(const GeneratorSpec& gen, Rng& rng) {
  if (gen.m_min < 1 || gen.m_max < gen.m_min) throw ValidationError("generator needs 1 <= m_min <= m_max");
  return GroupSpec::cyclic(uniform_int(rng, gen.m_min, gen.m_max));
}

// Wrapped normal masses on `cells` cells of [0, 2pi).
std::vector<double> wrapped_normal(std::size_t cells, double mean, double sd) {
  const GridAxis axis = GridAxis::periodic_axis(cells);
  std::vector<double> w(cells, 0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    for (int k = -6; k <= 6; ++k) {
      const double z = (axis.midpoint(i) + k * kTwoPi - mean) / sd;
      w[i] += std::exp(-0.5 * z * z);
    }
  }
  return w;
}

GridDensity logconcave_grid(std::size_t cells, int dimension, Rng& rng) {
  if (dimension == 1) return random_logconcave_grid(cells, rng);
  if (dimension != 2) throw ValidationError("log-concave grids are generated in dimension 1 or 2");
  const std::size_t n = std::min<std::size_t>(cells, 64);
  const GridDensity a = random_logconcave_grid(n, rng);
  const GridDensity b = random_logconcave_grid(n, rng);
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = a.masses()[i] * b.masses()[j];
  return GridDensity::from_weights(GroupSpec::real(2), {a.axes()[0], b.axes()[0]}, std::move(w));
}

// Lower bound on the Poincare constant: 1 / (12 Var) holds for every 1-D
// log-concave law, and a product law inherits the smallest one.
double poincare_lower_bound(const Density& d) {
  if (const auto* p = std::get_if<ParametricDensity>(&d)) {
    if (std::holds_alternative<GaussianParams>(p->family())) {
      return 1.0 / p->covariance().selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
    }
    if (const auto* e = std::get_if<ExponentialParams>(&p->family())) return e->rate * e->rate / 4.0;
    return 1.0 / (12.0 * p->covariance().diagonal().maxCoeff());
  }
  const auto& g = std::get<GridDensity>(d);
  const Moments m = grid_moments(g);
  double var = 0.0;
  for (std::size_t k = 0; k < g.dim(); ++k) {
    const double w = g.axes()[k].width();
    var = std::max(var, m.cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) + w * w);
  }
  return 1.0 / (12.0 * var);
}

Density continuous_density(const std::string& family, const GeneratorSpec& gen, Rng& rng) {
  if (family == "logconcave-grid") return logconcave_grid(gen.cells, gen.dimension, rng);
  if (family == "lattice-grid") {
    const auto m = static_cast<std::size_t>(uniform_int(rng, std::max<std::int64_t>(gen.m_min, 1), gen.m_max));
    return random_lattice_grid(m, 4, rng);
  }
  if (family == "gaussian") {
    Eigen::VectorXd mean(gen.dimension);
    std::normal_distribution<double> normal;
    for (int i = 0; i < gen.dimension; ++i) mean(i) = normal(rng);
    return ParametricDensity::gaussian(mean, random_pd_matrix(gen.dimension, rng));
  }
  if (family == "exponential") return ParametricDensity::exponential(log_uniform(rng, 0.1, 10.0));
  throw ValidationError("family " + family + " does not produce densities on R^n");
}

Density family_density(const GeneratorSpec& gen, const GroupSpec& finite_group, Rng& rng) {
  const std::string& f = gen.family;
  if (f == "finite-pmf") return random_pmf_mixed(finite_group, rng);
  if (f == "logconcave-pmf") return random_logconcave_pmf(finite_group.order(), rng);
  if (f == "circle-grid") {
    // Two-component mixtures, so that the law is not a reflection of itself.
    const std::size_t n = gen.cells;
    auto w = wrapped_normal(n, uniform(rng, 0.0, kTwoPi), log_uniform(rng, 0.05, 3.0));
    const auto v = wrapped_normal(n, uniform(rng, 0.0, kTwoPi), log_uniform(rng, 0.05, 3.0));
    const double t = uniform(rng, 0.0, 1.0);
    const double sw = std::accumulate(w.begin(), w.end(), 0.0);
    const double sv = std::accumulate(v.begin(), v.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) w[i] = t * w[i] / sw + (1.0 - t) * v[i] / sv;
    return GridDensity::from_weights(GroupSpec::circle(), {GridAxis::periodic_axis(n)}, std::move(w));
  }
  if (f == "positive-grid") {
    const GridDensity base = random_logconcave_grid(gen.cells, rng);
    const double lo = uniform(rng, -2.0, 2.0);
    const double len = log_uniform(rng, 0.5, 4.0);
    return GridDensity(GroupSpec::multiplicative_positive(), {GridAxis{lo, lo + len, gen.cells, false}},
                       std::vector<double>(base.masses().begin(), base.masses().end()));
  }
  if (f == "complex-grid") {
    const std::size_t n = std::max<std::size_t>(16, gen.cells / 4);
    const GridDensity radial = random_logconcave_grid(n, rng);
    const double lo = uniform(rng, -1.5, 1.5);
    const double len = log_uniform(rng, 0.5, 3.0);
    const auto angle = wrapped_normal(n, uniform(rng, 0.0, kTwoPi), log_uniform(rng, 0.1, 3.0));
    std::vector<double> w(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i * n + j] = radial.masses()[i] * angle[j];
    return GridDensity::from_weights(GroupSpec::multiplicative_complex(),
                                     {GridAxis{lo, lo + len, n, false}, GridAxis::periodic_axis(n)}, std::move(w));
  }
  return continuous_density(f, gen, rng);
}

// Mixture of the comonotone and the independent coupling of p with itself.
JointPMF random_coupling(const GridDensity& g, Rng& rng) {
  const std::size_t n = g.total_cells();
  const double lambda = uniform(rng, 0.0, 1.0);
  const auto m = g.masses();
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = (1.0 - lambda) * m[i] * m[j] + (i == j ? lambda * m[i] : 0.0);
  }
  const auto c = GroupSpec::cyclic(static_cast<std::int64_t>(n));
  return JointPMF::from_weights({c, c}, std::move(w));
}

void fill_integers(const CheckSpec& check, CheckInputs& in, Rng& rng) {
  if (check.integers == 0) return;
  if (check.name == "weighted_sum_theorem") {
    in.integers = {uniform_int(rng, 1, 30), uniform_int(rng, 1, 30)};
    return;
  }
  for (int i = 0; i < check.integers; ++i) {
    std::int64_t v = 0;
    while (v == 0) v = uniform_int(rng, -6, 6);
    in.integers.push_back(v);
  }
}

}  // namespace

json GeneratorSpec::to_json() const {
  return {{"family", family}, {"m_min", m_min}, {"m_max", m_max},
          {"dimension", dimension}, {"cells", cells}, {"operands", operands}};
}

GeneratorSpec GeneratorSpec::from_json(const json& j) {
  if (!j.is_object()) throw ParseError("generator spec must be an object");
  GeneratorSpec g;
  try {
    g.family = j.value("family", g.family);
    g.m_min = j.value("m_min", g.m_min);
    g.m_max = j.value("m_max", g.m_max);
    g.dimension = j.value("dimension", g.dimension);
    g.cells = j.value("cells", g.cells);
    g.operands = j.value("operands", g.operands);
  } catch (const json::exception& e) {
    throw ParseError(std::string("generator spec: ") + e.what());
  }
  return g;
}

std::vector<std::string> compatible_families(const CheckSpec& check) {
  switch (check.domain) {
    case InputDomain::AnyGroup:
      return {"finite-pmf", "logconcave-pmf", "lattice-grid", "logconcave-grid", "gaussian", "exponential"};
    case InputDomain::Continuous: return {"logconcave-grid", "lattice-grid", "gaussian", "exponential"};
    case InputDomain::LogConcave: return {"logconcave-grid", "gaussian", "exponential"};
    case InputDomain::Finite: return {"finite-pmf", "logconcave-pmf"};
    case InputDomain::MarkovTriple:
    case InputDomain::JointPair:
    case InputDomain::DensityJoint: return {"markov-joint"};
    case InputDomain::Positive: return {"positive-grid"};
    case InputDomain::Circle: return {"circle-grid"};
    case InputDomain::Complex: return {"complex-grid"};
    case InputDomain::Matrices: return {"pd-matrix"};
    case InputDomain::Sets: return {"sets"};
    case InputDomain::Coupling: return {"coupling", "logconcave-grid", "gaussian", "exponential"};
  }
  return {};
}

CheckInputs generate_inputs(const CheckSpec& check, const GeneratorSpec& gen, Rng& rng) {
  const auto families = compatible_families(check);
  if (std::find(families.begin(), families.end(), gen.family) == families.end()) {
    std::string list;
    for (const auto& f : families) list += (list.empty() ? "" : ", ") + f;
    throw ValidationError("generator " + gen.family + " cannot feed " + check.name + " (accepts: " + list + ")");
  }
  CheckInputs in;
  fill_integers(check, in, rng);

  if (gen.family == "pd-matrix") {
    const std::size_t k = matrix_count(check, gen, rng);
    for (std::size_t i = 0; i < k; ++i) in.matrices.emplace_back(random_pd_matrix(gen.dimension, rng));
    return in;
  }
  if (gen.family == "sets") {
    const GroupSpec g = random_cyclic(gen, rng);
    for (int i = 0; i < 3; ++i) in.sets.push_back(random_set(g, rng));
    in.set_group = g;
    return in;
  }
  if (gen.family == "markov-joint") {
    const GroupSpec g = random_cyclic(gen, rng);
    if (check.domain == InputDomain::MarkovTriple) {
      // General Markov triple: arbitrary p(y), p(x1 | y), p(x2 | y).
      const FinitePMF py = random_pmf_mixed(g, rng);
      std::vector<FinitePMF> c1, c2;
      for (std::size_t y = 0; y < g.order(); ++y) {
        c1.push_back(random_pmf_mixed(g, rng));
        c2.push_back(random_pmf_mixed(g, rng));
      }
      in.joints.push_back(markov_triple(py, c1, c2));
    } else if (check.domain == InputDomain::DensityJoint) {
      in.densities.emplace_back(random_pmf_mixed(g, rng));
      const GroupSpec gy = GroupSpec::cyclic(uniform_int(rng, 2, std::max<std::int64_t>(2, gen.m_max)));
      in.joints.push_back(random_joint({gy, g}, rng));
    } else {
      in.joints.push_back(random_joint({g, g}, rng));
    }
    return in;
  }
  if (gen.family == "coupling") {
    const GridDensity g = random_logconcave_grid(std::min<std::size_t>(gen.cells, 64), rng);
    in.densities.emplace_back(g);
    if (rng() % 4 != 0) in.joints.push_back(random_coupling(g, rng));
    return in;
  }

  const GroupSpec finite_group = (gen.family == "finite-pmf" || gen.family == "logconcave-pmf")
                                     ? random_cyclic(gen, rng)
                                     : GroupSpec::cyclic(2);
  const std::size_t k = operand_count(check, gen, rng);
  for (std::size_t i = 0; i < k; ++i) in.densities.push_back(family_density(gen, finite_group, rng));
  if (check.reals > 0) {
    // Only the Poincare-constant check takes a real.
    in.reals.push_back(poincare_lower_bound(in.densities[0]));
  }
  return in;
}

json EnsembleResult::to_json() const {
  json j = {{"check", check},
            {"generator", generator.to_json()},
            {"seed", seed},
            {"trials", trials},
            {"evaluated", evaluated},
            {"violations", violations},
            {"skipped", skipped},
            {"errors", errors},
            {"min_slack", min_slack},
            {"max_slack", max_slack},
            {"max_tolerance", max_tolerance},
            {"argmin_trial", argmin_trial},
            {"argmin_digest", argmin_digest},
            {"metadata_range", metadata_range}};
  if (!first_error.empty()) j["first_error"] = first_error;
  if (evaluated > 0) j["argmin_result"] = argmin_result.to_json();
  return j;
}

EnsembleResult run_ensemble(const std::string& check, const GeneratorSpec& gen, std::size_t trials,
                            std::uint64_t seed, const EnsembleOptions& options) {
  if (trials < 1) throw ValidationError("an ensemble needs at least one trial");
  const CheckSpec& spec = find_check(check);
  {
    // Incompatibility is an input error, raised before any trial runs.
    Rng probe(derive_seed(seed, 0));
    generate_inputs(spec, gen, probe);
  }

  struct Outcome {
    bool ok = false;
    std::string error;
    CheckResult result;
  };
  std::vector<Outcome> outcomes(trials);
  auto work = [&](std::size_t first, std::size_t step) {
    for (std::size_t t = first; t < trials; t += step) {
      try {
        Rng rng(derive_seed(seed, t));
        outcomes[t].result = run_check(check, generate_inputs(spec, gen, rng), options.check);
        outcomes[t].ok = true;
      } catch (const std::exception& e) {
        outcomes[t].error = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work, k, threads);
    for (auto& th : pool) th.join();
  }

  EnsembleResult r;
  r.check = check;
  r.generator = gen;
  r.seed = seed;
  r.trials = trials;
  r.min_slack = std::numeric_limits<double>::infinity();
  r.max_slack = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (std::size_t t = 0; t < trials; ++t) {
    const Outcome& o = outcomes[t];
    if (!o.ok) {
      if (r.errors++ == 0) r.first_error = "trial " + std::to_string(t) + ": " + o.error;
      continue;
    }
    const CheckResult& c = o.result;
    if (c.verdict == Verdict::Skipped) {
      ++r.skipped;
      continue;
    }
    ++r.evaluated;
    if (c.verdict == Verdict::Fail) ++r.violations;
    r.max_tolerance = std::max(r.max_tolerance, c.tolerance);
    r.max_slack = std::max(r.max_slack, c.slack);
    if (!have || c.slack < r.min_slack) {
      have = true;
      r.min_slack = c.slack;
      r.argmin_trial = t;
    }
    for (const auto& [key, value] : c.metadata.items()) {
      if (!value.is_number()) continue;
      const double v = value.get<double>();
      auto& range = r.metadata_range[key];
      if (range.is_null()) {
        range = json::array({v, v});
      } else {
        range[0] = std::min(range[0].get<double>(), v);
        range[1] = std::max(range[1].get<double>(), v);
      }
    }
  }
  if (have) {
    Rng rng(derive_seed(seed, r.argmin_trial));
    r.argmin_inputs = generate_inputs(spec, gen, rng);
    r.argmin_result = outcomes[r.argmin_trial].result;
    r.argmin_digest = r.argmin_result.digest;
  } else {
    r.min_slack = r.max_slack = 0.0;
  }
  return r;
}

}  // namespace ruzsa
