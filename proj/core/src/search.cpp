#include "ruzsa/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"
#include "ruzsa/ruzsa_metrics.hpp"

namespace ruzsa {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <typename E>
E parse_enum(const json& j, const char* key, const std::vector<std::pair<std::string, E>>& table, E fallback) {
  if (!j.contains(key)) return fallback;
  const std::string s = j.at(key).get<std::string>();
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw ParseError(std::string("unknown ") + key + " \"" + s + "\"");
}

const std::vector<std::pair<std::string, Objective>> kObjectives = {
    {"maximize-sigma-minus", Objective::MaximizeSigmaMinus},
    {"maximize-sigma-plus", Objective::MaximizeSigmaPlus},
    {"minimize-slack", Objective::MinimizeSlack}};
const std::vector<std::pair<std::string, SearchSpace>> kSpaces = {
    {"simplex", SearchSpace::Simplex}, {"logconcave-grid", SearchSpace::LogConcaveGrid},
    {"parametric", SearchSpace::Parametric}};
const std::vector<std::pair<std::string, SearchMethod>> kMethods = {
    {"nelder-mead", SearchMethod::NelderMead}, {"projected-gradient", SearchMethod::ProjectedGradient},
    {"simulated-annealing", SearchMethod::SimulatedAnnealing}};

template <typename E>
std::string name_of(const std::vector<std::pair<std::string, E>>& table, E v) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

std::vector<double> softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += p[i] = std::exp(logits[i] - mx);
  for (auto& x : p) x /= total;
  return p;
}

// The decision variables of one problem: `blocks` operands of `block` parameters each.
class Space {
 public:
  Space(const SearchProblem& p, bool direct_simplex) : p_(p), direct_(direct_simplex) {
    if (p.objective == Objective::MinimizeSlack) {
      const CheckSpec& spec = find_check(p.check);
      if (spec.matrices != 0 || spec.domain == InputDomain::Sets || spec.domain == InputDomain::MarkovTriple ||
          spec.domain == InputDomain::JointPair || spec.domain == InputDomain::DensityJoint ||
          spec.domain == InputDomain::Positive || spec.domain == InputDomain::Circle ||
          spec.domain == InputDomain::Complex) {
        throw ValidationError("search spaces only produce densities; " + p.check + " needs other inputs");
      }
      blocks_ = spec.densities > 0 ? static_cast<std::size_t>(spec.densities) : 2;
      if (static_cast<std::size_t>(spec.integers) != p.integers.size() ||
          static_cast<std::size_t>(spec.reals) != p.reals.size()) {
        throw ValidationError(p.check + " needs " + std::to_string(spec.integers) + " integers and " +
                              std::to_string(spec.reals) + " reals in the problem");
      }
    } else if (p.space == SearchSpace::Simplex) {
      throw ValidationError("sigma objectives need a continuous search space");
    }
    switch (p.space) {
      case SearchSpace::Simplex:
        if (p.modulus < 2) throw ValidationError("simplex search needs modulus >= 2");
        block_ = static_cast<std::size_t>(p.modulus);
        break;
      case SearchSpace::LogConcaveGrid:
        if (p.knots < 2 || p.cells < p.knots) throw ValidationError("log-concave search needs 2 <= knots <= cells");
        block_ = p.knots;
        break;
      case SearchSpace::Parametric:
        if (p.family == "gamma") {
          block_ = 1;
        } else if (p.family == "gaussian") {
          block_ = 2;
        } else {
          throw ValidationError("parametric search family must be gamma or gaussian, got " + p.family);
        }
        break;
    }
  }

  std::size_t dim() const { return blocks_ * block_; }
  bool direct_simplex() const { return direct_; }

  std::vector<double> initial(Rng& rng) const {
    std::normal_distribution<double> normal;
    std::vector<double> x(dim());
    for (std::size_t b = 0; b < blocks_; ++b) {
      const auto first = x.begin() + static_cast<std::ptrdiff_t>(b * block_);
      if (p_.space == SearchSpace::LogConcaveGrid) {
        // Random concave start: sorted slopes of random scale, integrated.
        std::vector<double> slopes(block_ - 1);
        const double scale = std::exp(std::uniform_real_distribution<double>(std::log(0.5), std::log(20.0))(rng));
        for (auto& s : slopes) s = scale * normal(rng) / static_cast<double>(block_);
        std::sort(slopes.rbegin(), slopes.rend());
        double y = 0.0;
        *first = 0.0;
        for (std::size_t k = 1; k < block_; ++k) *(first + static_cast<std::ptrdiff_t>(k)) = y += slopes[k - 1];
      } else {
        for (std::size_t k = 0; k < block_; ++k) *(first + static_cast<std::ptrdiff_t>(k)) = normal(rng);
      }
    }
    return project(x);
  }

  std::vector<double> project(std::vector<double> x) const {
    if (p_.space == SearchSpace::LogConcaveGrid || (p_.space == SearchSpace::Simplex && direct_)) {
      for (std::size_t b = 0; b < blocks_; ++b) {
        std::vector<double> block(x.begin() + static_cast<std::ptrdiff_t>(b * block_),
                                  x.begin() + static_cast<std::ptrdiff_t>((b + 1) * block_));
        block = p_.space == SearchSpace::Simplex ? project_simplex(block) : project_concave(block);
        std::copy(block.begin(), block.end(), x.begin() + static_cast<std::ptrdiff_t>(b * block_));
      }
    }
    return x;
  }

  std::vector<Density> decode(const std::vector<double>& x, std::size_t resolution_factor) const {
    std::vector<Density> out;
    for (std::size_t b = 0; b < blocks_; ++b) {
      const std::span<const double> v(x.data() + b * block_, block_);
      switch (p_.space) {
        case SearchSpace::Simplex: {
          const auto g = GroupSpec::cyclic(p_.modulus);
          out.emplace_back(direct_ ? FinitePMF::from_weights(g, {v.begin(), v.end()})
                                   : FinitePMF::from_weights(g, softmax(v)));
          break;
        }
        case SearchSpace::LogConcaveGrid:
          out.emplace_back(knot_grid({v.begin(), v.end()}, p_.cells * resolution_factor));
          break;
        case SearchSpace::Parametric:
          if (p_.family == "gamma") {
            out.emplace_back(ParametricDensity::gamma(1.0 + std::exp(std::clamp(v[0], -30.0, 30.0)), 1.0));
          } else {
            Eigen::VectorXd mean(1);
            Eigen::MatrixXd cov(1, 1);
            mean(0) = v[0];
            cov(0, 0) = std::exp(2.0 * std::clamp(v[1], -10.0, 10.0));
            out.emplace_back(ParametricDensity::gaussian(mean, cov));
          }
          break;
      }
    }
    return out;
  }

  CheckInputs inputs(const std::vector<double>& x, std::size_t resolution_factor) const {
    CheckInputs in;
    in.densities = decode(x, resolution_factor);
    in.integers = p_.integers;
    in.reals = p_.reals;
    return in;
  }

 private:
  const SearchProblem& p_;
  bool direct_;
  std::size_t blocks_ = 1;
  std::size_t block_ = 1;
};

// Objective on the maximization scale: sigma, or -slack.
class Evaluator {
 public:
  Evaluator(const SearchProblem& p, const Space& s) : p_(p), s_(s) {}

  double operator()(const std::vector<double>& x, std::size_t resolution_factor = 1) const {
    try {
      if (p_.objective == Objective::MinimizeSlack) {
        CheckOptions o;
        o.retry = false;
        o.conv.grid.cells *= resolution_factor;
        const CheckResult r = run_check(p_.check, s_.inputs(x, resolution_factor), o);
        if (r.verdict == Verdict::Skipped) return kNegInf;
        return -r.slack;
      }
      ConvolutionOptions o;
      o.grid.cells *= resolution_factor;
      const Density d = s_.decode(x, resolution_factor)[0];
      const Sign sign = p_.objective == Objective::MaximizeSigmaMinus ? Sign::Minus : Sign::Plus;
      const SumEntropies e = sum_entropies(d, d, sign, o);
      const double n = group_of(d).real_dimension();
      return 0.5 * std::exp(2.0 * (e.h_combined - e.h_x) / n);
    } catch (const Error&) {
      return kNegInf;
    }
  }

 private:
  const SearchProblem& p_;
  const Space& s_;
};

struct Budget {
  std::size_t max_evaluations;
  double seconds;
  Clock::time_point start = Clock::now();
  std::size_t used = 0;

  bool exhausted() const {
    if (used >= max_evaluations) return true;
    return seconds > 0.0 && std::chrono::duration<double>(Clock::now() - start).count() >= seconds;
  }
};

struct RunState {
  const Space& space;
  const Evaluator& f;
  Budget budget;
  RestartTrace trace;
  std::vector<double> best_x;

  double eval(const std::vector<double>& x) {
    ++budget.used;
    const double v = f(x);
    if (best_x.empty() || v > trace.best) {
      trace.best = v;
      best_x = x;
    }
    return v;
  }
  void accept() { trace.accepted.push_back(trace.best); }
};

void nelder_mead(RunState& s, std::vector<double> x0) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += 0.5 * std::max(1.0, std::abs(x0[i]));
  for (auto& p : pts) p = s.space.project(p);
  for (std::size_t i = 0; i <= n && !s.budget.exhausted(); ++i) val[i] = s.eval(pts[i]);
  s.accept();
  std::vector<std::size_t> order(n + 1);
  while (!s.budget.exhausted()) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    if (std::isfinite(val[best]) && std::abs(val[best] - val[worst]) <= 1e-12 * (1.0 + std::abs(val[best]))) {
      s.trace.termination = "converged";
      return;
    }
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k <= n; ++k) {
        if (k != worst) c[i] += pts[k][i] / static_cast<double>(n);
      }
    }
    auto along = [&](double t) {
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = c[i] + t * (pts[worst][i] - c[i]);
      return s.space.project(y);
    };
    const auto xr = along(-1.0);
    const double fr = s.eval(xr);
    if (fr > val[best]) {
      const auto xe = along(-2.0);
      const double fe = s.eval(xe);
      if (fe > fr) {
        pts[worst] = xe, val[worst] = fe;
      } else {
        pts[worst] = xr, val[worst] = fr;
      }
    } else if (fr > val[second]) {
      pts[worst] = xr, val[worst] = fr;
    } else {
      const auto xc = fr > val[worst] ? along(-0.5) : along(0.5);
      const double fc = s.eval(xc);
      if (fc > std::max(fr, val[worst])) {
        pts[worst] = xc, val[worst] = fc;
      } else {
        for (std::size_t k = 0; k <= n && !s.budget.exhausted(); ++k) {
          if (k == best) continue;
          for (std::size_t i = 0; i < n; ++i) pts[k][i] = pts[best][i] + 0.5 * (pts[k][i] - pts[best][i]);
          pts[k] = s.space.project(pts[k]);
          val[k] = s.eval(pts[k]);
        }
      }
    }
    s.accept();
  }
  s.trace.termination = "budget exhausted";
}

void projected_gradient(RunState& s, std::vector<double> x) {
  const std::size_t n = x.size();
  double fx = s.eval(x);
  s.accept();
  double step = 1.0;
  std::vector<double> g(n);
  while (!s.budget.exhausted()) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n && !s.budget.exhausted(); ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
      auto y = x;
      y[i] += h;
      g[i] = (s.eval(s.space.project(y)) - fx) / h;
      if (!std::isfinite(g[i])) g[i] = 0.0;
      norm += g[i] * g[i];
    }
    if (s.budget.exhausted()) break;
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      s.trace.termination = "stationary";
      return;
    }
    // Backtracking along the normalized ascent direction.
    bool improved = false;
    for (step *= 2.0; step > 1e-10 && !s.budget.exhausted(); step *= 0.5) {
      auto y = x;
      for (std::size_t i = 0; i < n; ++i) y[i] += step * g[i] / norm;
      y = s.space.project(y);
      const double fy = s.eval(y);
      if (fy > fx) {
        x = std::move(y);
        fx = fy;
        improved = true;
        break;
      }
    }
    if (!improved) {
      if (!s.budget.exhausted()) s.trace.termination = "no ascent step";
      break;
    }
    s.accept();
  }
  if (s.trace.termination.empty()) s.trace.termination = "budget exhausted";
}

void simulated_annealing(RunState& s, std::vector<double> x, Rng& rng) {
  const std::size_t n = x.size();
  double fx = s.eval(x);
  s.accept();
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double step = s.space.direct_simplex() ? 0.05 : 0.5;
  const double t0 = 0.05 * (std::isfinite(fx) ? std::abs(fx) : 1.0) + 1e-3;
  std::size_t accepted = 0, proposed = 0;
  while (!s.budget.exhausted()) {
    const double progress = static_cast<double>(s.budget.used) / static_cast<double>(s.budget.max_evaluations);
    const double temp = t0 * (1.0 - progress) * (1.0 - progress) + 1e-12;
    // Sparse moves: about four coordinates at a time.
    auto y = x;
    const double rate = std::min(1.0, 4.0 / static_cast<double>(n));
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (unit(rng) < rate) y[i] += step * normal(rng), moved = true;
    }
    if (!moved) y[rng() % n] += step * normal(rng);
    y = s.space.project(y);
    const double fy = s.eval(y);
    ++proposed;
    if (fy >= fx || (std::isfinite(fy) && unit(rng) < std::exp((fy - fx) / temp))) {
      x = std::move(y);
      fx = fy;
      ++accepted;
      s.accept();
    }
    if (proposed == 50) {
      // Keep roughly a third of the proposals accepted.
      step *= accepted > 15 ? 1.5 : 0.7;
      accepted = proposed = 0;
    }
  }
  s.trace.termination = "budget exhausted";
}

}  // namespace

std::string to_string(Objective o) { return name_of(kObjectives, o); }
std::string to_string(SearchSpace s) { return name_of(kSpaces, s); }
std::string to_string(SearchMethod m) { return name_of(kMethods, m); }

json SearchProblem::to_json() const {
  json j = {{"objective", to_string(objective)}, {"space", to_string(space)}, {"modulus", modulus},
            {"knots", knots}, {"cells", cells}, {"family", family}};
  if (!check.empty()) j["check"] = check;
  if (!integers.empty()) j["integers"] = integers;
  if (!reals.empty()) j["reals"] = reals;
  return j;
}

SearchProblem SearchProblem::from_json(const json& j) {
  if (!j.is_object()) throw ParseError("search problem must be an object");
  SearchProblem p;
  try {
    p.objective = parse_enum(j, "objective", kObjectives, p.objective);
    p.space = parse_enum(j, "space", kSpaces, p.space);
    p.check = j.value("check", p.check);
    p.modulus = j.value("modulus", p.modulus);
    p.knots = j.value("knots", p.knots);
    p.cells = j.value("cells", p.cells);
    p.family = j.value("family", p.family);
    p.integers = j.value("integers", p.integers);
    p.reals = j.value("reals", p.reals);
  } catch (const json::exception& e) {
    throw ParseError(std::string("search problem: ") + e.what());
  }
  if (p.objective == Objective::MinimizeSlack && p.check.empty()) {
    throw ParseError("minimize-slack needs a \"check\"");
  }
  return p;
}

json SearchConfig::to_json() const {
  return {{"method", to_string(method)}, {"restarts", restarts}, {"seed", seed},
          {"max_evaluations", max_evaluations}, {"time_budget_seconds", time_budget_seconds}, {"threads", threads}};
}

SearchConfig SearchConfig::from_json(const json& j) {
  if (!j.is_object()) throw ParseError("search config must be an object");
  SearchConfig c;
  try {
    c.method = parse_enum(j, "method", kMethods, c.method);
    c.restarts = j.value("restarts", c.restarts);
    c.seed = j.value("seed", c.seed);
    c.max_evaluations = j.value("max_evaluations", c.max_evaluations);
    c.time_budget_seconds = j.value("time_budget_seconds", c.time_budget_seconds);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw ParseError(std::string("search config: ") + e.what());
  }
  return c;
}

std::vector<double> project_concave(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 3) return values;
  // PAV for a non-increasing fit of the differences.
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    level.push_back(values[i + 1] - values[i]);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] < level.back()) {
      const std::size_t k = level.size() - 1;
      const double c = static_cast<double>(count[k - 1] + count[k]);
      level[k - 1] = (level[k - 1] * static_cast<double>(count[k - 1]) + level[k] * static_cast<double>(count[k])) / c;
      count[k - 1] += count[k];
      level.pop_back();
      count.pop_back();
    }
  }
  std::vector<double> out(n);
  out[0] = 0.0;
  std::size_t i = 1;
  for (std::size_t b = 0; b < level.size(); ++b) {
    for (std::size_t k = 0; k < count[b]; ++k, ++i) out[i] = out[i - 1] + level[b];
  }
  const double shift = (std::accumulate(values.begin(), values.end(), 0.0) - std::accumulate(out.begin(), out.end(), 0.0)) /
                       static_cast<double>(n);
  for (auto& v : out) v += shift;
  return out;
}

std::vector<double> project_simplex(const std::vector<double>& v) {
  // Sort-based projection: find the threshold theta with sum max(v - theta, 0) = 1.
  std::vector<double> u = v;
  std::sort(u.rbegin(), u.rend());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

GridDensity knot_grid(const std::vector<double>& knot_values, std::size_t cells) {
  const std::size_t k = knot_values.size();
  if (k < 2) throw ValidationError("knot grid needs at least two knots");
  const double top = *std::max_element(knot_values.begin(), knot_values.end());
  const GridAxis axis{0.0, 1.0, cells, false};
  std::vector<double> w(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double pos = axis.midpoint(i) * static_cast<double>(k - 1);
    const std::size_t j = std::min(static_cast<std::size_t>(pos), k - 2);
    const double t = pos - static_cast<double>(j);
    w[i] = std::exp((1.0 - t) * knot_values[j] + t * knot_values[j + 1] - top);
  }
  return GridDensity::from_weights(GroupSpec::real(1), {axis}, std::move(w));
}

json SearchTrace::to_json() const {
  json rs = json::array();
  for (const auto& r : restarts) {
    rs.push_back({{"seed", r.seed}, {"evaluations", r.evaluations}, {"best", r.best},
                  {"termination", r.termination}, {"accepted", r.accepted}});
  }
  return {{"problem", problem.to_json()},
          {"config", config.to_json()},
          {"best_objective", best_objective},
          {"confirmed_objective", confirmed_objective},
          {"violation_confirmed", violation_confirmed},
          {"best_point", best_point},
          {"best_inputs", best_inputs.to_json()},
          {"termination", termination},
          {"restarts", rs},
          {"timing", {{"wall_seconds", wall_seconds}}}};
}

std::string SearchTrace::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "restart,iteration,objective\n";
  const double sign = problem.objective == Objective::MinimizeSlack ? -1.0 : 1.0;
  for (std::size_t r = 0; r < restarts.size(); ++r) {
    for (std::size_t i = 0; i < restarts[r].accepted.size(); ++i) {
      out << r << ',' << i << ',' << sign * restarts[r].accepted[i] << '\n';
    }
  }
  return out.str();
}

SearchTrace optimize(const SearchProblem& problem, const SearchConfig& config) {
  if (config.restarts < 1 || config.max_evaluations < 1) throw ValidationError("search needs restarts and evaluations >= 1");
  const auto start = Clock::now();
  const Space space(problem, config.method == SearchMethod::SimulatedAnnealing);
  const Evaluator f(problem, space);

  struct Outcome {
    RestartTrace trace;
    std::vector<double> best_x;
  };
  std::vector<Outcome> outcomes(config.restarts);
  auto run = [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(config.seed, r);
    Rng rng(seed);
    RunState s{space, f, Budget{config.max_evaluations, config.time_budget_seconds}, {}, {}};
    s.trace.seed = seed;
    auto x0 = space.initial(rng);
    switch (config.method) {
      case SearchMethod::NelderMead: nelder_mead(s, x0); break;
      case SearchMethod::ProjectedGradient: projected_gradient(s, x0); break;
      case SearchMethod::SimulatedAnnealing: simulated_annealing(s, x0, rng); break;
    }
    s.trace.evaluations = s.budget.used;
    if (s.budget.seconds > 0.0 && s.budget.used < s.budget.max_evaluations && s.budget.exhausted()) {
      s.trace.termination = "time budget exhausted";
    }
    outcomes[r] = {std::move(s.trace), std::move(s.best_x)};
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.restarts)));
  if (threads == 1) {
    for (std::size_t r = 0; r < config.restarts; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) {
      pool.emplace_back([&, k] {
        for (std::size_t r = k; r < config.restarts; r += threads) run(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  SearchTrace t;
  t.problem = problem;
  t.config = config;
  std::size_t best = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].trace.best > outcomes[best].trace.best) best = r;
    t.restarts.push_back(outcomes[r].trace);
  }
  t.best_value = outcomes[best].trace.best;
  t.best_point = outcomes[best].best_x;
  t.termination = outcomes[best].trace.termination;
  if (!std::isfinite(t.best_value)) throw ValidationError("search found no feasible point");
  t.best_inputs = space.inputs(t.best_point, 1);
  const double sign = problem.objective == Objective::MinimizeSlack ? -1.0 : 1.0;
  t.best_objective = sign * t.best_value;
  t.confirmed_objective = sign * f(t.best_point, 2);
  if (problem.objective == Objective::MinimizeSlack) {
    CheckOptions o;
    o.retry = false;
    const CheckResult r = run_check(problem.check, t.best_inputs, o);
    t.violation_confirmed = r.status == CheckStatus::Theorem && t.best_objective < -r.tolerance &&
                            t.confirmed_objective < -r.tolerance;
  }
  t.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return t;
}

}  // namespace ruzsa
