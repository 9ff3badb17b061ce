#include "ruzsa/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

std::vector<double> dirichlet(std::size_t n, double alpha, Rng& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = gamma(rng);
    total += x;
  }
  if (!(total > 0.0)) {
    // Every draw underflowed; fall back to a single atom.
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::fill(w.begin(), w.end(), 0.0);
    w[pick(rng)] = 1.0;
  }
  return w;
}

// Non-increasing slopes; a few jumps give kinks, many give curvature.
std::vector<double> decreasing_slopes(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> drop(1.0);
  const double p_jump = unit(rng);
  std::vector<double> slope(n);
  if (n == 0) return slope;
  slope[0] = 2.0 * unit(rng) - 1.0;
  for (std::size_t k = 1; k < n; ++k) slope[k] = slope[k - 1] - (unit(rng) < p_jump ? drop(rng) : 0.0);
  return slope;
}

// Integrates slopes over the given segment lengths and rescales so that
// max - min equals `range` (and the maximum is 0).
std::vector<double> integrate_slopes(const std::vector<double>& slope, const std::vector<double>& len, double range) {
  std::vector<double> out(slope.size() + 1, 0.0);
  for (std::size_t k = 0; k < slope.size(); ++k) out[k + 1] = out[k] + slope[k] * len[k];
  const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
  const double span = *hi - *lo;
  const double top = *hi;
  const double s = span > 0.0 ? range / span : 1.0;
  for (auto& v : out) v = (v - top) * s;
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FinitePMF random_pmf(const GroupSpec& g, double concentration, Rng& rng, std::size_t support_size) {
  if (!(concentration > 0.0)) throw ValidationError("concentration must be positive");
  const std::size_t n = g.order();
  if (support_size == 0 || support_size > n) support_size = n;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto w = dirichlet(support_size, concentration, rng);
  std::vector<double> p(n, 0.0);
  for (std::size_t k = 0; k < support_size; ++k) p[idx[k]] = w[k];
  return FinitePMF::from_weights(g, std::move(p));
}

FinitePMF random_pmf_mixed(const GroupSpec& g, Rng& rng) {
  std::uniform_real_distribution<double> logc(std::log(0.05), std::log(5.0));
  std::uniform_int_distribution<std::size_t> size(1, g.order());
  const std::size_t s = (rng() % 4 == 0) ? size(rng) : g.order();
  return random_pmf(g, std::exp(logc(rng)), rng, s);
}

FinitePMF random_logconcave_pmf(std::size_t m, Rng& rng) {
  if (m < 3) throw ValidationError("log-concave pmf needs m >= 3");
  std::uniform_int_distribution<std::size_t> len(1, m);
  const std::size_t n = len(rng);
  std::uniform_int_distribution<std::size_t> start(0, m - n);
  const std::size_t s = start(rng);
  std::uniform_real_distribution<double> range(0.0, 30.0);
  const auto logp = integrate_slopes(decreasing_slopes(n - 1, rng), std::vector<double>(n - 1, 1.0), range(rng));
  std::vector<double> p(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) p[s + k] = std::exp(logp[k]);
  return FinitePMF::from_weights(GroupSpec::cyclic(static_cast<std::int64_t>(m)), std::move(p));
}

GridDensity random_logconcave_grid(std::size_t cells, Rng& rng) {
  if (cells < 3) throw ValidationError("log-concave grid needs at least 3 cells");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Support [a, b) inside [0, 1).
  double a = 0.0, b = 1.0;
  if (unit(rng) < 0.3) {
    a = 0.3 * unit(rng);
    b = 1.0 - 0.3 * unit(rng);
  }
  std::uniform_int_distribution<int> knots_dist(1, 8);
  const int knots = knots_dist(rng);
  std::vector<double> t(static_cast<std::size_t>(knots) + 1);
  t[0] = a;
  for (int k = 1; k < knots; ++k) t[static_cast<std::size_t>(k)] = a + (b - a) * unit(rng);
  t[static_cast<std::size_t>(knots)] = b;
  std::sort(t.begin(), t.end());
  std::vector<double> len(t.size() - 1);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) len[k] = t[k + 1] - t[k];
  const auto value = integrate_slopes(decreasing_slopes(len.size(), rng), len, 40.0 * unit(rng));
  std::vector<double> w(cells, 0.0);
  const GridAxis axis{0.0, 1.0, cells, false};
  for (std::size_t i = 0; i < cells; ++i) {
    const double x = axis.midpoint(i);
    if (x < a || x >= b) continue;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin());
    k = std::clamp<std::size_t>(k, 1, t.size() - 1);
    const double span = t[k] - t[k - 1];
    const double u = span > 0 ? (x - t[k - 1]) / span : 0.0;
    w[i] = std::exp(value[k - 1] + u * (value[k] - value[k - 1]));
  }
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[cells / 2] = 1.0;
  return GridDensity::from_weights(GroupSpec::real(1), {axis}, std::move(w));
}

constexpr double kMassRoundoff = 1e-15;

bool is_discrete_logconcave(std::span<const double> masses, double tol) {
  std::size_t first = 0;
  while (first < masses.size() && masses[first] == 0.0) ++first;
  if (first == masses.size()) return false;
  std::size_t last = masses.size() - 1;
  while (masses[last] == 0.0) --last;
  for (std::size_t k = first; k <= last; ++k) {
    if (!(masses[k] > 0.0)) return false;
  }
  for (std::size_t k = first + 1; k < last; ++k) {
    const double d2 = std::log(masses[k + 1]) - 2.0 * std::log(masses[k]) + std::log(masses[k - 1]);
    const double roundoff = kMassRoundoff * (1.0 / masses[k + 1] + 2.0 / masses[k] + 1.0 / masses[k - 1]);
    if (d2 > tol + roundoff) return false;
  }
  return true;
}

GridDensity random_lattice_grid(std::size_t m, std::size_t upsample, Rng& rng) {
  if (m < 1 || upsample < 1) throw ValidationError("lattice grid needs m, upsample >= 1");
  const auto p = random_pmf_mixed(GroupSpec::cyclic(static_cast<std::int64_t>(m)), rng);
  std::vector<double> w(m * upsample);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < upsample; ++k) w[i * upsample + k] = p[i];
  return GridDensity::from_weights(GroupSpec::real(1), {GridAxis{0.0, static_cast<double>(m), m * upsample, false}},
                                   std::move(w));
}

JointPMF random_joint(const std::vector<GroupSpec>& groups, Rng& rng) {
  std::size_t n = 1;
  for (const auto& g : groups) n *= g.order();
  std::uniform_real_distribution<double> logc(std::log(0.05), std::log(5.0));
  auto w = dirichlet(n, std::exp(logc(rng)), rng);
  if (rng() % 4 == 0) {
    // Sparse support.
    std::bernoulli_distribution keep(0.3);
    for (auto& x : w) {
      if (!keep(rng)) x = 0.0;
    }
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[rng() % n] = 1.0;
  }
  return JointPMF::from_weights(groups, std::move(w));
}

ElementSet random_set(const GroupSpec& g, Rng& rng) {
  const std::size_t n = g.order();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double density = unit(rng);
  ElementSet s;
  for (std::size_t i = 0; i < n; ++i) {
    if (unit(rng) < density) s.push_back(i);
  }
  if (s.empty()) s.push_back(rng() % n);
  return s;
}

Eigen::MatrixXd random_pd_matrix(int n, Rng& rng, double eps) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
  std::uniform_real_distribution<double> log_scale(std::log(0.1), std::log(10.0));
  Eigen::MatrixXd a = m.transpose() * m + eps * Eigen::MatrixXd::Identity(n, n);
  a *= std::exp(log_scale(rng));
  return 0.5 * (a + a.transpose());
}

IntegerMatrix random_gl2z(Rng& rng, int steps, int max_shear) {
  std::uniform_int_distribution<int> shear(-max_shear, max_shear);
  IntegerMatrix a = IntegerMatrix::identity(2);
  for (int s = 0; s < steps; ++s) {
    const int k = shear(rng);
    switch (rng() % 4) {
      case 0: a = IntegerMatrix{{1, k}, {0, 1}} * a; break;
      case 1: a = IntegerMatrix{{1, 0}, {k, 1}} * a; break;
      case 2: a = IntegerMatrix{{0, 1}, {1, 0}} * a; break;
      default: a = IntegerMatrix{{-1, 0}, {0, 1}} * a; break;
    }
  }
  return a;
}

}  // namespace ruzsa
