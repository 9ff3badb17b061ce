#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "ruzsa/checks.hpp"
#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"
#include "ruzsa/ruzsa_metrics.hpp"

namespace ruzsa {
namespace {

using json = nlohmann::json;

const double kLog2 = std::log(2.0);

// Tolerance class implied by the entropy paths a check touched.
struct Paths {
  ToleranceClass cls = ToleranceClass::Exact;
  void see(EntropyPath p) {
    if (p == EntropyPath::Grid) {
      cls = ToleranceClass::Grid;
    } else if (p == EntropyPath::ClosedForm && cls == ToleranceClass::Exact) {
      cls = ToleranceClass::ClosedForm;
    }
  }
};

CheckPart part(std::string label, double lhs, double rhs) { return {std::move(label), lhs, rhs, 0.0, 0.0, true}; }

bool is_finite_density(const Density& d) { return std::holds_alternative<FinitePMF>(d); }

bool closed_family(const Density& d) {
  const auto* p = std::get_if<ParametricDensity>(&d);
  if (!p) return false;
  return std::holds_alternative<GaussianParams>(p->family()) || std::holds_alternative<LogNormalParams>(p->family());
}

void require_same_group(const std::vector<Density>& ds) {
  for (std::size_t i = 1; i < ds.size(); ++i) {
    if (!(group_of(ds[i]) == group_of(ds[0]))) {
      throw ValidationError("inputs live on different groups: " + group_of(ds[0]).describe() + " and " +
                            group_of(ds[i]).describe());
    }
  }
}

// Puts every operand in one representation so that entropies of sums and of
// the operands share a discretization: all finite, all in a family closed
// under sums and differences, or all on grids.
std::vector<Density> harmonize(const std::vector<Density>& ds, const ConvolutionOptions& o) {
  require_same_group(ds);
  if (ds.empty() || std::all_of(ds.begin(), ds.end(), is_finite_density)) return ds;
  if (std::any_of(ds.begin(), ds.end(), is_finite_density)) {
    throw ValidationError("cannot mix finite and continuous inputs");
  }
  if (std::all_of(ds.begin(), ds.end(), closed_family)) return ds;
  std::vector<Density> out;
  out.reserve(ds.size());
  for (const auto& d : ds) out.emplace_back(as_grid(d, o.grid));
  return out;
}

double h(const Density& d, Paths& t) {
  const EntropyValue v = entropy(d);
  if (v.neg_infinity) throw PreconditionError("entropy is -infinity (point mass on a continuous group)");
  t.see(v.path);
  return v.nats;
}

double dr(const Density& x, const Density& y, const ConvolutionOptions& o, Paths& t) {
  const RuzsaValue v = ruzsa_divergence(x, y, o);
  t.see(v.path);
  return v.nats;
}

Density sum(const Density& x, const Density& y, const ConvolutionOptions& o) { return convolve(x, y, Sign::Plus, o); }

void require_real(const Density& d, const char* what) {
  if (group_of(d).kind() != GroupKind::RealVector) {
    throw DomainError(std::string(what) + " needs a density on R^n, got " + group_of(d).describe());
  }
}

int real_dim(const Density& d) { return group_of(d).real_dimension(); }

// Every axis-parallel line of cell masses is log-concave.
bool grid_logconcave(const GridDensity& g) {
  const auto m = g.masses();
  const auto strides = g.strides();
  std::vector<double> line;
  for (std::size_t axis = 0; axis < g.dim(); ++axis) {
    const std::size_t n = g.axes()[axis].cells;
    const std::size_t stride = strides[axis];
    for (std::size_t start = 0; start < m.size(); ++start) {
      if ((start / stride) % n != 0) continue;
      line.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) line[i] = m[start + i * stride];
      if (!is_discrete_logconcave(line, 1e-9)) return false;
    }
  }
  return true;
}

void require_logconcave(const Density& d) {
  require_real(d, "a log-concave check");
  if (const auto* p = std::get_if<ParametricDensity>(&d)) {
    if (const auto* g = std::get_if<GammaParams>(&p->family()); g && g->shape < 1.0) {
      throw PreconditionError("gamma with shape < 1 is not log-concave");
    }
    return;
  }
  if (!grid_logconcave(std::get<GridDensity>(d))) throw PreconditionError("grid masses are not log-concave");
}

// ---------------------------------------------------------------- divergences

Evaluation ev_triangle(const CheckInputs& in, const ConvolutionOptions& o) {
  const auto ds = harmonize(in.densities, o);
  Paths t;
  Evaluation e;
  e.parts.push_back(part("d(X1||X3) <= d(X1||X2) + d(X2||X3)", dr(ds[0], ds[2], o, t),
                         dr(ds[0], ds[1], o, t) + dr(ds[1], ds[2], o, t)));
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_triangle_sharp(const CheckInputs& in, const ConvolutionOptions& o) {
  for (const auto& d : in.densities) {
    if (!is_finite_density(d)) throw DomainError("ruzsa_triangle_sharp needs finite-group pmfs");
  }
  require_same_group(in.densities);
  const std::vector<FinitePMF> f = {std::get<FinitePMF>(in.densities[0]), std::get<FinitePMF>(in.densities[1]),
                                    std::get<FinitePMF>(in.densities[2])};
  // X1 is independent of (X2, X3), so d(X1||X2 | D) is the average over D = X2 - X3
  // of h(X1 - X2 | D = d) - h(X1), with X2 | D = d having law p2(x) p3(x - d).
  const GroupSpec& g = f[0].group();
  const std::size_t n = g.order();
  const double h1 = entropy(f[0]).nats;
  double cond = 0.0;
  std::vector<double> w(n);
  for (std::size_t d = 0; d < n; ++d) {
    double pd = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      w[x] = f[1][x] * f[2][g.add_index(x, g.negate_index(d))];
      pd += w[x];
    }
    if (pd <= 0.0) continue;
    cond += pd * (entropy(convolve(f[0], FinitePMF::from_weights(g, w), Sign::Minus)).nats - h1);
  }
  Paths t;
  Evaluation e;
  if (n <= 16) {
    const JointPMF j = JointPMF::product(f);
    const double generic = conditional_ruzsa_divergence(j, 0, 1, {LinearForm::diff(1, 2)}).nats;
    e.metadata["conditional_route_difference"] = std::abs(generic - cond);
  }
  e.parts.push_back(part("d(X1||X3) <= d(X1||X2 | X2-X3) + d(X2||X3)", dr(f[0], f[2], o, t),
                         cond + dr(f[1], f[2], o, t)));
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_subadditivity(const CheckInputs& in, const ConvolutionOptions& o) {
  const auto ds = harmonize(in.densities, o);
  Paths t;
  Evaluation e;
  e.parts.push_back(part("d(X||Y1+Y2) <= d(X||Y1) + d(X||Y2)", dr(ds[0], sum(ds[1], ds[2], o), o, t),
                         dr(ds[0], ds[1], o, t) + dr(ds[0], ds[2], o, t)));
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_monotonicity(const CheckInputs& in, const ConvolutionOptions& o) {
  const auto ds = harmonize(in.densities, o);
  Paths t;
  Evaluation e;
  e.parts.push_back(
      part("d(X1+X2||Y) <= d(X1||Y)", dr(sum(ds[0], ds[1], o), ds[2], o, t), dr(ds[0], ds[2], o, t)));
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_plunnecke(const CheckInputs& in, const ConvolutionOptions& o) {
  const auto ds = harmonize(in.densities, o);
  Paths t;
  Density total = ds[1];
  double rhs = dr(ds[0], ds[1], o, t);
  for (std::size_t i = 2; i < ds.size(); ++i) {
    total = sum(total, ds[i], o);
    rhs += dr(ds[0], ds[i], o, t);
  }
  Evaluation e;
  e.parts.push_back(part("d(X||Y1+...+Yk) <= sum d(X||Yi)", dr(ds[0], total, o, t), rhs));
  e.metadata["k"] = ds.size() - 1;
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_submodularity(const CheckInputs& in, const ConvolutionOptions& o) {
  const auto ds = harmonize(in.densities, o);
  Paths t;
  const Density xz = sum(ds[0], ds[2], o);
  const Density yz = sum(ds[1], ds[2], o);
  const Density xyz = sum(xz, ds[1], o);
  Evaluation e;
  e.parts.push_back(part("h(X+Y+Z) + h(Z) <= h(X+Z) + h(Y+Z)", h(xyz, t) + h(ds[2], t), h(xz, t) + h(yz, t)));
  e.tolerance_class = t.cls;
  return e;
}

// ------------------------------------------------------------ joint-law checks

const FinitePMF& finite_at(const CheckInputs& in, std::size_t i, const char* check) {
  if (!is_finite_density(in.densities.at(i))) throw DomainError(std::string(check) + " needs a finite-group pmf");
  return std::get<FinitePMF>(in.densities[i]);
}

const JointPMF& joint_at(const CheckInputs& in, std::size_t arity, const char* check) {
  if (in.joints.empty()) throw ValidationError(std::string(check) + " needs a joint law");
  const JointPMF& j = in.joints[0];
  if (j.arity() != arity) {
    throw ValidationError(std::string(check) + " needs a joint of " + std::to_string(arity) + " variables, got " +
                          std::to_string(j.arity()));
  }
  return j;
}

// Law of (X, Y, Z) with X ~ p independent of (Y, Z) ~ j.
JointPMF independent_extension(const FinitePMF& p, const JointPMF& j) {
  std::vector<GroupSpec> groups = {p.group()};
  groups.insert(groups.end(), j.groups().begin(), j.groups().end());
  std::vector<double> tensor(p.size() * j.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t k = 0; k < j.size(); ++k) tensor[i * j.size() + k] = p[i] * j.tensor()[k];
  }
  return JointPMF::from_weights(std::move(groups), std::move(tensor));
}

Evaluation ev_cond_reduces(const CheckInputs& in, const ConvolutionOptions& o) {
  const FinitePMF& px = finite_at(in, 0, "cond_reduces");
  const JointPMF& yz = joint_at(in, 2, "cond_reduces");
  if (!(yz.groups()[1] == px.group())) throw ValidationError("Z must live on the group of X");
  const JointPMF xyz = independent_extension(px, yz);
  Paths t;
  const double cond = conditional_ruzsa_divergence(xyz, 0, 2, vars({1})).nats;
  const double plain = dr(px, yz.marginal_pmf(1), o, t);
  Evaluation e;
  e.parts.push_back(part("d(X||Z | Y) <= d(X||Z)", cond, plain));
  // d(X||Z) - d(X||Z|Y) = I(Y; X - Z) for X independent of (Y, Z).
  const double gap = mutual_information(xyz, vars({1}), {LinearForm::diff(0, 2)});
  e.metadata["identity_residual"] = std::abs(plain - cond - gap);
  e.tolerance_class = t.cls;
  return e;
}

double mi(const JointPMF& j, std::size_t a, std::size_t b) { return mutual_information(j, vars({a}), vars({b})); }

Evaluation ev_cond_ruzsa_bound(const CheckInputs& in, const ConvolutionOptions&) {
  const JointPMF& j = joint_at(in, 3, "cond_ruzsa_bound");
  const double lhs = conditional_ruzsa_divergence(j).nats;
  const double rhs = 2.0 * mi(j, 0, 1) + mi(j, 2, 1) + ruzsa_difference(j, 0, 1).nats + ruzsa_difference(j, 1, 2).nats;
  Evaluation e;
  e.parts.push_back(part("d(X1||X2 | Y) <= 2I(X1;Y) + I(X2;Y) + dd(X1||Y) + dd(Y||X2)", lhs, rhs));
  return e;
}

double symmetric_bound(const JointPMF& pxy) {
  return 3.0 * mi(pxy, 0, 1) + ruzsa_difference(pxy, 0, 1).nats + ruzsa_difference(pxy, 1, 0).nats;
}

Evaluation ev_cond_ruzsa_symmetric(const CheckInputs& in, const ConvolutionOptions&) {
  const JointPMF& pxy = joint_at(in, 2, "cond_ruzsa_symmetric");
  Evaluation e;
  e.parts.push_back(part("d(X1||X2 | Y) <= 3I(X;Y) + dd(X||Y) + dd(Y||X)",
                         conditional_ruzsa_divergence(markov_triple(pxy)).nats, symmetric_bound(pxy)));
  return e;
}

Evaluation ev_bsg(const CheckInputs& in, const ConvolutionOptions&) {
  const JointPMF& pxy = joint_at(in, 2, "bsg");
  const GroupSpec& g = pxy.groups()[0];
  if (!(pxy.groups()[1] == g)) throw ValidationError("bsg needs X and Y on the same group");
  // Chain X2 - Y1 - X1 - Y2: given (X1, Y1) = (a, b), X2 ~ p(x | b) and Y2 ~ p(y | a)
  // independently, so each conditional term is one convolution per cell (a, b).
  const std::size_t n = g.order();
  const auto t = pxy.tensor();
  const FinitePMF px = pxy.marginal_pmf(0), py = pxy.marginal_pmf(1);
  std::vector<FinitePMF> x_given_y, y_given_x;
  std::vector<double> hx(n, 0.0), hy(n, 0.0), w(n);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t x = 0; x < n; ++x) w[x] = t[x * n + b];
    x_given_y.push_back(py[b] > 0.0 ? FinitePMF::from_weights(g, w) : FinitePMF::point_mass(g, 0));
    hx[b] = entropy(x_given_y.back()).nats;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t y = 0; y < n; ++y) w[y] = t[a * n + y];
    y_given_x.push_back(px[a] > 0.0 ? FinitePMF::from_weights(g, w) : FinitePMF::point_mass(g, 0));
    hy[a] = entropy(y_given_x.back()).nats;
  }
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double pab = t[a * n + b];
      if (pab <= 0.0) continue;
      const double hd = entropy(convolve(x_given_y[b], y_given_x[a], Sign::Minus)).nats;
      d1 += pab * (hd - hx[b]);
      d2 += pab * (hd - hy[a]);
    }
  }
  Evaluation e;
  if (n <= 6) {
    // Axes (X2, Y1, X1, Y2).
    const JointPMF c = markov_chain4(pxy);
    const double ci1 = conditional_mutual_information(c, vars({0}), vars({2, 3}), vars({1}));
    const double ci2 = conditional_mutual_information(c, vars({3}), vars({0, 1}), vars({2}));
    if (ci1 > 1e-10 || ci2 > 1e-10) throw PreconditionError("constructed chain is not Markov");
    const double generic = conditional_ruzsa_divergence(c, 0, 3, vars({2, 1})).nats +
                           conditional_ruzsa_divergence(c, 3, 0, vars({2, 1})).nats;
    e.metadata["markov_residual"] = std::max(ci1, ci2);
    e.metadata["conditional_route_difference"] = std::abs(generic - (d1 + d2));
  }
  e.parts.push_back(part("d(X2||Y2 | X1,Y1) + d(Y2||X2 | X1,Y1) <= 3I(X;Y) + dd(X||Y) + dd(Y||X)", d1 + d2,
                         symmetric_bound(pxy)));
  return e;
}

// ------------------------------------------------------- sums and differences

Evaluation ev_sum_difference(const CheckInputs& in, const ConvolutionOptions& o) {
  const auto ds = harmonize(in.densities, o);
  Paths t;
  Evaluation e;
  e.parts.push_back(part("d(X||-Y) <= 2d(X||Y) + d(Y||X)", dr(ds[0], negate(ds[1], o.grid), o, t),
                         2.0 * dr(ds[0], ds[1], o, t) + dr(ds[1], ds[0], o, t)));
  e.tolerance_class = t.cls;
  return e;
}

// num = h(X+X') - h(X) and den = h(X-X') - h(X) at one resolution.
struct DoublingPair {
  double num = 0.0;
  double den = 0.0;
};

DoublingPair doubling_pair(const Density& d, const ConvolutionOptions& o, Paths& t) {
  const SumEntropies p = sum_entropies(d, d, Sign::Plus, o);
  const SumEntropies m = sum_entropies(d, d, Sign::Minus, o);
  t.see(p.path);
  t.see(m.path);
  return {p.h_combined - p.h_x, m.h_combined - m.h_x};
}

Evaluation ratio_parts(const DoublingPair& r) {
  Evaluation e;
  if (!(r.den > 1e-9)) {
    e.skip_reason = "h(X-X') - h(X) <= 1e-9";
    return e;
  }
  e.parts.push_back(part("ratio >= 1/2", 0.5 * r.den, r.num));
  e.parts.push_back(part("ratio <= 2", r.num, 2.0 * r.den));
  e.metadata["ratio"] = r.num / r.den;
  return e;
}

Evaluation ev_doubling_difference_ratio(const CheckInputs& in, const ConvolutionOptions& o) {
  Paths t;
  Evaluation e = ratio_parts(doubling_pair(in.densities[0], o, t));
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_weighted_sum_lemma(const CheckInputs& in, const ConvolutionOptions& o) {
  const auto ds = harmonize(in.densities, o);
  const std::int64_t a = in.integers[0];
  const std::int64_t b = in.integers[1];
  if (a == 0 || b == 0) throw ValidationError("weighted_sum_lemma needs nonzero a and b");
  const auto da = static_cast<double>(a);
  const auto db = static_cast<double>(b);
  const Density& x = ds[0];
  const Density& z = ds[1];
  Evaluation e;
  Paths t;
  double lhs = 0.0;
  if (in.variant.empty() || in.variant == "aX+Z") {
    lhs = h(weighted_sum({da, 1.0}, {x, z}, o).law, t);
  } else if (in.variant == "aX+bX'") {
    lhs = h(weighted_sum({da, db}, {x, x}, o).law, t);
    e.status = CheckStatus::Observational;
  } else {
    throw ValidationError("weighted_sum_lemma variant must be \"aX+Z\" or \"aX+bX'\", got \"" + in.variant + "\"");
  }
  const double hx = h(x, t);
  const double d_xx = dr(x, x, o, t);
  e.parts.push_back(part("h(.) <= h((a-b)X + bX' + Z) + d(X||X)", lhs,
                         h(weighted_sum({da - db, db, 1.0}, {x, x, z}, o).law, t) + d_xx));
  if (a % 2 == 0) {
    e.parts.push_back(part("h(.) <= h((a/2)X + Z) + h(2X - X') - h(X)", lhs,
                           h(weighted_sum({da / 2.0, 1.0}, {x, z}, o).law, t) +
                               h(weighted_sum({2.0, -1.0}, {x, x}, o).law, t) - hx));
  }
  e.metadata["left_side"] = in.variant.empty() ? "aX+Z" : in.variant;
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_weighted_sum_theorem(const CheckInputs& in, const ConvolutionOptions& o) {
  const auto ds = harmonize(in.densities, o);
  const std::int64_t a = in.integers[0];
  const std::int64_t b = in.integers[1];
  if (a < 1 || b < 1) throw ValidationError("weighted_sum_theorem needs a, b >= 1");
  const double tau = 6.0 * (std::floor(std::log(static_cast<double>(a))) +
                            std::floor(std::log(static_cast<double>(b))) + 2.0);
  Paths t;
  const double lhs = h(weighted_sum({static_cast<double>(a), static_cast<double>(b)}, {ds[0], ds[1]}, o).law, t) -
                     h(sum(ds[0], ds[1], o), t);
  const double rhs =
      tau * (dr(ds[0], negate(ds[1], o.grid), o, t) + dr(ds[1], negate(ds[0], o.grid), o, t));
  Evaluation e;
  e.parts.push_back(part("h(aX+bY) - h(X+Y) <= tau (d(X||-Y) + d(Y||-X))", lhs, rhs));
  e.metadata["tau"] = tau;
  e.tolerance_class = t.cls;
  return e;
}

// ------------------------------------------------------- other groups

void require_kind(const Density& d, GroupKind k, const char* check) {
  if (group_of(d).kind() != k) throw DomainError(std::string(check) + " does not accept " + group_of(d).describe());
}

Evaluation ev_multiplicative_pair(const CheckInputs& in, const ConvolutionOptions& o) {
  const Density& x = in.densities[0];
  require_kind(x, GroupKind::MultiplicativePositive, "multiplicative_pair");
  const Density d = closed_family(x) ? x : Density(as_grid(x, o.grid));
  const Density prod = convolve(d, d, Sign::Plus, o);
  const Density ratio = convolve(d, d, Sign::Minus, o);
  const MultiplicativeEntropy mx = multiplicative_entropy(d);
  const double hp = multiplicative_entropy(prod).lebesgue;
  const double hq = multiplicative_entropy(ratio).lebesgue;
  const double mu = mx.log_mean;
  Evaluation e;
  e.parts.push_back(part("h(XY) <= 2h(X/Y) - h(X) + 3E[log X]", hp, 2.0 * hq - mx.lebesgue + 3.0 * mu));
  e.parts.push_back(part("h(X/Y) <= 2h(XY) - h(X) - 3E[log X]", hq, 2.0 * hp - mx.lebesgue - 3.0 * mu));
  e.metadata["log_mean"] = mu;
  const bool grid = std::holds_alternative<GridDensity>(d);
  e.tolerance_class = grid ? ToleranceClass::Grid : ToleranceClass::ClosedForm;
  if (grid) {
    // Same entropies by quadrature in x-space, without the log-transform identity.
    const double qx = lebesgue_entropy_quadrature(std::get<GridDensity>(d));
    const double qp = lebesgue_entropy_quadrature(std::get<GridDensity>(prod));
    const double qq = lebesgue_entropy_quadrature(std::get<GridDensity>(ratio));
    e.metadata["quadrature"] = {{"h_x", qx}, {"h_product", qp}, {"h_ratio", qq}};
    e.metadata["quadrature_max_discrepancy"] =
        std::max({std::abs(qx - mx.lebesgue), std::abs(qp - hp), std::abs(qq - hq)});
  }
  return e;
}

Evaluation ev_circle_ratio(const CheckInputs& in, const ConvolutionOptions& o) {
  require_kind(in.densities[0], GroupKind::Circle, "circle_ratio");
  Paths t;
  Evaluation e = ratio_parts(doubling_pair(in.densities[0], o, t));
  const GridDensity g = as_grid(in.densities[0], o.grid);
  e.metadata["relative_entropy_to_uniform"] = circle_relative_entropy(g);
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_complex_pair(const CheckInputs& in, const ConvolutionOptions& o) {
  require_kind(in.densities[0], GroupKind::MultiplicativeComplex, "complex_pair");
  const GridDensity z = as_grid(in.densities[0], o.grid);
  const GridDensity prod = convolve(z, z, Sign::Plus, o);
  const GridDensity ratio = convolve(z, z, Sign::Minus, o);
  const MultiplicativeEntropy mz = complex_multiplicative_entropy(z);
  const double hp = complex_multiplicative_entropy(prod).lebesgue;
  const double hq = complex_multiplicative_entropy(ratio).lebesgue;
  const double mu = mz.log_mean;
  Evaluation e;
  e.parts.push_back(part("h(Z1 Z2) <= 2h(Z1/Z2) - h(Z1) + 6E[log|Z1|]", hp, 2.0 * hq - mz.lebesgue + 6.0 * mu));
  e.parts.push_back(part("h(Z1/Z2) <= 2h(Z1 Z2) - h(Z1) - 6E[log|Z1|]", hq, 2.0 * hp - mz.lebesgue - 6.0 * mu));
  e.metadata["log_mean"] = mu;
  e.tolerance_class = ToleranceClass::Grid;
  return e;
}

// ------------------------------------------------------- R^n and log-concavity

Evaluation ev_epi_lower(const CheckInputs& in, const ConvolutionOptions& o) {
  const Density& d = in.densities[0];
  require_real(d, "epi_lower");
  Paths t;
  const DoublingPair r = doubling_pair(d, o, t);
  const double bound = 0.5 * real_dim(d) * kLog2;
  Evaluation e;
  e.parts.push_back(part("(n/2) log 2 <= d(X||X)", bound, r.den));
  e.parts.push_back(part("(n/2) log 2 <= d(X||-X)", bound, r.num));
  e.tolerance_class = t.cls;
  return e;
}

SigmaValue sigma_seen(const Density& d, Sign s, const ConvolutionOptions& o, Paths& t) {
  const SigmaValue v = sigma(d, s, o);
  t.see(v.path);
  return v;
}

Evaluation ev_ball_nguyen(const CheckInputs& in, const ConvolutionOptions& o) {
  const Density& d = in.densities[0];
  require_logconcave(d);
  const double c = in.reals[0];
  if (!(c > 0.0)) throw ValidationError("Poincare constant must be positive");
  const int n = real_dim(d);
  Paths t;
  const SigmaValue sp = sigma_seen(d, Sign::Plus, o, t);
  const Density basis = std::holds_alternative<ParametricDensity>(d) && sp.path == EntropyPath::Grid
                            ? Density(as_grid(d, o.grid))
                            : d;
  const double rel = gaussian_relative_entropy(basis);
  Evaluation e;
  e.parts.push_back(part("D(X)/n <= (2(1+c)/c) log sigma+", rel / n, 2.0 * (1.0 + c) / c * std::log(sp.value)));
  e.metadata["relative_entropy"] = rel;
  e.metadata["sigma_plus"] = sp.value;
  // h((X1+X2)/sqrt 2) - h(X) = (n/2) log sigma+ against c D(X) / (4(1+c)).
  e.metadata["entropy_jump"] = 0.5 * n * std::log(sp.value);
  e.metadata["entropy_jump_bound"] = c / (4.0 * (1.0 + c)) * rel;
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_gauss_distance(const CheckInputs& in, const ConvolutionOptions& o) {
  const Density& d = in.densities[0];
  require_real(d, "gauss_distance");
  Paths t;
  const SigmaValue sp = sigma_seen(d, Sign::Plus, o, t);
  const SigmaValue sm = sigma_seen(d, Sign::Minus, o, t);
  const bool grid = sp.path == EntropyPath::Grid || sm.path == EntropyPath::Grid;
  const Density basis = grid ? Density(as_grid(d, o.grid)) : d;
  const double rel = gaussian_relative_entropy(basis);
  Evaluation e;
  e.parts.push_back(part("(1/4)|log sigma+ - log sigma-| <= D(X)/n",
                         0.25 * std::abs(std::log(sp.value) - std::log(sm.value)), rel / real_dim(d)));
  e.metadata["sigma_plus"] = sp.value;
  e.metadata["sigma_minus"] = sm.value;
  e.metadata["relative_entropy"] = rel;
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_cover_zhang(const CheckInputs& in, const ConvolutionOptions& o) {
  const Density& d = in.densities[0];
  require_logconcave(d);
  if (real_dim(d) != 1) throw DomainError("cover_zhang is one-dimensional");
  Evaluation e;
  if (in.joints.empty()) {
    Paths t;
    const SumEntropies s = sum_entropies(d, d, Sign::Plus, o);
    t.see(s.path);
    e.parts.push_back(part("h(X+Y) <= h(2X)", s.h_combined, s.h_x + kLog2));
    e.metadata["coupling"] = "independent";
    e.tolerance_class = t.cls;
    return e;
  }
  // Coupling of cell indices: X + Y lands in cell i + j at the common width.
  const GridDensity g = as_grid(d, o.grid);
  const JointPMF& pi = joint_at(in, 2, "cover_zhang");
  const std::size_t n = g.total_cells();
  if (pi.shape()[0] != n || pi.shape()[1] != n) throw ValidationError("coupling shape must match the grid cells");
  const FinitePMF m0 = pi.marginal_pmf(0);
  const FinitePMF m1 = pi.marginal_pmf(1);
  double marginal_error = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    marginal_error = std::max({marginal_error, std::abs(m0[i] - g.masses()[i]), std::abs(m1[i] - g.masses()[i])});
  }
  if (marginal_error > 1e-9) throw PreconditionError("coupling marginals differ from the density");
  std::vector<double> w(2 * n - 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w[i + j] += pi.tensor()[i * n + j];
  }
  const GridAxis& ax = g.axes()[0];
  const double width = ax.width();
  const double lo = 2.0 * ax.lo + 0.5 * width;
  const GridDensity s = GridDensity::from_weights(g.group(), {{lo, lo + width * static_cast<double>(w.size()), w.size()}}, w);
  e.parts.push_back(part("h(X+Y) <= h(2X)", entropy(s).nats, entropy(g).nats + kLog2));
  e.metadata["coupling"] = "joint";
  e.metadata["marginal_error"] = marginal_error;
  e.tolerance_class = ToleranceClass::Grid;
  return e;
}

Evaluation sigma_bound(const CheckInputs& in, const ConvolutionOptions& o, Sign s, double bound, const char* label,
                       bool one_dim) {
  const Density& d = in.densities[0];
  require_logconcave(d);
  if (one_dim && real_dim(d) != 1) throw DomainError("this check is one-dimensional");
  Paths t;
  const SigmaValue v = sigma_seen(d, s, o, t);
  Evaluation e;
  e.parts.push_back(part(label, v.value, bound));
  e.metadata["bias_estimate"] = v.bias_estimate;
  e.metadata["truncated_mass"] = v.truncated_mass;
  e.tolerance_class = t.cls;
  return e;
}

Evaluation ev_reverse_epi(const CheckInputs& in, const ConvolutionOptions& o) {
  return sigma_bound(in, o, Sign::Plus, 2.0, "sigma+ <= 2", false);
}

Evaluation ev_rogers_shephard(const CheckInputs& in, const ConvolutionOptions& o) {
  return sigma_bound(in, o, Sign::Minus, 8.0, "sigma- <= 8", false);
}

Evaluation ev_conjecture_sd(const CheckInputs& in, const ConvolutionOptions& o) {
  return sigma_bound(in, o, Sign::Minus, 2.0, "sigma- <= 2", true);
}

Evaluation ev_ruzsa_div_ub(const CheckInputs& in, const ConvolutionOptions& o) {
  const Density& d = in.densities[0];
  require_logconcave(d);
  const double n = real_dim(d);
  Paths t;
  const DoublingPair r = doubling_pair(d, o, t);
  Evaluation e;
  e.parts.push_back(part("d(X||X) <= 2n log 2", r.den, 2.0 * n * kLog2));
  e.parts.push_back(part("d(X||-X) <= n log 2", r.num, n * kLog2));
  e.tolerance_class = t.cls;
  return e;
}

// ------------------------------------------------------- matrices and sets

void require_same_dim(const std::vector<PDMatrix>& ms) {
  for (const auto& m : ms) {
    if (m.dim() != ms[0].dim()) throw ValidationError("matrices have different dimensions");
  }
}

Evaluation ev_det_minkowski(const CheckInputs& in, const ConvolutionOptions&) {
  require_same_dim(in.matrices);
  const auto& a = in.matrices[0].matrix();
  const auto& b = in.matrices[1].matrix();
  const double inv_n = 1.0 / static_cast<double>(a.rows());
  Evaluation e;
  e.parts.push_back(part("det(A)^(1/n) + det(B)^(1/n) <= det(A+B)^(1/n)",
                         std::pow(a.determinant(), inv_n) + std::pow(b.determinant(), inv_n),
                         std::pow((a + b).determinant(), inv_n)));
  e.tolerance_class = ToleranceClass::Relative;
  return e;
}

Evaluation ev_det_rotfeld(const CheckInputs& in, const ConvolutionOptions&) {
  require_same_dim(in.matrices);
  const auto& a = in.matrices[0].matrix();
  const auto& b = in.matrices[1].matrix();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Evaluation e;
  e.parts.push_back(part("det(I+A+B) <= det(I+A) det(I+B)", (id + a + b).determinant(),
                         (id + a).determinant() * (id + b).determinant()));
  e.tolerance_class = ToleranceClass::Relative;
  return e;
}

Evaluation ev_det_sum(const CheckInputs& in, const ConvolutionOptions& o) {
  require_same_dim(in.matrices);
  const auto& k = in.matrices[0].matrix();
  const std::size_t count = in.matrices.size() - 1;
  Eigen::MatrixXd total = k;
  const double det_k = k.determinant();
  double rhs = std::pow(det_k, -static_cast<double>(count - 1));
  for (std::size_t j = 1; j <= count; ++j) {
    total += in.matrices[j].matrix();
    rhs *= (k + in.matrices[j].matrix()).determinant();
  }
  const double lhs = total.determinant();

  // Same inequality from divergences of centred Gaussians:
  // det(K + sum K_j) = det K exp(2 d(X||sum Y_j)), det(K + K_j) = det K exp(2 d(X||Y_j)).
  const int n = in.matrices[0].dim();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Density x = ParametricDensity::gaussian(zero, k);
  Density ysum = ParametricDensity::gaussian(zero, in.matrices[1].matrix());
  Paths t;
  double d_each = dr(x, ysum, o, t);
  for (std::size_t j = 2; j <= count; ++j) {
    const Density y = ParametricDensity::gaussian(zero, in.matrices[j].matrix());
    d_each += dr(x, y, o, t);
    ysum = sum(ysum, y, o);
  }
  const double det_k_entropy = std::exp(2.0 * h(x, t) - n * std::log(2.0 * M_PI * std::exp(1.0)));
  const double lhs_e = det_k_entropy * std::exp(2.0 * dr(x, ysum, o, t));
  const double rhs_e = det_k_entropy * std::exp(2.0 * d_each);

  Evaluation e;
  e.parts.push_back(part("det(K + sum K_j) <= det(K)^-(k-1) prod det(K + K_j)", lhs, rhs));
  e.metadata["entropy_route_lhs"] = lhs_e;
  e.metadata["entropy_route_rhs"] = rhs_e;
  e.metadata["route_relative_difference"] = std::max(std::abs(lhs - lhs_e) / lhs, std::abs(rhs - rhs_e) / rhs);
  e.tolerance_class = ToleranceClass::Relative;
  return e;
}

Evaluation ev_sumset_triangle(const CheckInputs& in, const ConvolutionOptions&) {
  if (in.sets.size() != 3 || !in.set_group) throw ValidationError("sumset_triangle needs three sets and their group");
  const GroupSpec& g = *in.set_group;
  if (!g.is_finite()) throw DomainError("sumset_triangle needs a finite group");
  for (const auto& s : in.sets) {
    if (s.empty()) throw ValidationError("sumset_triangle needs nonempty sets");
  }
  const auto size = [&](const ElementSet& a, const ElementSet& b) {
    return static_cast<double>(difference_set(g, a, b).size());
  };
  Evaluation e;
  e.parts.push_back(part("|A-C| |B| <= |A-B| |B-C|", size(in.sets[0], in.sets[2]) * static_cast<double>(in.sets[1].size()),
                         size(in.sets[0], in.sets[1]) * size(in.sets[1], in.sets[2])));
  return e;
}

Evaluation ev_discrete_sd_ratio(const CheckInputs& in, const ConvolutionOptions&) {
  const FinitePMF& p = finite_at(in, 0, "discrete_sd_ratio");
  const double hp = entropy(convolve(p, p, Sign::Plus)).nats;
  const double hm = entropy(convolve(p, p, Sign::Minus)).nats;
  Evaluation e;
  if (!(hm > 1e-9)) {
    e.skip_reason = "H(X-X') <= 1e-9";
    return e;
  }
  const double ratio = hp / hm;
  e.parts.push_back(part("3/4 <= H(X+X')/H(X-X')", 0.75, ratio));
  e.parts.push_back(part("H(X+X')/H(X-X') <= 4/3", ratio, 4.0 / 3.0));
  e.metadata["ratio"] = ratio;
  return e;
}

std::vector<CheckSpec> build_registry() {
  using S = CheckStatus;
  using D = InputDomain;
  const S thm = S::Theorem;
  return {
      {"ruzsa_triangle", "Ruzsa triangle inequality for entropy", "d(X1||X3) <= d(X1||X2) + d(X2||X3)", thm,
       D::AnyGroup, 3, 0, 0, 0, ev_triangle},
      {"ruzsa_triangle_sharp", "Ruzsa triangle inequality, conditional refinement",
       "d(X1||X3) <= d(X1||X2 | X2-X3) + d(X2||X3)", thm, D::Finite, 3, 0, 0, 0, ev_triangle_sharp},
      {"subadditivity", "Subadditivity of Ruzsa divergence", "d(X||Y1+Y2) <= d(X||Y1) + d(X||Y2)", thm, D::AnyGroup,
       3, 0, 0, 0, ev_subadditivity},
      {"monotonicity", "Monotonicity of Ruzsa divergence", "d(X1+X2||Y) <= d(X1||Y)", thm, D::AnyGroup, 3, 0, 0, 0,
       ev_monotonicity},
      {"plunnecke_ruzsa", "Entropic Plunnecke-Ruzsa inequality", "d(X||Y1+...+Yk) <= sum_i d(X||Yi)", thm,
       D::AnyGroup, -1, 0, 0, 0, ev_plunnecke},
      {"submodularity", "Submodularity of entropy of sums", "h(X+Y+Z) + h(Z) <= h(X+Z) + h(Y+Z)", thm, D::AnyGroup,
       3, 0, 0, 0, ev_submodularity},
      {"cond_reduces", "Conditioning reduces Ruzsa divergence", "d(X||Z | Y) <= d(X||Z)", thm, D::DensityJoint, 1, 0,
       0, 0, ev_cond_reduces},
      {"cond_ruzsa_bound", "Conditional Ruzsa divergence bound",
       "d(X1||X2 | Y) <= 2I(X1;Y) + I(X2;Y) + dd(X1||Y) + dd(Y||X2)", thm, D::MarkovTriple, 0, 0, 0, 0,
       ev_cond_ruzsa_bound},
      {"cond_ruzsa_symmetric", "Conditional Ruzsa divergence bound, conditionally i.i.d. case",
       "d(X1||X2 | Y) <= 3I(X;Y) + dd(X||Y) + dd(Y||X)", thm, D::JointPair, 0, 0, 0, 0, ev_cond_ruzsa_symmetric},
      {"bsg", "Entropic Balog-Szemeredi-Gowers inequality",
       "d(X2||Y2 | X1,Y1) + d(Y2||X2 | X1,Y1) <= 3I(X;Y) + dd(X||Y) + dd(Y||X)", thm, D::JointPair, 0, 0, 0, 0,
       ev_bsg},
      {"sum_difference", "Entropic sum-difference inequality", "d(X||-Y) <= 2d(X||Y) + d(Y||X)", thm, D::AnyGroup, 2,
       0, 0, 0, ev_sum_difference},
      {"doubling_difference_ratio", "Doubling-difference comparison for i.i.d. copies",
       "1/2 <= (h(X+X') - h(X)) / (h(X-X') - h(X)) <= 2", thm, D::AnyGroup, 1, 0, 0, 0,
       ev_doubling_difference_ratio},
      {"weighted_sum_lemma", "Weighted sums lemma",
       "h(aX+Z) <= h((a-b)X + bX' + Z) + d(X||X); for even a also <= h((a/2)X + Z) + h(2X-X') - h(X)", thm,
       D::AnyGroup, 2, 0, 2, 0, ev_weighted_sum_lemma},
      {"weighted_sum_theorem", "Entropy of weighted sums",
       "h(aX+bY) - h(X+Y) <= 6(floor(log a) + floor(log b) + 2) (d(X||-Y) + d(Y||-X))", thm, D::AnyGroup, 2, 0, 2,
       0, ev_weighted_sum_theorem},
      {"multiplicative_pair", "Products and ratios of positive random variables",
       "h(XY) <= 2h(X/Y) - h(X) + 3E[log X] and h(X/Y) <= 2h(XY) - h(X) - 3E[log X]", thm, D::Positive, 1, 0, 0, 0,
       ev_multiplicative_pair},
      {"circle_ratio", "Doubling-difference comparison on the circle",
       "1/2 <= (h(T+T') - h(T)) / (h(T-T') - h(T)) <= 2", thm, D::Circle, 1, 0, 0, 0, ev_circle_ratio},
      {"complex_pair", "Products and ratios of nonzero complex random variables",
       "h(Z1 Z2) <= 2h(Z1/Z2) - h(Z1) + 6E[log|Z1|] and h(Z1/Z2) <= 2h(Z1 Z2) - h(Z1) - 6E[log|Z1|]", thm,
       D::Complex, 1, 0, 0, 0, ev_complex_pair},
      {"epi_lower", "Lower bound on Ruzsa divergence from the entropy power inequality",
       "d(X||X) >= (n/2) log 2 and d(X||-X) >= (n/2) log 2", thm, D::Continuous, 1, 0, 0, 0, ev_epi_lower},
      {"ball_nguyen", "Stability of the doubling constant under a Poincare inequality",
       "D(X)/n <= (2(1+c)/c) log sigma+(X)", thm, D::LogConcave, 1, 0, 0, 1, ev_ball_nguyen},
      {"gauss_distance", "Distance from Gaussianity bounds the doubling-difference gap",
       "D(X)/n >= (1/4) |log sigma+(X) - log sigma-(X)|", thm, D::Continuous, 1, 0, 0, 0, ev_gauss_distance},
      {"cover_zhang", "Cover-Zhang inequality for dependent sums", "h(X+Y) <= h(2X) for equal log-concave marginals",
       thm, D::Coupling, 1, 0, 0, 0, ev_cover_zhang},
      {"reverse_epi_iid", "Reverse entropy power inequality for i.i.d. log-concave copies", "sigma+(X) <= 2", thm,
       D::LogConcave, 1, 0, 0, 0, ev_reverse_epi},
      {"rogers_shephard_entropy", "Entropic Rogers-Shephard inequality", "sigma-(X) <= 8", thm, D::LogConcave, 1, 0,
       0, 0, ev_rogers_shephard},
      {"ruzsa_div_ub", "Upper bounds on Ruzsa divergence for log-concave laws",
       "d(X||X) <= 2n log 2 and d(X||-X) <= n log 2", thm, D::LogConcave, 1, 0, 0, 0, ev_ruzsa_div_ub},
      {"conjecture_sd", "Conjectured sharp difference constant on the line", "sigma-(X) <= 2", S::Conjecture,
       D::LogConcave, 1, 0, 0, 0, ev_conjecture_sd},
      {"det_minkowski", "Minkowski determinant inequality", "det(A+B)^(1/n) >= det(A)^(1/n) + det(B)^(1/n)", thm,
       D::Matrices, 0, 2, 0, 0, ev_det_minkowski},
      {"det_rotfeld", "Rotfel'd determinant inequality", "det(I+A+B) <= det(I+A) det(I+B)", thm, D::Matrices, 0, 2,
       0, 0, ev_det_rotfeld},
      {"det_sum", "Determinant inequality for sums of positive-definite matrices",
       "det(K + sum_j K_j) <= det(K)^-(k-1) prod_j det(K + K_j)", thm, D::Matrices, 0, -1, 0, 0, ev_det_sum},
      {"sumset_triangle", "Ruzsa triangle inequality for sets", "|A-C| |B| <= |A-B| |B-C|", thm, D::Sets, 0, 0, 0,
       0, ev_sumset_triangle},
      {"discrete_sd_ratio", "Sum-difference entropy ratio on finite groups", "3/4 <= H(X+X')/H(X-X') <= 4/3",
       S::Observational, D::Finite, 1, 0, 0, 0, ev_discrete_sd_ratio},
  };
}

}  // namespace

const std::vector<CheckSpec>& check_registry() {
  static const std::vector<CheckSpec> registry = build_registry();
  return registry;
}

}  // namespace ruzsa
