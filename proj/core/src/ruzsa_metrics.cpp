#include "ruzsa/ruzsa_metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

constexpr double kIdentityTolerance = 1e-10;

void require_finite(const EntropyValue& h, const char* what) {
  if (h.neg_infinity) throw DomainError(std::string(what) + " has entropy -infinity");
}

}  // namespace

SumEntropies sum_entropies(const Density& x, const Density& y, Sign sign, const ConvolutionOptions& opts) {
  if (!(group_of(x) == group_of(y))) throw DomainError("densities on different groups");
  SumEntropies out;
  if (std::holds_alternative<FinitePMF>(x) || has_closed_form(x, y, sign)) {
    const auto hx = entropy(x);
    const auto hy = entropy(y);
    const auto hs = entropy(convolve(x, y, sign, opts));
    out.h_x = hx.nats;
    out.h_y = hy.nats;
    out.h_combined = hs.nats;
    out.path = hx.path;
    return out;
  }
  const GridDensity gx = as_grid(x, opts.grid);
  const GridDensity gy = as_grid(y, opts.grid);
  const auto hx = entropy(gx);
  const auto hy = entropy(gy);
  require_finite(hx, "X");
  const GridDensity s = convolve(gx, gy, sign, opts);
  const auto hs = entropy(s);
  require_finite(hs, "X +- Y");
  out.h_x = hx.nats;
  out.h_y = hy.nats;
  out.h_combined = hs.nats;
  out.path = EntropyPath::Grid;
  out.truncated_mass = s.truncated_mass();
  return out;
}

RuzsaValue ruzsa_divergence(const Density& x, const Density& y, const ConvolutionOptions& opts) {
  RuzsaValue r;
  r.kind = RuzsaKind::Divergence;
  r.cross_check = std::numeric_limits<double>::quiet_NaN();
  if (const auto* px = std::get_if<FinitePMF>(&x)) {
    const auto& py = std::get<FinitePMF>(y);
    const double hd = entropy(convolve(*px, py, Sign::Minus, opts.method)).nats;
    r.nats = hd - entropy(*px).nats;
    r.path = EntropyPath::ExactDiscrete;
    const FinitePMF factors[] = {*px, py};
    const auto j = JointPMF::product(factors);
    r.cross_check = mutual_information(j, {LinearForm::diff(0, 1)}, vars({1}));
    if (std::abs(r.cross_check - r.nats) > kIdentityTolerance) {
      throw Error("d_R disagrees with I(X'-Y';Y') by " + std::to_string(std::abs(r.cross_check - r.nats)));
    }
    return r;
  }
  const auto e = sum_entropies(x, y, Sign::Minus, opts);
  r.nats = e.h_combined - e.h_x;
  r.path = e.path;
  return r;
}

RuzsaValue conditional_ruzsa_divergence(const JointPMF& j, std::size_t a, std::size_t b, const VarList& given) {
  if (a >= j.arity() || b >= j.arity()) throw ValidationError("variable index out of range");
  const double markov = conditional_mutual_information(j, vars({a}), vars({b}), given);
  if (markov > kIdentityTolerance) {
    throw PreconditionError("conditional independence fails: I(X_a; X_b | given) = " + std::to_string(markov));
  }
  RuzsaValue r;
  r.kind = RuzsaKind::Conditional;
  r.path = EntropyPath::ExactDiscrete;
  const VarList d{LinearForm::diff(a, b)};
  r.nats = conditional_entropy(j, d, given) - conditional_entropy(j, vars({a}), given);
  r.cross_check = conditional_mutual_information(j, d, vars({b}), given);
  if (std::abs(r.cross_check - r.nats) > kIdentityTolerance) {
    throw Error("conditional d_R disagrees with I(X1-X2;X2|Y) by " + std::to_string(std::abs(r.cross_check - r.nats)));
  }
  return r;
}

RuzsaValue conditional_ruzsa_divergence(const JointPMF& triple) {
  if (triple.arity() != 3) throw ValidationError("expected a joint over (X1, Y, X2)");
  return conditional_ruzsa_divergence(triple, 0, 2, vars({1}));
}

RuzsaValue ruzsa_difference(const JointPMF& j, std::size_t a, std::size_t b) {
  RuzsaValue r;
  r.kind = RuzsaKind::Difference;
  r.path = EntropyPath::ExactDiscrete;
  r.nats = joint_entropy(j, {LinearForm::diff(a, b)}) - joint_entropy(j, vars({a}));
  r.cross_check = mutual_information(j, {LinearForm::diff(a, b)}, vars({b})) - mutual_information(j, vars({a}), vars({b}));
  if (std::abs(r.cross_check - r.nats) > kIdentityTolerance) {
    throw Error("Ruzsa difference disagrees with I(X-Y;Y) - I(X;Y)");
  }
  return r;
}

SigmaValue sigma(const Density& d, Sign sign, const ConvolutionOptions& opts) {
  const GroupSpec& g = group_of(d);
  if (g.is_finite()) throw DomainError("doubling and difference constants need a continuous density");
  const int n = g.real_dimension();
  // sigma_- uses X - X'; sigma_+ uses X + X' = X - (-X').
  const auto e = sum_entropies(d, d, sign, opts);
  SigmaValue s;
  s.h_x = e.h_x;
  s.h_combined = e.h_combined;
  s.path = e.path;
  s.truncated_mass = e.truncated_mass;
  s.value = entropy_power({e.h_combined, e.path, false}, n) / (2.0 * entropy_power({e.h_x, e.path, false}, n));

  // d_R(X || X) for sigma_-, d_R(X || -X) for sigma_+.
  const double dr = e.h_combined - e.h_x;
  s.via_identity = 0.5 * std::exp(2.0 / n * dr);
  if (std::abs(s.via_identity - s.value) > 1e-8 * s.value) {
    throw Error("sigma disagrees with (1/2) exp((2/n) d_R) beyond relative 1e-8");
  }
  if (e.path == EntropyPath::Grid) {
    GridDensity base = as_grid(d, opts.grid);
    bool can_coarsen = true;
    for (const auto& ax : base.axes()) {
      if (!ax.degenerate() && (ax.cells < 8 || (ax.periodic && ax.cells % 2 != 0))) can_coarsen = false;
    }
    if (can_coarsen) {
      const GridDensity coarse = base.coarsened(2);
      const auto ec = sum_entropies(coarse, coarse, sign, opts);
      const double sc = std::exp(2.0 / n * (ec.h_combined - ec.h_x)) / 2.0;
      s.bias_estimate = std::abs(s.value - sc);
    }
  }
  return s;
}

SigmaValue doubling_constant(const Density& d, const ConvolutionOptions& opts) { return sigma(d, Sign::Plus, opts); }

SigmaValue difference_constant(const Density& d, const ConvolutionOptions& opts) { return sigma(d, Sign::Minus, opts); }

}  // namespace ruzsa
