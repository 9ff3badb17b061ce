#include "ruzsa/grid_density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

constexpr double kGridNormTolerance = 1e-10;

using AxisMap = std::vector<std::vector<std::pair<std::size_t, double>>>;

double compensated_sum(std::span<const double> v) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

bool axis_is_angle(const GroupSpec& g, std::size_t i) {
  return g.kind() == GroupKind::Circle || (g.kind() == GroupKind::MultiplicativeComplex && i == 1);
}

void validate_axes(const GroupSpec& g, const std::vector<GridAxis>& axes) {
  if (g.is_finite()) throw DomainError("GridDensity needs a continuous group, got " + g.describe());
  if (static_cast<int>(axes.size()) != g.coordinate_count()) {
    throw ValidationError("grid on " + g.describe() + " needs " + std::to_string(g.coordinate_count()) +
                          " axes, got " + std::to_string(axes.size()));
  }
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& a = axes[i];
    if (a.cells == 0) throw ValidationError("grid axis with zero cells");
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) throw ValidationError("non-finite grid box");
    const bool angle = axis_is_angle(g, i);
    if (angle != a.periodic) {
      throw ValidationError("axis " + std::to_string(i) + " of " + g.describe() +
                            (angle ? " must be periodic" : " must not be periodic"));
    }
    if (a.periodic && (a.lo != 0.0 || std::abs(a.hi - kTwoPi) > 1e-12)) {
      throw ValidationError("periodic axes must cover [0, 2pi)");
    }
    if (a.degenerate()) {
      if (a.periodic) throw ValidationError("periodic axes cannot be degenerate");
      continue;
    }
    if (!(a.hi > a.lo)) throw ValidationError("grid axis needs hi > lo");
  }
}

std::size_t product_cells(const std::vector<GridAxis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.cells;
  return n;
}

std::vector<double> apply_axis_map(std::span<const double> in, const std::vector<GridAxis>& axes,
                                   std::size_t axis, std::size_t new_cells, const AxisMap& map) {
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= axes[i].cells;
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < axes.size(); ++i) inner *= axes[i].cells;
  const std::size_t n = axes[axis].cells;
  std::vector<double> out(outer * new_cells * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* src = in.data() + (o * n + i) * inner;
      for (const auto& [j, frac] : map[i]) {
        double* dst = out.data() + (o * new_cells + j) * inner;
        for (std::size_t t = 0; t < inner; ++t) dst[t] += src[t] * frac;
      }
    }
  }
  return out;
}

}  // namespace

GridDensity::GridDensity(GroupSpec group, std::vector<GridAxis> axes, std::vector<double> masses,
                         double truncated_mass)
    : group_(std::move(group)), axes_(std::move(axes)), masses_(std::move(masses)),
      truncated_mass_(truncated_mass) {
  validate_axes(group_, axes_);
  if (masses_.size() != product_cells(axes_)) {
    throw ValidationError("grid has " + std::to_string(product_cells(axes_)) + " cells but " +
                          std::to_string(masses_.size()) + " masses");
  }
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    if (!(masses_[i] >= 0.0) || !std::isfinite(masses_[i])) {
      throw ValidationError("negative or non-finite grid mass at cell " + std::to_string(i));
    }
  }
  const double total = compensated_sum(masses_);
  if (std::abs(total - 1.0) > kGridNormTolerance) {
    throw ValidationError("grid masses sum to " + std::to_string(total) + ", not 1");
  }
  if (!(truncated_mass_ >= 0.0)) throw ValidationError("truncated mass must be nonnegative");
}

GridDensity GridDensity::from_weights(GroupSpec group, std::vector<GridAxis> axes,
                                      std::vector<double> weights, double truncated_mass) {
  for (auto& w : weights) {
    if (w < 0.0 && w > -1e-13) w = 0.0;
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("negative or non-finite grid weight");
  }
  const double total = compensated_sum(weights);
  if (!(total > 0.0)) throw ValidationError("grid weights sum to zero");
  for (auto& w : weights) w /= total;
  return GridDensity(std::move(group), std::move(axes), std::move(weights), truncated_mass);
}

GridDensity GridDensity::uniform(GroupSpec group, std::vector<GridAxis> axes) {
  const std::size_t n = product_cells(axes);
  return GridDensity(std::move(group), std::move(axes), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

GridDensity GridDensity::from_pdf(GroupSpec group, std::vector<GridAxis> axes,
                                  const std::function<double(std::span<const double>)>& pdf) {
  validate_axes(group, axes);
  const std::size_t n = product_cells(axes);
  std::vector<double> w(n);
  std::vector<double> x(axes.size());
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = 0; a < axes.size(); ++a) x[a] = axes[a].degenerate() ? axes[a].lo : axes[a].midpoint(idx[a]);
    w[c] = pdf(x);
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].cells) break;
      idx[a] = 0;
    }
  }
  return from_weights(std::move(group), std::move(axes), std::move(w));
}

GridDensity GridDensity::from_cdf_1d(GroupSpec group, GridAxis axis, const std::function<double(double)>& cdf) {
  std::vector<double> w(axis.cells);
  double prev = cdf(axis.lo);
  const double first = prev;
  for (std::size_t i = 0; i < axis.cells; ++i) {
    const double next = cdf(axis.lo + static_cast<double>(i + 1) * axis.width());
    w[i] = std::max(0.0, next - prev);
    prev = next;
  }
  const double truncated = std::max(0.0, first + (1.0 - prev));
  return from_weights(std::move(group), {axis}, std::move(w), truncated);
}

double GridDensity::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.degenerate() ? 0.0 : a.width();
  return v;
}

double GridDensity::cell_haar_measure() const {
  double v = 1.0;
  for (const auto& a : axes_) {
    if (a.degenerate()) return 0.0;
    v *= (group_.kind() == GroupKind::Circle) ? a.width() / kTwoPi : a.width();
  }
  return v;
}

bool GridDensity::is_degenerate() const {
  return std::any_of(axes_.begin(), axes_.end(), [](const GridAxis& a) { return a.degenerate(); });
}

std::vector<std::size_t> GridDensity::strides() const {
  std::vector<std::size_t> s(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 1;) s[i - 1] = s[i] * axes_[i].cells;
  return s;
}

GridDensity GridDensity::negated() const {
  // Reversing the flat array reverses every axis at once.
  std::vector<double> m(masses_.rbegin(), masses_.rend());
  std::vector<GridAxis> axes = axes_;
  for (auto& a : axes) {
    if (!a.periodic) a = {-a.hi, -a.lo, a.cells, false};
  }
  return GridDensity(group_, std::move(axes), std::move(m), truncated_mass_);
}

GridDensity GridDensity::scaled(double factor) const {
  if (group_.kind() != GroupKind::RealVector) {
    throw DomainError("real scaling is only defined on R^n grids");
  }
  if (!std::isfinite(factor)) throw DomainError("non-finite scale factor");
  if (factor == 0.0) {
    std::vector<GridAxis> axes(axes_.size(), GridAxis{0.0, 0.0, 1, false});
    return GridDensity(group_, std::move(axes), {1.0}, truncated_mass_);
  }
  if (factor < 0.0) return negated().scaled(-factor);
  std::vector<GridAxis> axes = axes_;
  for (auto& a : axes) {
    a.lo *= factor;
    a.hi *= factor;
  }
  return GridDensity(group_, std::move(axes), masses_, truncated_mass_);
}

GridDensity GridDensity::refined(std::size_t factor) const {
  if (factor == 0) throw ValidationError("refinement factor must be positive");
  if (factor == 1) return *this;
  std::vector<double> m = masses_;
  std::vector<GridAxis> axes = axes_;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].degenerate()) continue;
    AxisMap map(axes[a].cells);
    const double frac = 1.0 / static_cast<double>(factor);
    for (std::size_t i = 0; i < axes[a].cells; ++i) {
      for (std::size_t k = 0; k < factor; ++k) map[i].emplace_back(i * factor + k, frac);
    }
    m = apply_axis_map(m, axes, a, axes[a].cells * factor, map);
    axes[a].cells *= factor;
  }
  return from_weights(group_, std::move(axes), std::move(m), truncated_mass_);
}

GridDensity GridDensity::coarsened(std::size_t factor) const {
  if (factor == 0) throw ValidationError("coarsening factor must be positive");
  if (factor == 1) return *this;
  std::vector<double> m = masses_;
  std::vector<GridAxis> axes = axes_;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].degenerate()) continue;
    const std::size_t n = axes[a].cells;
    if (axes[a].periodic && n % factor != 0) {
      throw ValidationError("periodic axis cell count must be divisible by the coarsening factor");
    }
    const std::size_t n_new = (n + factor - 1) / factor;
    if (n_new < 1) continue;
    AxisMap map(n);
    for (std::size_t i = 0; i < n; ++i) map[i].emplace_back(i / factor, 1.0);
    m = apply_axis_map(m, axes, a, n_new, map);
    const double w = axes[a].width() * static_cast<double>(factor);
    if (!axes[a].periodic) axes[a].hi = axes[a].lo + w * static_cast<double>(n_new);
    axes[a].cells = n_new;
  }
  return from_weights(group_, std::move(axes), std::move(m), truncated_mass_);
}

GridDensity GridDensity::resampled(std::size_t axis, double new_width) const {
  if (axis >= axes_.size()) throw ValidationError("resample axis out of range");
  const GridAxis& old = axes_[axis];
  if (old.degenerate()) return *this;
  if (!(new_width > 0.0)) throw ValidationError("resample width must be positive");
  GridAxis fresh = old;
  if (old.periodic) {
    const double cells = std::round(kTwoPi / new_width);
    if (cells < 1 || std::abs(cells * new_width - kTwoPi) > 1e-9) {
      throw ValidationError("periodic resample width must divide 2pi");
    }
    fresh.cells = static_cast<std::size_t>(cells);
  } else {
    const double span = (old.hi - old.lo) / new_width;
    fresh.cells = static_cast<std::size_t>(std::ceil(span - 1e-9));
    fresh.hi = old.lo + new_width * static_cast<double>(fresh.cells);
  }
  const double w_old = old.width();
  const double w_new = fresh.width();
  AxisMap map(old.cells);
  for (std::size_t i = 0; i < old.cells; ++i) {
    const double a = old.lo + static_cast<double>(i) * w_old;
    const double b = a + w_old;
    auto j = static_cast<std::size_t>(std::max(0.0, std::floor((a - fresh.lo) / w_new)));
    for (; j < fresh.cells; ++j) {
      const double c = fresh.lo + static_cast<double>(j) * w_new;
      const double d = c + w_new;
      if (c >= b) break;
      const double overlap = std::min(b, d) - std::max(a, c);
      if (overlap > 0.0) map[i].emplace_back(j, overlap / w_old);
    }
  }
  std::vector<GridAxis> axes = axes_;
  axes[axis] = fresh;
  auto m = apply_axis_map(masses_, axes_, axis, fresh.cells, map);
  return from_weights(group_, std::move(axes), std::move(m), truncated_mass_);
}

std::vector<double> GridDensity::axis_marginal(std::size_t axis) const {
  if (axis >= axes_.size()) throw ValidationError("marginal axis out of range");
  AxisMap map(axes_[axis].cells);
  for (std::size_t i = 0; i < axes_[axis].cells; ++i) map[i].emplace_back(i, 1.0);
  // Collapse every other axis onto a single cell.
  std::vector<double> m = masses_;
  std::vector<GridAxis> axes = axes_;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (a == axis) continue;
    AxisMap collapse(axes[a].cells);
    for (std::size_t i = 0; i < axes[a].cells; ++i) collapse[i].emplace_back(0, 1.0);
    m = apply_axis_map(m, axes, a, 1, collapse);
    axes[a].cells = 1;
  }
  return m;
}

GridDensity GridDensity::with_truncated_mass(double t) const {
  GridDensity out = *this;
  out.truncated_mass_ = t;
  return out;
}

}  // namespace ruzsa
