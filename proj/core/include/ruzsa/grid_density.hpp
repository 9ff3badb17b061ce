#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ruzsa/group.hpp"

namespace ruzsa {

// Resolution policy shared by discretization and grid convolution.
struct GridConfig {
  std::size_t cells = 4096;           // cells per axis when discretizing 1-D families
  double tail_mass = 1e-9;            // mass allowed outside the discretization box
  std::size_t max_cells = 1u << 22;   // hard cap on total cells of any grid result
};

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t cells = 1;
  bool periodic = false;

  double width() const { return (hi - lo) / static_cast<double>(cells); }
  double midpoint(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
  // A zero-width single-cell axis carries a point mass at `lo`.
  bool degenerate() const { return cells == 1 && hi == lo; }

  static GridAxis periodic_axis(std::size_t cells) { return {0.0, kTwoPi, cells, true}; }
};

// Piecewise-constant density: cell c carries mass m_c, i.e. density
// m_c / (cell measure) with respect to the group's Haar measure. Masses are
// stored row-major (last axis fastest).
//
// Supported groups and their coordinates:
//   RealVector(n)           n non-periodic axes
//   Circle                  one periodic axis covering [0, 2pi)
//   MultiplicativePositive  one non-periodic axis in log x
//   MultiplicativeComplex   axis 0 = log|z| (non-periodic), axis 1 = arg z (periodic)
class GridDensity {
 public:
  GridDensity(GroupSpec group, std::vector<GridAxis> axes, std::vector<double> masses,
              double truncated_mass = 0.0);

  // Normalizes nonnegative weights; tiny negative round-off is clamped.
  static GridDensity from_weights(GroupSpec group, std::vector<GridAxis> axes,
                                  std::vector<double> weights, double truncated_mass = 0.0);
  static GridDensity uniform(GroupSpec group, std::vector<GridAxis> axes);
  // Midpoint rule: weight_c = pdf(midpoint_c) * cell measure, then normalized.
  static GridDensity from_pdf(GroupSpec group, std::vector<GridAxis> axes,
                              const std::function<double(std::span<const double>)>& pdf);
  // 1-D grid whose cell masses are differences of a CDF.
  static GridDensity from_cdf_1d(GroupSpec group, GridAxis axis,
                                 const std::function<double(double)>& cdf);

  const GroupSpec& group() const { return group_; }
  const std::vector<GridAxis>& axes() const { return axes_; }
  std::span<const double> masses() const { return masses_; }
  std::size_t dim() const { return axes_.size(); }
  std::size_t total_cells() const { return masses_.size(); }
  double truncated_mass() const { return truncated_mass_; }

  // Lebesgue volume of one cell in grid coordinates (0 if an axis is degenerate).
  double cell_volume() const;
  // Measure of one cell under the group's Haar normalization.
  double cell_haar_measure() const;
  bool is_degenerate() const;

  std::vector<std::size_t> strides() const;

  GridDensity negated() const;
  // Law of cX for real c; only valid for RealVector groups.
  GridDensity scaled(double factor) const;
  // Splits every cell into `factor` equal cells along every non-degenerate axis.
  GridDensity refined(std::size_t factor) const;
  // Merges groups of `factor` cells (zero-padding the tail).
  GridDensity coarsened(std::size_t factor) const;
  // Redistributes mass onto cells of the given width along one axis,
  // proportionally to overlap.
  GridDensity resampled(std::size_t axis, double new_width) const;

  // Marginal cell masses along one axis.
  std::vector<double> axis_marginal(std::size_t axis) const;

  GridDensity with_truncated_mass(double t) const;

 private:
  GroupSpec group_;
  std::vector<GridAxis> axes_;
  std::vector<double> masses_;
  double truncated_mass_ = 0.0;
};

}  // namespace ruzsa
