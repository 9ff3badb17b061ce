#pragma once

#include <cstdint>
#include <vector>

#include "ruzsa/density.hpp"

namespace ruzsa {

enum class Sign { Plus, Minus };

enum class ConvolutionMethod { Auto, Naive, Transform };

struct ConvolutionOptions {
  ConvolutionMethod method = ConvolutionMethod::Auto;
  GridConfig grid;  // used for parametric fallbacks and the cell cap
};

// Law of X + Y or X - Y for independent X ~ p, Y ~ q on a common group.
FinitePMF convolve(const FinitePMF& p, const FinitePMF& q, Sign sign = Sign::Plus,
                   ConvolutionMethod method = ConvolutionMethod::Auto);

// Non-periodic axes grow to n1 + n2 - 1 cells at the finer input spacing (the
// coarser input is resampled first); periodic axes are convolved cyclically.
// Cells are centred on sums of input cell centres.
GridDensity convolve(const GridDensity& p, const GridDensity& q, Sign sign = Sign::Plus,
                     const ConvolutionOptions& opts = {});

// Closed forms where the family is closed under the operation (Gaussian +-
// Gaussian, gamma + gamma with equal rates, exponential - exponential,
// lognormal products and ratios, reflections of symmetric families); every
// other combination is discretized and convolved on grids.
Density convolve(const Density& p, const Density& q, Sign sign = Sign::Plus, const ConvolutionOptions& opts = {});

// True when convolve(p, q, sign) stays parametric.
bool has_closed_form(const Density& p, const Density& q, Sign sign);

// Grid version of any continuous density (identity on grids).
GridDensity as_grid(const Density& d, const GridConfig& config = {});

Density negate(const Density& d, const GridConfig& config = {});

// Law of cX (integer c on finite groups, real c on R^n).
Density scale(const Density& d, double c, const GridConfig& config = {});

struct WeightedSum {
  Density law;
  bool zero_coefficient = false;  // some operand collapsed to the identity
};

// Law of sum_i c_i X_i for independent X_i ~ operands[i].
WeightedSum weighted_sum(const std::vector<double>& coefficients, const std::vector<Density>& operands,
                         const ConvolutionOptions& opts = {});

// Law of s_1 X_1 + ... + s_k X_k for i.i.d. X_i ~ p (all Plus when `signs` is empty).
Density self_convolve(const Density& p, std::size_t k, const std::vector<Sign>& signs = {},
                      const ConvolutionOptions& opts = {});

}  // namespace ruzsa
