#pragma once

#include <string>
#include <vector>

#include "ruzsa/convolve.hpp"
#include "ruzsa/density.hpp"
#include "ruzsa/entropy.hpp"
#include "ruzsa/joint_pmf.hpp"

namespace ruzsa {

enum class RuzsaKind { Divergence, Conditional, Difference };

struct RuzsaValue {
  double nats = 0.0;
  RuzsaKind kind = RuzsaKind::Divergence;
  EntropyPath path = EntropyPath::ExactDiscrete;
  // Independent evaluation through the mutual-information identity (finite
  // groups); NaN where no second route exists.
  double cross_check = 0.0;
};

// h(X' - Y') - h(X') for independent X' ~ x, Y' ~ y. On finite groups the
// value is cross-checked against I(X' - Y'; Y') to 1e-10.
RuzsaValue ruzsa_divergence(const Density& x, const Density& y, const ConvolutionOptions& opts = {});

// h(X_a - X_b | given) - h(X_a | given); requires I(X_a; X_b | given) <= 1e-10
// and is cross-checked against I(X_a - X_b; X_b | given).
RuzsaValue conditional_ruzsa_divergence(const JointPMF& j, std::size_t a, std::size_t b, const VarList& given);
// Triple (X1, Y, X2): d_R(X1 || X2 | Y).
RuzsaValue conditional_ruzsa_divergence(const JointPMF& triple);

// h(X_a - X_b) - h(X_a) under the joint law (dependence allowed), cross-checked
// against I(X_a - X_b; X_b) - I(X_a; X_b).
RuzsaValue ruzsa_difference(const JointPMF& j, std::size_t a = 0, std::size_t b = 1);

// sigma_+ (Sign::Plus) or sigma_- (Sign::Minus) of a continuous density.
struct SigmaValue {
  double value = 0.0;
  double via_identity = 0.0;  // (1/2) exp((2/n) d_R), from an independent divergence evaluation
  double h_x = 0.0;
  double h_combined = 0.0;    // h(X + X') or h(X - X')
  double bias_estimate = 0.0; // |sigma - sigma at half resolution| for grids, 0 for closed forms
  EntropyPath path = EntropyPath::ClosedForm;
  double truncated_mass = 0.0;
};

SigmaValue doubling_constant(const Density& d, const ConvolutionOptions& opts = {});
SigmaValue difference_constant(const Density& d, const ConvolutionOptions& opts = {});
SigmaValue sigma(const Density& d, Sign sign, const ConvolutionOptions& opts = {});

// h(X) and h(X +- Y) evaluated at one resolution: closed forms when the pair is
// closed under the operation, otherwise both on grids.
struct SumEntropies {
  double h_x = 0.0;
  double h_y = 0.0;
  double h_combined = 0.0;
  EntropyPath path = EntropyPath::ClosedForm;
  double truncated_mass = 0.0;
};
SumEntropies sum_entropies(const Density& x, const Density& y, Sign sign, const ConvolutionOptions& opts = {});

}  // namespace ruzsa
