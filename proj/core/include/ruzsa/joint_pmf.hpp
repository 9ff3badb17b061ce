#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ruzsa/finite_pmf.hpp"
#include "ruzsa/group.hpp"

namespace ruzsa {

// sum_k coeff_k * X_{axis_k}; all referenced axes must carry the same group.
struct LinearForm {
  std::vector<std::pair<std::size_t, std::int64_t>> terms;

  static LinearForm var(std::size_t axis) { return {{{axis, 1}}}; }
  static LinearForm diff(std::size_t a, std::size_t b) { return {{{a, 1}, {b, -1}}}; }
  static LinearForm sum(std::size_t a, std::size_t b) { return {{{a, 1}, {b, 1}}}; }
};

using VarList = std::vector<LinearForm>;

VarList vars(std::initializer_list<std::size_t> axes);

// Joint law of a tuple of finite-group variables. The tensor is row-major over
// the product of the carriers (last axis fastest).
class JointPMF {
 public:
  JointPMF(std::vector<GroupSpec> groups, std::vector<double> tensor);

  static JointPMF from_weights(std::vector<GroupSpec> groups, std::vector<double> weights);
  static JointPMF product(std::span<const FinitePMF> factors);
  static JointPMF of(const FinitePMF& p);
  // Two-variable joint from a row-major |G1| x |G2| matrix.
  static JointPMF from_matrix(const GroupSpec& g1, const GroupSpec& g2, std::vector<double> matrix);

  const std::vector<GroupSpec>& groups() const { return groups_; }
  std::span<const double> tensor() const { return tensor_; }
  std::size_t arity() const { return groups_.size(); }
  std::size_t size() const { return tensor_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }

  // Joint law of the listed axes in the given order; exact summation.
  JointPMF marginal(const std::vector<std::size_t>& axes) const;
  FinitePMF marginal_pmf(std::size_t axis) const;

  // Joint law of (form_1, ..., form_k).
  JointPMF pushforward(const VarList& forms) const;
  FinitePMF law(const LinearForm& form) const;

  // Same law with axes reordered: output axis i is input axis order[i].
  JointPMF permuted(const std::vector<std::size_t>& order) const;

  bool operator==(const JointPMF&) const = default;

 private:
  struct Trusted {};
  JointPMF(Trusted, std::vector<GroupSpec> groups, std::vector<double> tensor);
  void init_shape();

  std::vector<GroupSpec> groups_;
  std::vector<double> tensor_;
  std::vector<std::size_t> shape_;
};

// Law of the remaining axes given each value of the `given` axes.
struct Conditioning {
  std::vector<std::size_t> given;
  std::vector<std::size_t> rest;
  JointPMF given_law;
  // One entry per flat value of the given axes; empty where that value has zero mass.
  std::vector<std::optional<JointPMF>> conditionals;
};

Conditioning condition_on(const JointPMF& j, const std::vector<std::size_t>& given);

// Reassembles p(given) p(rest | given); axes come out ordered (given..., rest...).
JointPMF mix(const Conditioning& c);

// (X1, Y, X2) with X1, X2 conditionally i.i.d. given Y, each distributed as
// X given Y under pxy, whose axes are (X, Y).
JointPMF markov_triple(const JointPMF& pxy);

// (X1, Y, X2) with p(x1, y, x2) = p(y) p(x1 | y) p(x2 | y) for arbitrary
// conditional laws; cond1[y] and cond2[y] are the laws of X1 and X2 given Y = y.
JointPMF markov_triple(const FinitePMF& py, const std::vector<FinitePMF>& cond1,
                       const std::vector<FinitePMF>& cond2);

// (X2, Y1, X1, Y2) with law p(y1) p(x2 | y1) p(x1 | y1) p(y2 | x1); the pairs
// (X2, Y1), (X1, Y1), (X1, Y2) each have law pxy, which is checked to 1e-12.
JointPMF markov_chain4(const JointPMF& pxy);

}  // namespace ruzsa
