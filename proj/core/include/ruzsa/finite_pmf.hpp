#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ruzsa/group.hpp"

namespace ruzsa {

// Probability mass function on a finite product of cyclic groups, indexed by
// flat element index. Probabilities are nonnegative and sum to 1 within 1e-12.
class FinitePMF {
 public:
  FinitePMF(GroupSpec group, std::vector<double> probs);

  static FinitePMF uniform(const GroupSpec& group);
  static FinitePMF uniform_on(const GroupSpec& group, const ElementSet& support);
  static FinitePMF point_mass(const GroupSpec& group, std::size_t index);

  // Builds from nonnegative weights that need not be normalized; tiny negative
  // values (|w| < 1e-13, e.g. transform round-off) are clamped to zero.
  static FinitePMF from_weights(const GroupSpec& group, std::vector<double> weights);

  const GroupSpec& group() const { return group_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  ElementSet support() const;
  bool is_point_mass() const;

  // Laws of X + s, -X and aX.
  FinitePMF shifted(std::size_t by) const;
  FinitePMF negated() const;
  FinitePMF scaled(std::int64_t factor) const;

  bool operator==(const FinitePMF&) const = default;

 private:
  struct Trusted {};
  FinitePMF(Trusted, GroupSpec group, std::vector<double> probs)
      : group_(std::move(group)), probs_(std::move(probs)) {}

  GroupSpec group_;
  std::vector<double> probs_;
};

}  // namespace ruzsa
