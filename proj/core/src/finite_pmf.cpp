#include "ruzsa/finite_pmf.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

constexpr double kNormTolerance = 1e-12;

double neumaier_sum(std::span<const double> v) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

}  // namespace

FinitePMF::FinitePMF(GroupSpec group, std::vector<double> probs)
    : group_(std::move(group)), probs_(std::move(probs)) {
  if (!group_.is_finite()) throw DomainError("FinitePMF needs a finite group, got " + group_.describe());
  if (probs_.size() != group_.order()) {
    throw ValidationError("FinitePMF on " + group_.describe() + " needs " +
                          std::to_string(group_.order()) + " probabilities, got " +
                          std::to_string(probs_.size()));
  }
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i])) {
      throw ValidationError("negative or non-finite probability at index " + std::to_string(i));
    }
  }
  const double total = neumaier_sum(probs_);
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

FinitePMF FinitePMF::uniform(const GroupSpec& group) {
  if (!group.is_finite()) throw DomainError("uniform PMF needs a finite group");
  const std::size_t n = group.order();
  return FinitePMF(Trusted{}, group, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

FinitePMF FinitePMF::uniform_on(const GroupSpec& group, const ElementSet& support) {
  if (support.empty()) throw ValidationError("uniform_on needs a nonempty support");
  std::vector<double> p(group.order(), 0.0);
  for (auto i : support) {
    if (i >= p.size()) throw DomainError("support element outside " + group.describe());
    p[i] = 1.0 / static_cast<double>(support.size());
  }
  return FinitePMF(Trusted{}, group, std::move(p));
}

FinitePMF FinitePMF::point_mass(const GroupSpec& group, std::size_t index) {
  std::vector<double> p(group.order(), 0.0);
  if (index >= p.size()) throw DomainError("point mass outside " + group.describe());
  p[index] = 1.0;
  return FinitePMF(Trusted{}, group, std::move(p));
}

FinitePMF FinitePMF::from_weights(const GroupSpec& group, std::vector<double> weights) {
  if (!group.is_finite()) throw DomainError("FinitePMF needs a finite group");
  if (weights.size() != group.order()) throw ValidationError("weight count does not match group order");
  for (auto& w : weights) {
    if (w < 0.0 && w > -1e-13) w = 0.0;
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("negative or non-finite weight");
  }
  const double total = neumaier_sum(weights);
  if (!(total > 0.0)) throw ValidationError("weights sum to zero");
  for (auto& w : weights) w /= total;
  return FinitePMF(Trusted{}, group, std::move(weights));
}

ElementSet FinitePMF::support() const {
  ElementSet s;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > 0.0) s.push_back(i);
  }
  return s;
}

bool FinitePMF::is_point_mass() const { return support().size() == 1; }

FinitePMF FinitePMF::shifted(std::size_t by) const {
  std::vector<double> out(probs_.size(), 0.0);
  for (std::size_t i = 0; i < probs_.size(); ++i) out[group_.add_index(i, by)] = probs_[i];
  return FinitePMF(Trusted{}, group_, std::move(out));
}

FinitePMF FinitePMF::negated() const {
  std::vector<double> out(probs_.size(), 0.0);
  for (std::size_t i = 0; i < probs_.size(); ++i) out[group_.negate_index(i)] = probs_[i];
  return FinitePMF(Trusted{}, group_, std::move(out));
}

FinitePMF FinitePMF::scaled(std::int64_t factor) const {
  std::vector<double> out(probs_.size(), 0.0);
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] != 0.0) out[group_.scale_index(factor, i)] += probs_[i];
  }
  return FinitePMF(Trusted{}, group_, std::move(out));
}

}  // namespace ruzsa
