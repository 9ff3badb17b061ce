#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ruzsa/grid_density.hpp"
#include "ruzsa/group.hpp"

namespace ruzsa {

struct GaussianParams {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Density rate * exp(-rate x) on [0, inf).
struct ExponentialParams {
  double rate = 1.0;
};

// Uniform on the box prod [lo_i, hi_i].
struct UniformParams {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct LaplaceParams {
  double location = 0.0;
  double scale = 1.0;
};

// Density rate^k x^(k-1) exp(-rate x) / Gamma(k) on [0, inf).
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

// X = exp(N(mu, sigma^2)) on the multiplicative half-line.
struct LogNormalParams {
  double mu = 0.0;
  double sigma = 1.0;
};

using ParametricFamily =
    std::variant<GaussianParams, ExponentialParams, UniformParams, LaplaceParams, GammaParams, LogNormalParams>;

class ParametricDensity {
 public:
  explicit ParametricDensity(ParametricFamily family);

  static ParametricDensity gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  static ParametricDensity standard_gaussian(int n = 1);
  static ParametricDensity exponential(double rate);
  static ParametricDensity uniform(std::vector<double> lo, std::vector<double> hi);
  static ParametricDensity laplace(double location, double scale);
  static ParametricDensity gamma(double shape, double rate);
  static ParametricDensity lognormal(double mu, double sigma);

  const ParametricFamily& family() const { return family_; }
  const GroupSpec& group() const { return group_; }
  int dimension() const { return group_.real_dimension(); }
  std::string family_name() const;

  // Mean and covariance in the group's (log) coordinates.
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;

  // True for families whose law is invariant under x -> 2 mean - x.
  bool is_symmetric() const;
  // Law of -X when it stays in a closed family (symmetric families only).
  ParametricDensity reflected() const;

 private:
  ParametricFamily family_;
  GroupSpec group_;
};

// Grid approximation with at most config.tail_mass of mass outside the box.
// The mass left out is recorded in the result's truncated_mass().
GridDensity discretize(const ParametricDensity& d, const GridConfig& config = {});

}  // namespace ruzsa
