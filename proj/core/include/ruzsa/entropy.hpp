#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>

#include "ruzsa/density.hpp"
#include "ruzsa/joint_pmf.hpp"

namespace ruzsa {

enum class EntropyPath { ExactDiscrete, Grid, ClosedForm };

std::string to_string(EntropyPath p);

// Entropy in nats with respect to the group's Haar measure.
struct EntropyValue {
  double nats = 0.0;
  EntropyPath path = EntropyPath::ExactDiscrete;
  bool neg_infinity = false;  // point mass on a continuous group

  bool finite() const { return !neg_infinity; }
};

// -sum p log p with 0 log 0 = 0. Terms are summed in sorted order with
// compensation, so the result does not depend on the order of `p`.
double discrete_entropy(std::span<const double> p);

EntropyValue entropy(const FinitePMF& p);
// -sum m_i log(m_i / mu), mu the Haar measure of one cell.
EntropyValue entropy(const GridDensity& g);
EntropyValue entropy(const ParametricDensity& d);
EntropyValue entropy(const Density& d);

// Entropy of the joint law of the listed forms.
double joint_entropy(const JointPMF& j, const VarList& forms);
double joint_entropy(const JointPMF& j);
// H(target | given); an empty `given` gives H(target).
double conditional_entropy(const JointPMF& j, const VarList& target, const VarList& given);
double mutual_information(const JointPMF& j, const VarList& a, const VarList& b);
double conditional_mutual_information(const JointPMF& j, const VarList& a, const VarList& b, const VarList& given);

// exp(2h / n); a point mass has entropy power 0.
double entropy_power(const EntropyValue& h, int n);
// n is the group's real dimension; finite groups need the explicit overload.
double entropy_power(const Density& d);

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Mean and covariance from cell midpoints (grid coordinates).
Moments grid_moments(const GridDensity& g);

// D(X) = h(Gaussian with X's mean and covariance) - h(X); R^n only.
double gaussian_relative_entropy(const GridDensity& g);
double gaussian_relative_entropy(const ParametricDensity& d);
double gaussian_relative_entropy(const Density& d);
double gaussian_entropy(const Eigen::MatrixXd& cov);

// X on (0, inf) in the coordinate L = log X:
//   intrinsic   h_x(X), entropy against dx/x
//   log_mean    E[log X]
//   lebesgue    h_R(X) = h_x(X) + E[log X]
struct MultiplicativeEntropy {
  double intrinsic = 0.0;
  double log_mean = 0.0;
  double lebesgue = 0.0;
};
MultiplicativeEntropy multiplicative_entropy(const Density& d);

// h_R(X) by Gauss-Legendre quadrature of -f log f in x-space, with
// f(x) = g(log x) / x; independent of the log-transform identity.
double lebesgue_entropy_quadrature(const GridDensity& g);

// D(Theta || U) = -h(Theta) for the uniform-probability Haar measure.
double circle_relative_entropy(const GridDensity& g);

// Z in C^x with coordinates (L, Theta) = (log|Z|, arg Z):
//   intrinsic   entropy against dl dtheta (i.e. dz / |z|^2)
//   log_mean    E[log |Z|]
//   lebesgue    h_{R^2}(Z) = intrinsic + 2 E[log |Z|]
MultiplicativeEntropy complex_multiplicative_entropy(const GridDensity& g);

}  // namespace ruzsa
