#include "ruzsa/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kLog2PiE = 2.8378770664093454835606594728112;  // log(2 pi e)

double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  double c = 0.0;
  for (double x : terms) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

double log_det_spd(const Eigen::MatrixXd& k) {
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  double s = 0.0;
  for (Eigen::Index i = 0; i < k.rows(); ++i) s += std::log(llt.matrixL()(i, i));
  return 2.0 * s;
}

VarList concat(const VarList& a, const VarList& b) {
  VarList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::string to_string(EntropyPath p) {
  switch (p) {
    case EntropyPath::ExactDiscrete: return "exact-discrete";
    case EntropyPath::Grid: return "grid";
    case EntropyPath::ClosedForm: return "closed-form";
  }
  return "unknown";
}

double discrete_entropy(std::span<const double> p) {
  std::vector<double> terms;
  terms.reserve(p.size());
  for (double x : p) {
    if (x > 0.0) terms.push_back(-x * std::log(x));
  }
  return sorted_sum(terms);
}

EntropyValue entropy(const FinitePMF& p) { return {discrete_entropy(p.probs()), EntropyPath::ExactDiscrete, false}; }

EntropyValue entropy(const GridDensity& g) {
  if (g.is_degenerate()) return {0.0, EntropyPath::Grid, true};
  const double mu = g.cell_haar_measure();
  const double log_mu = std::log(mu);
  std::vector<double> terms;
  terms.reserve(g.total_cells());
  for (double m : g.masses()) {
    if (m > 0.0) terms.push_back(-m * (std::log(m) - log_mu));
  }
  if (terms.empty()) throw ValidationError("grid has no positive cell");
  return {sorted_sum(terms), EntropyPath::Grid, false};
}

EntropyValue entropy(const ParametricDensity& d) {
  const double h = std::visit(
      overloaded{
          [](const GaussianParams& p) { return gaussian_entropy(p.cov); },
          [](const ExponentialParams& p) { return 1.0 - std::log(p.rate); },
          [](const UniformParams& p) {
            double s = 0.0;
            for (std::size_t i = 0; i < p.lo.size(); ++i) s += std::log(p.hi[i] - p.lo[i]);
            return s;
          },
          [](const LaplaceParams& p) { return 1.0 + std::log(2.0 * p.scale); },
          [](const GammaParams& p) {
            return p.shape - std::log(p.rate) + std::lgamma(p.shape) + (1.0 - p.shape) * boost::math::digamma(p.shape);
          },
          // Intrinsic entropy: log X is N(mu, sigma^2) and the Haar measure is dx/x.
          [](const LogNormalParams& p) { return 0.5 * (kLog2PiE + 2.0 * std::log(p.sigma)); },
      },
      d.family());
  return {h, EntropyPath::ClosedForm, false};
}

EntropyValue entropy(const Density& d) {
  return std::visit([](const auto& x) { return entropy(x); }, d);
}

double joint_entropy(const JointPMF& j, const VarList& forms) {
  if (forms.empty()) return 0.0;
  return discrete_entropy(j.pushforward(forms).tensor());
}

double joint_entropy(const JointPMF& j) { return discrete_entropy(j.tensor()); }

double conditional_entropy(const JointPMF& j, const VarList& target, const VarList& given) {
  return joint_entropy(j, concat(given, target)) - joint_entropy(j, given);
}

double mutual_information(const JointPMF& j, const VarList& a, const VarList& b) {
  return joint_entropy(j, a) + joint_entropy(j, b) - joint_entropy(j, concat(a, b));
}

double conditional_mutual_information(const JointPMF& j, const VarList& a, const VarList& b, const VarList& given) {
  if (given.empty()) return mutual_information(j, a, b);
  return joint_entropy(j, concat(a, given)) + joint_entropy(j, concat(b, given)) -
         joint_entropy(j, concat(concat(a, b), given)) - joint_entropy(j, given);
}

double entropy_power(const EntropyValue& h, int n) {
  if (n < 1) throw DomainError("entropy power needs a dimension >= 1");
  if (h.neg_infinity) return 0.0;
  return std::exp(2.0 * h.nats / n);
}

double entropy_power(const Density& d) {
  const GroupSpec& g = group_of(d);
  if (g.is_finite()) {
    throw DomainError("entropy power of a finite-group pmf needs an explicit dimension");
  }
  return entropy_power(entropy(d), g.real_dimension());
}

double gaussian_entropy(const Eigen::MatrixXd& cov) {
  return 0.5 * (static_cast<double>(cov.rows()) * kLog2PiE + log_det_spd(cov));
}

Moments grid_moments(const GridDensity& g) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  Moments m{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  const auto strides = g.strides();
  const auto masses = g.masses();
  Eigen::VectorXd x(n);
  auto point = [&](std::size_t c) {
    for (std::size_t a = 0; a < g.dim(); ++a) {
      const auto& ax = g.axes()[a];
      x(static_cast<Eigen::Index>(a)) = ax.degenerate() ? ax.lo : ax.midpoint((c / strides[a]) % ax.cells);
    }
  };
  for (std::size_t c = 0; c < masses.size(); ++c) {
    if (masses[c] == 0.0) continue;
    point(c);
    m.mean += masses[c] * x;
  }
  for (std::size_t c = 0; c < masses.size(); ++c) {
    if (masses[c] == 0.0) continue;
    point(c);
    const Eigen::VectorXd d = x - m.mean;
    m.cov += masses[c] * d * d.transpose();
  }
  return m;
}

double gaussian_relative_entropy(const GridDensity& g) {
  if (g.group().kind() != GroupKind::RealVector) throw DomainError("Gaussian relative entropy is defined on R^n");
  const auto h = entropy(g);
  if (h.neg_infinity) throw DomainError("degenerate grid has no Gaussian relative entropy");
  return gaussian_entropy(grid_moments(g).cov) - h.nats;
}

double gaussian_relative_entropy(const ParametricDensity& d) {
  if (d.group().kind() != GroupKind::RealVector) throw DomainError("Gaussian relative entropy is defined on R^n");
  return gaussian_entropy(d.covariance()) - entropy(d).nats;
}

double gaussian_relative_entropy(const Density& d) {
  return std::visit(overloaded{
                        [](const FinitePMF&) -> double {
                          throw DomainError("Gaussian relative entropy is defined on R^n");
                        },
                        [](const auto& x) { return gaussian_relative_entropy(x); },
                    },
                    d);
}

MultiplicativeEntropy multiplicative_entropy(const Density& d) {
  if (group_of(d).kind() != GroupKind::MultiplicativePositive) {
    throw DomainError("multiplicative entropy needs a density on (0, inf)");
  }
  MultiplicativeEntropy out;
  if (const auto* p = std::get_if<ParametricDensity>(&d)) {
    out.intrinsic = entropy(*p).nats;
    out.log_mean = p->mean()(0);
  } else {
    const auto& g = std::get<GridDensity>(d);
    const auto h = entropy(g);
    if (h.neg_infinity) throw DomainError("point mass has no differential entropy");
    out.intrinsic = h.nats;
    out.log_mean = grid_moments(g).mean(0);
  }
  out.lebesgue = out.intrinsic + out.log_mean;
  return out;
}

double lebesgue_entropy_quadrature(const GridDensity& g) {
  if (g.group().kind() != GroupKind::MultiplicativePositive) {
    throw DomainError("x-space quadrature needs a density on (0, inf)");
  }
  if (g.is_degenerate()) throw DomainError("point mass has no differential entropy");
  const auto& ax = g.axes()[0];
  const double w = ax.width();
  std::vector<double> terms;
  for (std::size_t i = 0; i < ax.cells; ++i) {
    const double m = g.masses()[i];
    if (m <= 0.0) continue;
    const double gl = m / w;  // density in the log coordinate
    const double a = std::exp(ax.lo + static_cast<double>(i) * w);
    const double b = std::exp(ax.lo + static_cast<double>(i + 1) * w);
    auto integrand = [gl](double x) {
      const double f = gl / x;
      return -f * std::log(f);
    };
    terms.push_back(boost::math::quadrature::gauss<double, 10>::integrate(integrand, a, b));
  }
  return sorted_sum(terms);
}

double circle_relative_entropy(const GridDensity& g) {
  if (g.group().kind() != GroupKind::Circle) throw DomainError("circle relative entropy needs a circle density");
  return -entropy(g).nats;
}

MultiplicativeEntropy complex_multiplicative_entropy(const GridDensity& g) {
  if (g.group().kind() != GroupKind::MultiplicativeComplex) {
    throw DomainError("complex multiplicative entropy needs a density on C^x");
  }
  const auto h = entropy(g);
  if (h.neg_infinity) throw DomainError("degenerate density has no differential entropy");
  MultiplicativeEntropy out;
  out.intrinsic = h.nats;
  const auto& ax = g.axes()[0];
  const auto marg = g.axis_marginal(0);
  for (std::size_t i = 0; i < ax.cells; ++i) out.log_mean += marg[i] * (ax.degenerate() ? ax.lo : ax.midpoint(i));
  out.lebesgue = out.intrinsic + 2.0 * out.log_mean;
  return out;
}

}  // namespace ruzsa
