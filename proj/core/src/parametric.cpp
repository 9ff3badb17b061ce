#include "ruzsa/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive and finite");
}

GroupSpec group_for(const ParametricFamily& f) {
  return std::visit(overloaded{
                        [](const GaussianParams& p) { return GroupSpec::real(static_cast<int>(p.mean.size())); },
                        [](const UniformParams& p) { return GroupSpec::real(static_cast<int>(p.lo.size())); },
                        [](const LogNormalParams&) { return GroupSpec::multiplicative_positive(); },
                        [](const auto&) { return GroupSpec::real(1); },
                    },
                    f);
}

void validate(const ParametricFamily& f) {
  std::visit(overloaded{
                 [](const GaussianParams& p) {
                   if (p.mean.size() == 0) throw ValidationError("Gaussian needs dimension >= 1");
                   if (p.cov.rows() != p.mean.size() || p.cov.cols() != p.mean.size()) {
                     throw ValidationError("Gaussian covariance shape does not match the mean");
                   }
                   if (!p.mean.allFinite() || !p.cov.allFinite()) throw ValidationError("non-finite Gaussian parameters");
                   if ((p.cov - p.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, p.cov.cwiseAbs().maxCoeff())) {
                     throw ValidationError("Gaussian covariance is not symmetric");
                   }
                   Eigen::LLT<Eigen::MatrixXd> llt(p.cov);
                   if (llt.info() != Eigen::Success) throw ValidationError("Gaussian covariance is not positive definite");
                 },
                 [](const ExponentialParams& p) { require_positive(p.rate, "exponential rate"); },
                 [](const UniformParams& p) {
                   if (p.lo.empty() || p.lo.size() != p.hi.size()) throw ValidationError("uniform box needs matching lo/hi");
                   for (std::size_t i = 0; i < p.lo.size(); ++i) {
                     if (!std::isfinite(p.lo[i]) || !std::isfinite(p.hi[i]) || !(p.hi[i] > p.lo[i])) {
                       throw ValidationError("uniform box needs finite lo < hi");
                     }
                   }
                 },
                 [](const LaplaceParams& p) {
                   if (!std::isfinite(p.location)) throw ValidationError("non-finite Laplace location");
                   require_positive(p.scale, "Laplace scale");
                 },
                 [](const GammaParams& p) {
                   require_positive(p.shape, "gamma shape");
                   require_positive(p.rate, "gamma rate");
                 },
                 [](const LogNormalParams& p) {
                   if (!std::isfinite(p.mu)) throw ValidationError("non-finite lognormal mu");
                   require_positive(p.sigma, "lognormal sigma");
                 },
             },
             f);
}

GridDensity from_cdf(GroupSpec g, double lo, double hi, std::size_t cells,
                     const std::function<double(double)>& cdf) {
  return GridDensity::from_cdf_1d(std::move(g), GridAxis{lo, hi, cells, false}, cdf);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// z with P(|N(0,1)| > z) = tail.
double two_sided_quantile(double tail) { return std::sqrt(2.0) * boost::math::erfc_inv(tail); }

}  // namespace

ParametricDensity::ParametricDensity(ParametricFamily family) : family_(std::move(family)) {
  validate(family_);
  group_ = group_for(family_);
}

ParametricDensity ParametricDensity::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  return ParametricDensity(GaussianParams{std::move(mean), std::move(cov)});
}

ParametricDensity ParametricDensity::standard_gaussian(int n) {
  return gaussian(Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n));
}

ParametricDensity ParametricDensity::exponential(double rate) { return ParametricDensity(ExponentialParams{rate}); }

ParametricDensity ParametricDensity::uniform(std::vector<double> lo, std::vector<double> hi) {
  return ParametricDensity(UniformParams{std::move(lo), std::move(hi)});
}

ParametricDensity ParametricDensity::laplace(double location, double scale) {
  return ParametricDensity(LaplaceParams{location, scale});
}

ParametricDensity ParametricDensity::gamma(double shape, double rate) {
  return ParametricDensity(GammaParams{shape, rate});
}

ParametricDensity ParametricDensity::lognormal(double mu, double sigma) {
  return ParametricDensity(LogNormalParams{mu, sigma});
}

std::string ParametricDensity::family_name() const {
  return std::visit(overloaded{
                        [](const GaussianParams&) { return std::string("gaussian"); },
                        [](const ExponentialParams&) { return std::string("exponential"); },
                        [](const UniformParams&) { return std::string("uniform"); },
                        [](const LaplaceParams&) { return std::string("laplace"); },
                        [](const GammaParams&) { return std::string("gamma"); },
                        [](const LogNormalParams&) { return std::string("lognormal"); },
                    },
                    family_);
}

Eigen::VectorXd ParametricDensity::mean() const {
  return std::visit(overloaded{
                        [](const GaussianParams& p) -> Eigen::VectorXd { return p.mean; },
                        [](const ExponentialParams& p) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(1, 1.0 / p.rate); },
                        [](const UniformParams& p) -> Eigen::VectorXd {
                          Eigen::VectorXd m(static_cast<Eigen::Index>(p.lo.size()));
                          for (std::size_t i = 0; i < p.lo.size(); ++i) m(static_cast<Eigen::Index>(i)) = 0.5 * (p.lo[i] + p.hi[i]);
                          return m;
                        },
                        [](const LaplaceParams& p) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(1, p.location); },
                        [](const GammaParams& p) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(1, p.shape / p.rate); },
                        [](const LogNormalParams& p) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(1, p.mu); },
                    },
                    family_);
}

Eigen::MatrixXd ParametricDensity::covariance() const {
  return std::visit(overloaded{
                        [](const GaussianParams& p) -> Eigen::MatrixXd { return p.cov; },
                        [](const ExponentialParams& p) -> Eigen::MatrixXd {
                          return Eigen::MatrixXd::Constant(1, 1, 1.0 / (p.rate * p.rate));
                        },
                        [](const UniformParams& p) -> Eigen::MatrixXd {
                          const auto n = static_cast<Eigen::Index>(p.lo.size());
                          Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
                          for (Eigen::Index i = 0; i < n; ++i) {
                            const double w = p.hi[static_cast<std::size_t>(i)] - p.lo[static_cast<std::size_t>(i)];
                            k(i, i) = w * w / 12.0;
                          }
                          return k;
                        },
                        [](const LaplaceParams& p) -> Eigen::MatrixXd {
                          return Eigen::MatrixXd::Constant(1, 1, 2.0 * p.scale * p.scale);
                        },
                        [](const GammaParams& p) -> Eigen::MatrixXd {
                          return Eigen::MatrixXd::Constant(1, 1, p.shape / (p.rate * p.rate));
                        },
                        [](const LogNormalParams& p) -> Eigen::MatrixXd {
                          return Eigen::MatrixXd::Constant(1, 1, p.sigma * p.sigma);
                        },
                    },
                    family_);
}

bool ParametricDensity::is_symmetric() const {
  return std::holds_alternative<GaussianParams>(family_) || std::holds_alternative<UniformParams>(family_) ||
         std::holds_alternative<LaplaceParams>(family_) || std::holds_alternative<LogNormalParams>(family_);
}

ParametricDensity ParametricDensity::reflected() const {
  return std::visit(overloaded{
                        [](const GaussianParams& p) { return gaussian(-p.mean, p.cov); },
                        [](const UniformParams& p) {
                          std::vector<double> lo(p.lo.size()), hi(p.hi.size());
                          for (std::size_t i = 0; i < lo.size(); ++i) {
                            lo[i] = -p.hi[i];
                            hi[i] = -p.lo[i];
                          }
                          return uniform(std::move(lo), std::move(hi));
                        },
                        [](const LaplaceParams& p) { return laplace(-p.location, p.scale); },
                        // 1/X for a lognormal is lognormal(-mu, sigma).
                        [](const LogNormalParams& p) { return lognormal(-p.mu, p.sigma); },
                        [](const auto&) -> ParametricDensity {
                          throw DomainError("reflection leaves the parametric family; discretize first");
                        },
                    },
                    family_);
}

GridDensity discretize(const ParametricDensity& d, const GridConfig& config) {
  if (config.cells < 2) throw ValidationError("discretization needs at least 2 cells");
  const double tail = config.tail_mass;
  if (!(tail > 0.0 && tail < 1.0)) throw ValidationError("tail mass must lie in (0, 1)");
  const std::size_t cells = config.cells;

  return std::visit(
      overloaded{
          [&](const GaussianParams& p) -> GridDensity {
            const auto n = static_cast<std::size_t>(p.mean.size());
            if (n == 1) {
              const double s = std::sqrt(p.cov(0, 0));
              const double z = two_sided_quantile(tail);
              const double m = p.mean(0);
              return from_cdf(d.group(), m - z * s, m + z * s, cells,
                              [&](double x) { return normal_cdf((x - m) / s); });
            }
            // Leave room for one convolution doubling every axis.
            auto per_axis = static_cast<std::size_t>(
                std::floor(std::pow(static_cast<double>(config.max_cells) / std::pow(2.0, n), 1.0 / n)));
            per_axis = std::max<std::size_t>(8, std::min(per_axis, cells));
            const double z = two_sided_quantile(tail / static_cast<double>(n));
            std::vector<GridAxis> axes;
            for (std::size_t i = 0; i < n; ++i) {
              const double s = std::sqrt(p.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
              const double m = p.mean(static_cast<Eigen::Index>(i));
              axes.push_back({m - z * s, m + z * s, per_axis, false});
            }
            const Eigen::MatrixXd prec = p.cov.inverse();
            Eigen::VectorXd v(static_cast<Eigen::Index>(n));
            auto grid = GridDensity::from_pdf(d.group(), axes, [&](std::span<const double> x) {
              for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = x[i] - p.mean(static_cast<Eigen::Index>(i));
              return std::exp(-0.5 * v.dot(prec * v));
            });
            return grid.with_truncated_mass(tail);
          },
          [&](const ExponentialParams& p) -> GridDensity {
            const double hi = -std::log(tail) / p.rate;
            return from_cdf(d.group(), 0.0, hi, cells, [&](double x) { return -std::expm1(-p.rate * x); });
          },
          [&](const UniformParams& p) -> GridDensity {
            std::vector<GridAxis> axes;
            std::size_t per_axis = cells;
            if (p.lo.size() > 1) {
              per_axis = static_cast<std::size_t>(std::floor(
                  std::pow(static_cast<double>(config.max_cells) / std::pow(2.0, p.lo.size()), 1.0 / p.lo.size())));
              per_axis = std::max<std::size_t>(2, std::min(per_axis, cells));
            }
            for (std::size_t i = 0; i < p.lo.size(); ++i) axes.push_back({p.lo[i], p.hi[i], per_axis, false});
            return GridDensity::uniform(d.group(), std::move(axes));
          },
          [&](const LaplaceParams& p) -> GridDensity {
            const double r = p.scale * std::log(1.0 / tail);
            return from_cdf(d.group(), p.location - r, p.location + r, cells, [&](double x) {
              const double u = (x - p.location) / p.scale;
              return u < 0 ? 0.5 * std::exp(u) : 1.0 - 0.5 * std::exp(-u);
            });
          },
          [&](const GammaParams& p) -> GridDensity {
            const double hi = boost::math::gamma_q_inv(p.shape, tail) / p.rate;
            return from_cdf(d.group(), 0.0, hi, cells,
                            [&](double x) { return x <= 0 ? 0.0 : boost::math::gamma_p(p.shape, p.rate * x); });
          },
          [&](const LogNormalParams& p) -> GridDensity {
            const double z = two_sided_quantile(tail);
            return from_cdf(d.group(), p.mu - z * p.sigma, p.mu + z * p.sigma, cells,
                            [&](double l) { return normal_cdf((l - p.mu) / p.sigma); });
          },
      },
      d.family());
}

}  // namespace ruzsa
