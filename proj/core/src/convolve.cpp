#include "ruzsa/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>

#include <fftw3.h>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// FFTW planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Smallest 2^a 3^b 5^c 7^d >= n.
std::size_t smooth_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

// Cyclic convolution of two real row-major arrays over `dims`.
std::vector<double> cyclic_fft(const std::vector<double>& a, const std::vector<double>& b,
                               const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  const std::size_t nc = n / static_cast<std::size_t>(dims.back()) * (static_cast<std::size_t>(dims.back()) / 2 + 1);
  double* real = fftw_alloc_real(n);
  fftw_complex* fa = fftw_alloc_complex(nc);
  fftw_complex* fb = fftw_alloc_complex(nc);
  fftw_plan fwd;
  fftw_plan bwd;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd = fftw_plan_dft_r2c(static_cast<int>(dims.size()), dims.data(), real, fa, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r(static_cast<int>(dims.size()), dims.data(), fa, real, FFTW_ESTIMATE);
  }
  std::copy(a.begin(), a.end(), real);
  fftw_execute_dft_r2c(fwd, real, fa);
  std::copy(b.begin(), b.end(), real);
  fftw_execute_dft_r2c(fwd, real, fb);
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute_dft_c2r(bwd, fa, real);
  std::vector<double> out(real, real + n);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= inv;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fftw_free(real);
  fftw_free(fa);
  fftw_free(fb);
  return out;
}

// Copies a row-major array of shape `from` into the corner of a zero array of shape `to`.
std::vector<double> embed(std::span<const double> src, const std::vector<std::size_t>& from,
                          const std::vector<std::size_t>& to) {
  std::size_t total = 1;
  for (auto t : to) total *= t;
  std::vector<double> out(total, 0.0);
  std::vector<std::size_t> idx(from.size(), 0);
  for (std::size_t flat = 0; flat < src.size(); ++flat) {
    std::size_t o = 0;
    for (std::size_t a = 0; a < from.size(); ++a) o = o * to[a] + idx[a];
    out[o] = src[flat];
    for (std::size_t a = from.size(); a-- > 0;) {
      if (++idx[a] < from[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

std::size_t count_nonzero(std::span<const double> v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
}

std::vector<double> finite_naive(const FinitePMF& p, const FinitePMF& q) {
  const GroupSpec& g = p.group();
  const std::size_t n = p.size();
  const bool cyclic = g.moduli().size() == 1;
  std::vector<double> out(n, 0.0);
  const auto sq = q.support();
  for (std::size_t a = 0; a < n; ++a) {
    const double pa = p[a];
    if (pa == 0.0) continue;
    for (std::size_t b : sq) {
      std::size_t s;
      if (cyclic) {
        s = a + b;
        if (s >= n) s -= n;
      } else {
        s = g.add_index(a, b);
      }
      out[s] += pa * q[b];
    }
  }
  return out;
}

std::vector<double> finite_transform(const FinitePMF& p, const FinitePMF& q) {
  std::vector<int> dims;
  for (auto m : p.group().moduli()) dims.push_back(static_cast<int>(m));
  return cyclic_fft(std::vector<double>(p.probs().begin(), p.probs().end()),
                    std::vector<double>(q.probs().begin(), q.probs().end()), dims);
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

std::optional<ParametricDensity> closed_form(const ParametricDensity& p, ParametricDensity q, Sign sign) {
  if (!(p.group() == q.group())) throw DomainError("convolution of densities on different groups");
  if (sign == Sign::Minus && q.is_symmetric()) {
    q = q.reflected();
    sign = Sign::Plus;
  }
  const auto& fp = p.family();
  const auto& fq = q.family();
  auto gamma_like = [](const ParametricFamily& f) -> std::optional<GammaParams> {
    if (const auto* e = std::get_if<ExponentialParams>(&f)) return GammaParams{1.0, e->rate};
    if (const auto* g = std::get_if<GammaParams>(&f)) return *g;
    return std::nullopt;
  };
  if (sign == Sign::Plus) {
    if (const auto* a = std::get_if<GaussianParams>(&fp)) {
      if (const auto* b = std::get_if<GaussianParams>(&fq)) {
        return ParametricDensity::gaussian(a->mean + b->mean, a->cov + b->cov);
      }
    }
    if (const auto* a = std::get_if<LogNormalParams>(&fp)) {
      if (const auto* b = std::get_if<LogNormalParams>(&fq)) {
        return ParametricDensity::lognormal(a->mu + b->mu, std::hypot(a->sigma, b->sigma));
      }
    }
    const auto ga = gamma_like(fp);
    const auto gb = gamma_like(fq);
    if (ga && gb && nearly_equal(ga->rate, gb->rate)) return ParametricDensity::gamma(ga->shape + gb->shape, ga->rate);
    return std::nullopt;
  }
  const auto ga = gamma_like(fp);
  const auto gb = gamma_like(fq);
  if (ga && gb && ga->shape == 1.0 && gb->shape == 1.0 && nearly_equal(ga->rate, gb->rate)) {
    return ParametricDensity::laplace(0.0, 1.0 / ga->rate);
  }
  return std::nullopt;
}

GridDensity degenerate_real(int n) {
  return GridDensity(GroupSpec::real(n), std::vector<GridAxis>(static_cast<std::size_t>(n), GridAxis{0.0, 0.0, 1, false}),
                     {1.0});
}

}  // namespace

FinitePMF convolve(const FinitePMF& p, const FinitePMF& q_in, Sign sign, ConvolutionMethod method) {
  if (!(p.group() == q_in.group())) throw DomainError("convolution of pmfs on different groups");
  const FinitePMF q = sign == Sign::Minus ? q_in.negated() : q_in;
  if (method == ConvolutionMethod::Auto) {
    const std::size_t n = p.size();
    const std::size_t work = count_nonzero(p.probs()) * count_nonzero(q.probs());
    method = work <= 32 * n ? ConvolutionMethod::Naive : ConvolutionMethod::Transform;
  }
  auto out = method == ConvolutionMethod::Naive ? finite_naive(p, q) : finite_transform(p, q);
  return FinitePMF::from_weights(p.group(), std::move(out));
}

GridDensity convolve(const GridDensity& p_in, const GridDensity& q_in, Sign sign, const ConvolutionOptions& opts) {
  if (!(p_in.group() == q_in.group())) throw DomainError("convolution of grids on different groups");
  GridDensity p = p_in;
  GridDensity q = sign == Sign::Minus ? q_in.negated() : q_in;
  const std::size_t dim = p.dim();
  for (std::size_t a = 0; a < dim; ++a) {
    const auto& ap = p.axes()[a];
    const auto& aq = q.axes()[a];
    if (ap.degenerate() || aq.degenerate()) continue;
    const double wp = ap.width();
    const double wq = aq.width();
    if (std::abs(wp - wq) <= 1e-12 * std::max(wp, wq)) continue;
    if (wp < wq) {
      q = q.resampled(a, wp);
    } else {
      p = p.resampled(a, wq);
    }
  }

  std::vector<GridAxis> out_axes(dim);
  std::vector<std::size_t> np(dim), nq(dim), nout(dim), fft_dims(dim);
  std::size_t total = 1;
  for (std::size_t a = 0; a < dim; ++a) {
    const auto& ap = p.axes()[a];
    const auto& aq = q.axes()[a];
    np[a] = ap.cells;
    nq[a] = aq.cells;
    if (ap.periodic) {
      // Cell k collects index sums i + j, whose centres sit at (k + 1) w: a
      // half-cell rotation of the exact law, which leaves entropies unchanged.
      nout[a] = ap.cells;
      fft_dims[a] = ap.cells;
      out_axes[a] = ap;
    } else {
      nout[a] = np[a] + nq[a] - 1;
      fft_dims[a] = smooth_size(nout[a]);
      if (ap.degenerate() && aq.degenerate()) {
        out_axes[a] = {ap.lo + aq.lo, ap.lo + aq.lo, 1, false};
      } else if (ap.degenerate()) {
        out_axes[a] = {aq.lo + ap.lo, aq.hi + ap.lo, aq.cells, false};
      } else if (aq.degenerate()) {
        out_axes[a] = {ap.lo + aq.lo, ap.hi + aq.lo, ap.cells, false};
      } else {
        const double w = ap.width();
        const double lo = ap.lo + aq.lo + 0.5 * w;
        out_axes[a] = {lo, lo + static_cast<double>(nout[a]) * w, nout[a], false};
      }
    }
    total *= nout[a];
  }
  if (total > opts.grid.max_cells) {
    throw ResolutionError("grid convolution needs " + std::to_string(total) + " cells, above the cap of " +
                          std::to_string(opts.grid.max_cells) +
                          "; coarsen the inputs or raise GridConfig::max_cells");
  }

  ConvolutionMethod method = opts.method;
  if (method == ConvolutionMethod::Auto) {
    const double work = static_cast<double>(count_nonzero(p.masses())) * static_cast<double>(count_nonzero(q.masses()));
    method = work <= 64.0 * static_cast<double>(total) ? ConvolutionMethod::Naive : ConvolutionMethod::Transform;
  }

  std::vector<double> out(total, 0.0);
  if (method == ConvolutionMethod::Naive) {
    const auto sp = p.strides();
    const auto sq = q.strides();
    std::vector<std::size_t> ip(dim), iq(dim);
    for (std::size_t c1 = 0; c1 < p.total_cells(); ++c1) {
      const double m1 = p.masses()[c1];
      if (m1 == 0.0) continue;
      for (std::size_t a = 0; a < dim; ++a) ip[a] = (c1 / sp[a]) % np[a];
      for (std::size_t c2 = 0; c2 < q.total_cells(); ++c2) {
        const double m2 = q.masses()[c2];
        if (m2 == 0.0) continue;
        std::size_t o = 0;
        for (std::size_t a = 0; a < dim; ++a) {
          std::size_t k = ip[a] + (c2 / sq[a]) % nq[a];
          if (p.axes()[a].periodic && k >= nout[a]) k -= nout[a];
          o = o * nout[a] + k;
        }
        out[o] += m1 * m2;
      }
    }
  } else {
    const auto fa = embed(p.masses(), np, fft_dims);
    const auto fb = embed(q.masses(), nq, fft_dims);
    std::vector<int> dims(fft_dims.begin(), fft_dims.end());
    const auto full = cyclic_fft(fa, fb, dims);
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t o = 0; o < total; ++o) {
      std::size_t f = 0;
      for (std::size_t a = 0; a < dim; ++a) f = f * fft_dims[a] + idx[a];
      out[o] = full[f];
      for (std::size_t a = dim; a-- > 0;) {
        if (++idx[a] < nout[a]) break;
        idx[a] = 0;
      }
    }
  }
  for (auto& v : out) {
    if (v < 0.0) v = 0.0;  // transform round-off
  }
  return GridDensity::from_weights(p.group(), std::move(out_axes), std::move(out),
                                   p.truncated_mass() + q.truncated_mass());
}

bool has_closed_form(const Density& p, const Density& q, Sign sign) {
  const auto* a = std::get_if<ParametricDensity>(&p);
  const auto* b = std::get_if<ParametricDensity>(&q);
  return a && b && closed_form(*a, *b, sign).has_value();
}

GridDensity as_grid(const Density& d, const GridConfig& config) {
  return std::visit(overloaded{
                        [](const FinitePMF&) -> GridDensity { throw DomainError("finite pmfs have no grid form"); },
                        [](const GridDensity& g) { return g; },
                        [&](const ParametricDensity& p) { return discretize(p, config); },
                    },
                    d);
}

Density convolve(const Density& p, const Density& q, Sign sign, const ConvolutionOptions& opts) {
  if (!(group_of(p) == group_of(q))) throw DomainError("convolution of densities on different groups");
  if (const auto* a = std::get_if<FinitePMF>(&p)) {
    return convolve(*a, std::get<FinitePMF>(q), sign, opts.method);
  }
  const auto* a = std::get_if<ParametricDensity>(&p);
  const auto* b = std::get_if<ParametricDensity>(&q);
  if (a && b) {
    if (auto c = closed_form(*a, *b, sign)) return *c;
  }
  return convolve(as_grid(p, opts.grid), as_grid(q, opts.grid), sign, opts);
}

Density negate(const Density& d, const GridConfig& config) {
  return std::visit(overloaded{
                        [](const FinitePMF& p) -> Density { return p.negated(); },
                        [](const GridDensity& g) -> Density { return g.negated(); },
                        [&](const ParametricDensity& p) -> Density {
                          if (p.is_symmetric()) return p.reflected();
                          return discretize(p, config).negated();
                        },
                    },
                    d);
}

Density scale(const Density& d, double c, const GridConfig& config) {
  if (!std::isfinite(c)) throw DomainError("non-finite coefficient");
  if (c == 1.0) return d;
  if (c == -1.0) return negate(d, config);
  return std::visit(
      overloaded{
          [&](const FinitePMF& p) -> Density {
            if (c != std::round(c)) throw DomainError("finite groups need integer coefficients");
            return p.scaled(static_cast<std::int64_t>(c));
          },
          [&](const GridDensity& g) -> Density { return g.scaled(c); },
          [&](const ParametricDensity& p) -> Density {
            if (p.group().kind() != GroupKind::RealVector) throw DomainError("real scaling needs R^n");
            if (c == 0.0) return degenerate_real(p.dimension());
            const double a = std::abs(c);
            const auto& f = p.family();
            if (const auto* x = std::get_if<GaussianParams>(&f)) return ParametricDensity::gaussian(c * x->mean, c * c * x->cov);
            if (const auto* x = std::get_if<LaplaceParams>(&f)) return ParametricDensity::laplace(c * x->location, a * x->scale);
            if (const auto* x = std::get_if<UniformParams>(&f)) {
              std::vector<double> lo(x->lo.size()), hi(x->lo.size());
              for (std::size_t i = 0; i < lo.size(); ++i) {
                lo[i] = std::min(c * x->lo[i], c * x->hi[i]);
                hi[i] = std::max(c * x->lo[i], c * x->hi[i]);
              }
              return ParametricDensity::uniform(lo, hi);
            }
            if (c > 0.0) {
              if (const auto* x = std::get_if<ExponentialParams>(&f)) return ParametricDensity::exponential(x->rate / c);
              if (const auto* x = std::get_if<GammaParams>(&f)) return ParametricDensity::gamma(x->shape, x->rate / c);
            }
            return discretize(p, config).scaled(c);
          },
      },
      d);
}

WeightedSum weighted_sum(const std::vector<double>& coefficients, const std::vector<Density>& operands,
                         const ConvolutionOptions& opts) {
  if (coefficients.empty() || coefficients.size() != operands.size()) {
    throw ValidationError("weighted sum needs one coefficient per operand");
  }
  if (std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; })) {
    throw ValidationError("weighted sum needs a nonzero coefficient");
  }
  WeightedSum out{operands.front(), false};
  bool first = true;
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (!(group_of(operands[i]) == group_of(operands.front()))) throw DomainError("operands on different groups");
    if (coefficients[i] == 0.0) {
      out.zero_coefficient = true;
      continue;
    }
    Density term = scale(operands[i], coefficients[i], opts.grid);
    out.law = first ? term : convolve(out.law, term, Sign::Plus, opts);
    first = false;
  }
  return out;
}

Density self_convolve(const Density& p, std::size_t k, const std::vector<Sign>& signs, const ConvolutionOptions& opts) {
  if (k == 0) throw ValidationError("self-convolution needs k >= 1");
  if (!signs.empty() && signs.size() != k) throw ValidationError("one sign per summand");
  auto sign_at = [&](std::size_t i) { return signs.empty() ? Sign::Plus : signs[i]; };
  Density out = sign_at(0) == Sign::Minus ? negate(p, opts.grid) : p;
  for (std::size_t i = 1; i < k; ++i) out = convolve(out, p, sign_at(i), opts);
  return out;
}

}  // namespace ruzsa
