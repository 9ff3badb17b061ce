#include "ruzsa/joint_pmf.hpp"

#include <algorithm>
#include <cmath>
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

// Addition on flat indices of one finite group, with a table for small
// non-cyclic groups.
class Adder {
 public:
  explicit Adder(const GroupSpec& g) : g_(g), n_(g.order()) {
    cyclic_ = g.moduli().size() == 1;
    if (!cyclic_ && n_ <= 1024) {
      table_.resize(n_ * n_);
      for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b) table_[a * n_ + b] = g.add_index(a, b);
    }
  }
  std::size_t operator()(std::size_t a, std::size_t b) const {
    if (cyclic_) {
      const std::size_t s = a + b;
      return s >= n_ ? s - n_ : s;
    }
    if (!table_.empty()) return table_[a * n_ + b];
    return g_.add_index(a, b);
  }

 private:
  GroupSpec g_;
  std::size_t n_;
  bool cyclic_ = false;
  std::vector<std::size_t> table_;
};

struct CompiledForm {
  std::vector<std::size_t> axes;
  std::vector<std::vector<std::size_t>> scaled;  // scaled[k][v] = coeff_k * v
  Adder adder;
};

}  // namespace

VarList vars(std::initializer_list<std::size_t> axes) {
  VarList out;
  for (auto a : axes) out.push_back(LinearForm::var(a));
  return out;
}

JointPMF::JointPMF(std::vector<GroupSpec> groups, std::vector<double> tensor)
    : groups_(std::move(groups)), tensor_(std::move(tensor)) {
  if (groups_.empty()) throw ValidationError("JointPMF needs at least one variable");
  for (const auto& g : groups_) {
    if (!g.is_finite()) throw DomainError("JointPMF variables must live in finite groups");
  }
  init_shape();
  std::size_t n = 1;
  for (auto s : shape_) n *= s;
  if (tensor_.size() != n) {
    throw ValidationError("joint tensor has " + std::to_string(tensor_.size()) + " entries, expected " +
                          std::to_string(n));
  }
  for (double p : tensor_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("negative or non-finite joint probability");
  }
  const double total = neumaier_sum(tensor_);
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw ValidationError("joint probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

JointPMF::JointPMF(Trusted, std::vector<GroupSpec> groups, std::vector<double> tensor)
    : groups_(std::move(groups)), tensor_(std::move(tensor)) {
  init_shape();
}

void JointPMF::init_shape() {
  shape_.clear();
  for (const auto& g : groups_) shape_.push_back(g.order());
}

JointPMF JointPMF::from_weights(std::vector<GroupSpec> groups, std::vector<double> weights) {
  for (auto& w : weights) {
    if (w < 0.0 && w > -1e-13) w = 0.0;
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("negative or non-finite joint weight");
  }
  const double total = neumaier_sum(weights);
  if (!(total > 0.0)) throw ValidationError("joint weights sum to zero");
  for (auto& w : weights) w /= total;
  return JointPMF(std::move(groups), std::move(weights));
}

JointPMF JointPMF::product(std::span<const FinitePMF> factors) {
  if (factors.empty()) throw ValidationError("product of zero factors");
  std::vector<GroupSpec> groups;
  std::vector<double> t{1.0};
  for (const auto& f : factors) {
    groups.push_back(f.group());
    std::vector<double> next(t.size() * f.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < f.size(); ++j) next[i * f.size() + j] = t[i] * f[j];
    t = std::move(next);
  }
  return JointPMF(Trusted{}, std::move(groups), std::move(t));
}

JointPMF JointPMF::of(const FinitePMF& p) {
  return JointPMF(Trusted{}, {p.group()}, std::vector<double>(p.probs().begin(), p.probs().end()));
}

JointPMF JointPMF::from_matrix(const GroupSpec& g1, const GroupSpec& g2, std::vector<double> matrix) {
  return JointPMF({g1, g2}, std::move(matrix));
}

JointPMF JointPMF::marginal(const std::vector<std::size_t>& axes) const {
  if (axes.empty()) throw ValidationError("marginal over an empty index set");
  VarList forms;
  for (auto a : axes) forms.push_back(LinearForm::var(a));
  return pushforward(forms);
}

FinitePMF JointPMF::marginal_pmf(std::size_t axis) const { return law(LinearForm::var(axis)); }

JointPMF JointPMF::pushforward(const VarList& forms) const {
  if (forms.empty()) throw ValidationError("pushforward needs at least one form");
  std::vector<CompiledForm> compiled;
  std::vector<GroupSpec> out_groups;
  for (const auto& f : forms) {
    if (f.terms.empty()) throw ValidationError("linear form with no terms");
    const std::size_t first = f.terms.front().first;
    if (first >= arity()) throw ValidationError("linear form axis out of range");
    const GroupSpec& g = groups_[first];
    CompiledForm cf{{}, {}, Adder(g)};
    for (const auto& [axis, coeff] : f.terms) {
      if (axis >= arity()) throw ValidationError("linear form axis out of range");
      if (!(groups_[axis] == g)) throw DomainError("linear form mixes variables from different groups");
      cf.axes.push_back(axis);
      std::vector<std::size_t> tab(g.order());
      for (std::size_t v = 0; v < tab.size(); ++v) tab[v] = g.scale_index(coeff, v);
      cf.scaled.push_back(std::move(tab));
    }
    compiled.push_back(std::move(cf));
    out_groups.push_back(g);
  }
  std::vector<std::size_t> out_stride(out_groups.size(), 1);
  std::size_t out_size = 1;
  for (std::size_t i = out_groups.size(); i-- > 0;) {
    out_stride[i] = out_size;
    out_size *= out_groups[i].order();
  }
  std::vector<double> out(out_size, 0.0);
  std::vector<std::size_t> idx(arity(), 0);
  for (std::size_t flat = 0; flat < tensor_.size(); ++flat) {
    const double p = tensor_[flat];
    if (p != 0.0) {
      std::size_t o = 0;
      for (std::size_t k = 0; k < compiled.size(); ++k) {
        const auto& cf = compiled[k];
        std::size_t acc = cf.scaled[0][idx[cf.axes[0]]];
        for (std::size_t t = 1; t < cf.axes.size(); ++t) acc = cf.adder(acc, cf.scaled[t][idx[cf.axes[t]]]);
        o += acc * out_stride[k];
      }
      out[o] += p;
    }
    for (std::size_t a = arity(); a-- > 0;) {
      if (++idx[a] < shape_[a]) break;
      idx[a] = 0;
    }
  }
  return JointPMF(Trusted{}, std::move(out_groups), std::move(out));
}

FinitePMF JointPMF::law(const LinearForm& form) const {
  auto j = pushforward({form});
  return FinitePMF::from_weights(j.groups_[0], std::move(j.tensor_));
}

JointPMF JointPMF::permuted(const std::vector<std::size_t>& order) const {
  if (order.size() != arity()) throw ValidationError("permutation has the wrong length");
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) throw ValidationError("not a permutation of the axes");
  }
  return marginal(order);
}

Conditioning condition_on(const JointPMF& j, const std::vector<std::size_t>& given) {
  if (given.empty()) throw ValidationError("conditioning on an empty index set");
  std::vector<std::size_t> rest;
  for (std::size_t a = 0; a < j.arity(); ++a) {
    if (std::find(given.begin(), given.end(), a) == given.end()) rest.push_back(a);
  }
  if (rest.empty()) throw ValidationError("conditioning leaves no variables");
  std::vector<std::size_t> order = given;
  order.insert(order.end(), rest.begin(), rest.end());
  const JointPMF p = j.permuted(order);
  const JointPMF pg = j.marginal(given);
  const std::size_t block = p.size() / pg.size();
  std::vector<GroupSpec> rest_groups;
  for (auto a : rest) rest_groups.push_back(j.groups()[a]);
  std::vector<std::optional<JointPMF>> conds(pg.size());
  for (std::size_t g = 0; g < pg.size(); ++g) {
    if (pg.tensor()[g] <= 0.0) continue;
    std::vector<double> w(p.tensor().begin() + static_cast<std::ptrdiff_t>(g * block),
                          p.tensor().begin() + static_cast<std::ptrdiff_t>((g + 1) * block));
    conds[g] = JointPMF::from_weights(rest_groups, std::move(w));
  }
  return {given, rest, pg, std::move(conds)};
}

JointPMF mix(const Conditioning& c) {
  const auto& pg = c.given_law;
  std::size_t block = 0;
  std::vector<GroupSpec> groups = pg.groups();
  for (const auto& cond : c.conditionals) {
    if (cond) {
      block = cond->size();
      groups.insert(groups.end(), cond->groups().begin(), cond->groups().end());
      break;
    }
  }
  if (block == 0) throw ValidationError("conditioning has no positive-mass values");
  std::vector<double> t(pg.size() * block, 0.0);
  for (std::size_t g = 0; g < pg.size(); ++g) {
    if (!c.conditionals[g]) continue;
    const auto ct = c.conditionals[g]->tensor();
    for (std::size_t r = 0; r < block; ++r) t[g * block + r] = pg.tensor()[g] * ct[r];
  }
  return JointPMF::from_weights(std::move(groups), std::move(t));
}

JointPMF markov_triple(const JointPMF& pxy) {
  if (pxy.arity() != 2) throw ValidationError("markov_triple needs a joint over (X, Y)");
  const std::size_t nx = pxy.shape()[0];
  const std::size_t ny = pxy.shape()[1];
  const auto p = pxy.tensor();
  std::vector<double> py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) py[y] += p[x * ny + y];
  std::vector<double> t(nx * ny * nx, 0.0);
  for (std::size_t x1 = 0; x1 < nx; ++x1)
    for (std::size_t y = 0; y < ny; ++y) {
      if (py[y] <= 0.0) continue;
      const double a = p[x1 * ny + y] / py[y];
      if (a == 0.0) continue;
      for (std::size_t x2 = 0; x2 < nx; ++x2) t[(x1 * ny + y) * nx + x2] = a * p[x2 * ny + y];
    }
  const auto& gx = pxy.groups()[0];
  const auto& gy = pxy.groups()[1];
  return JointPMF::from_weights({gx, gy, gx}, std::move(t));
}

JointPMF markov_triple(const FinitePMF& py, const std::vector<FinitePMF>& cond1,
                       const std::vector<FinitePMF>& cond2) {
  const std::size_t ny = py.size();
  if (cond1.size() != ny || cond2.size() != ny) throw ValidationError("one conditional law per value of Y");
  const GroupSpec g1 = cond1.front().group();
  const GroupSpec g2 = cond2.front().group();
  const std::size_t n1 = g1.order();
  const std::size_t n2 = g2.order();
  std::vector<double> t(n1 * ny * n2, 0.0);
  for (std::size_t y = 0; y < ny; ++y) {
    if (!(cond1[y].group() == g1) || !(cond2[y].group() == g2)) {
      throw DomainError("conditional laws must share one group per variable");
    }
    for (std::size_t a = 0; a < n1; ++a)
      for (std::size_t b = 0; b < n2; ++b) t[(a * ny + y) * n2 + b] = py[y] * cond1[y][a] * cond2[y][b];
  }
  return JointPMF::from_weights({g1, py.group(), g2}, std::move(t));
}

JointPMF markov_chain4(const JointPMF& pxy) {
  if (pxy.arity() != 2) throw ValidationError("markov_chain4 needs a joint over (X, Y)");
  const std::size_t nx = pxy.shape()[0];
  const std::size_t ny = pxy.shape()[1];
  const auto p = pxy.tensor();
  std::vector<double> px(nx, 0.0), py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      px[x] += p[x * ny + y];
      py[y] += p[x * ny + y];
    }
  // Axes (X2, Y1, X1, Y2).
  std::vector<double> t(nx * ny * nx * ny, 0.0);
  for (std::size_t x2 = 0; x2 < nx; ++x2)
    for (std::size_t y1 = 0; y1 < ny; ++y1) {
      const double a = p[x2 * ny + y1];
      if (a == 0.0) continue;
      for (std::size_t x1 = 0; x1 < nx; ++x1) {
        const double b = p[x1 * ny + y1];
        if (b == 0.0) continue;
        const double ab = a * b / py[y1] / px[x1];
        for (std::size_t y2 = 0; y2 < ny; ++y2) t[((x2 * ny + y1) * nx + x1) * ny + y2] = ab * p[x1 * ny + y2];
      }
    }
  const auto& gx = pxy.groups()[0];
  const auto& gy = pxy.groups()[1];
  JointPMF chain({gx, gy, gx, gy}, std::move(t));
  for (const auto& pair : {std::vector<std::size_t>{0, 1}, {2, 1}, {2, 3}}) {
    const auto m = chain.marginal(pair);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (std::abs(m.tensor()[i] - p[i]) > 1e-12) {
        throw Error("markov_chain4: pair marginal differs from the input joint");
      }
    }
  }
  return chain;
}

}  // namespace ruzsa
