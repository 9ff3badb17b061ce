#include "ruzsa/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ruzsa/error.hpp"

namespace ruzsa {
namespace {

__extension__ typedef __int128 i128;

std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// a * x mod m without overflow for |a|, m < 2^62.
std::int64_t mul_mod(std::int64_t a, std::int64_t x, std::int64_t m) {
  const i128 prod = static_cast<i128>(mod_floor(a, m)) * x;
  return static_cast<std::int64_t>(prod % m);
}

const FiniteElement& as_finite(const GroupSpec& g, const Element& x) {
  const auto* f = std::get_if<FiniteElement>(&x);
  if (f == nullptr) {
    throw DomainError("expected a finite-group element for " + g.describe());
  }
  return *f;
}

const RealElement& as_real(const GroupSpec& g, const Element& x) {
  const auto* r = std::get_if<RealElement>(&x);
  if (r == nullptr) {
    throw DomainError("expected a real-coordinate element for " + g.describe());
  }
  return *r;
}

void require_member(const GroupSpec& g, const Element& x) {
  if (!g.contains(x)) {
    throw DomainError("element outside the carrier of " + g.describe());
  }
}

// Indices of coordinates that live on the circle (angles mod 2pi).
bool is_angle_coordinate(const GroupSpec& g, std::size_t i) {
  return g.kind() == GroupKind::Circle ||
         (g.kind() == GroupKind::MultiplicativeComplex && i == 1);
}

}  // namespace

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

GroupSpec GroupSpec::finite(std::vector<std::int64_t> moduli) {
  if (moduli.empty()) throw ValidationError("finite group needs at least one modulus");
  for (auto m : moduli) {
    if (m < 2) throw ValidationError("cyclic moduli must be >= 2, got " + std::to_string(m));
  }
  GroupSpec g;
  g.kind_ = GroupKind::FiniteProduct;
  g.moduli_ = std::move(moduli);
  g.dimension_ = static_cast<int>(g.moduli_.size());
  // Overflow guard for flat indexing.
  long double order = 1;
  for (auto m : g.moduli_) order *= static_cast<long double>(m);
  if (order > 1e15L) throw ValidationError("finite group too large to index");
  return g;
}

GroupSpec GroupSpec::real(int dimension) {
  if (dimension < 1) throw ValidationError("real dimension must be >= 1");
  GroupSpec g;
  g.kind_ = GroupKind::RealVector;
  g.dimension_ = dimension;
  return g;
}

GroupSpec GroupSpec::circle() {
  GroupSpec g;
  g.kind_ = GroupKind::Circle;
  g.dimension_ = 1;
  return g;
}

GroupSpec GroupSpec::multiplicative_positive() {
  GroupSpec g;
  g.kind_ = GroupKind::MultiplicativePositive;
  g.dimension_ = 1;
  return g;
}

GroupSpec GroupSpec::multiplicative_complex() {
  GroupSpec g;
  g.kind_ = GroupKind::MultiplicativeComplex;
  g.dimension_ = 2;
  return g;
}

int GroupSpec::coordinate_count() const { return dimension_; }

int GroupSpec::real_dimension() const {
  if (is_finite()) throw DomainError("finite groups have no real dimension");
  return dimension_;
}

std::size_t GroupSpec::order() const {
  if (!is_finite()) throw DomainError(describe() + " is not finite");
  std::size_t n = 1;
  for (auto m : moduli_) n *= static_cast<std::size_t>(m);
  return n;
}

GroupSpec GroupSpec::power(std::size_t n) const {
  if (!is_finite()) throw DomainError("power() is only defined for finite groups");
  if (n == 0) throw ValidationError("power() needs n >= 1");
  std::vector<std::int64_t> moduli;
  for (std::size_t i = 0; i < n; ++i) moduli.insert(moduli.end(), moduli_.begin(), moduli_.end());
  return finite(std::move(moduli));
}

std::size_t GroupSpec::index_of(const FiniteElement& x) const {
  if (!is_finite() || x.size() != moduli_.size()) {
    throw DomainError("element has wrong shape for " + describe());
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    if (x[i] < 0 || x[i] >= moduli_[i]) throw DomainError("element outside the carrier of " + describe());
    idx = idx * static_cast<std::size_t>(moduli_[i]) + static_cast<std::size_t>(x[i]);
  }
  return idx;
}

FiniteElement GroupSpec::element_at(std::size_t index) const {
  if (index >= order()) throw DomainError("index outside " + describe());
  FiniteElement x(moduli_.size());
  for (std::size_t i = moduli_.size(); i-- > 0;) {
    const auto m = static_cast<std::size_t>(moduli_[i]);
    x[i] = static_cast<std::int64_t>(index % m);
    index /= m;
  }
  return x;
}

std::size_t GroupSpec::add_index(std::size_t a, std::size_t b) const {
  if (moduli_.size() == 1) {
    const auto m = static_cast<std::size_t>(moduli_[0]);
    const std::size_t s = a + b;
    return s >= m ? s - m : s;
  }
  std::size_t out = 0;
  std::size_t stride = 1;
  for (std::size_t i = moduli_.size(); i-- > 0;) {
    const auto m = static_cast<std::size_t>(moduli_[i]);
    std::size_t s = a % m + b % m;
    if (s >= m) s -= m;
    out += s * stride;
    stride *= m;
    a /= m;
    b /= m;
  }
  return out;
}

std::size_t GroupSpec::negate_index(std::size_t a) const {
  if (moduli_.size() == 1) {
    const auto m = static_cast<std::size_t>(moduli_[0]);
    return a == 0 ? 0 : m - a;
  }
  std::size_t out = 0;
  std::size_t stride = 1;
  for (std::size_t i = moduli_.size(); i-- > 0;) {
    const auto m = static_cast<std::size_t>(moduli_[i]);
    const std::size_t c = a % m;
    out += (c == 0 ? 0 : m - c) * stride;
    stride *= m;
    a /= m;
  }
  return out;
}

std::size_t GroupSpec::scale_index(std::int64_t factor, std::size_t a) const {
  std::size_t out = 0;
  std::size_t stride = 1;
  for (std::size_t i = moduli_.size(); i-- > 0;) {
    const auto m = moduli_[i];
    const auto c = static_cast<std::int64_t>(a % static_cast<std::size_t>(m));
    out += static_cast<std::size_t>(mul_mod(factor, c, m)) * stride;
    stride *= static_cast<std::size_t>(m);
    a /= static_cast<std::size_t>(m);
  }
  return out;
}

bool GroupSpec::contains(const Element& x) const {
  if (is_finite()) {
    const auto* f = std::get_if<FiniteElement>(&x);
    if (f == nullptr || f->size() != moduli_.size()) return false;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      if ((*f)[i] < 0 || (*f)[i] >= moduli_[i]) return false;
    }
    return true;
  }
  const auto* r = std::get_if<RealElement>(&x);
  if (r == nullptr || static_cast<int>(r->size()) != dimension_) return false;
  for (std::size_t i = 0; i < r->size(); ++i) {
    const double v = (*r)[i];
    if (!std::isfinite(v)) return false;
    if (is_angle_coordinate(*this, i) && (v < 0.0 || v >= kTwoPi)) return false;
  }
  return true;
}

std::string GroupSpec::describe() const {
  switch (kind_) {
    case GroupKind::FiniteProduct: {
      std::string s;
      for (std::size_t i = 0; i < moduli_.size(); ++i) {
        if (i) s += "x";
        s += "Z" + std::to_string(moduli_[i]);
      }
      return s;
    }
    case GroupKind::RealVector:
      return "R^" + std::to_string(dimension_);
    case GroupKind::Circle:
      return "T";
    case GroupKind::MultiplicativePositive:
      return "(0,inf)x";
    case GroupKind::MultiplicativeComplex:
      return "Cx";
  }
  return "?";
}

Element add(const GroupSpec& g, const Element& x, const Element& y) {
  require_member(g, x);
  require_member(g, y);
  if (g.is_finite()) {
    const auto& a = as_finite(g, x);
    const auto& b = as_finite(g, y);
    FiniteElement out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + b[i]) % g.moduli()[i];
    return out;
  }
  const auto& a = as_real(g, x);
  const auto& b = as_real(g, y);
  RealElement out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = is_angle_coordinate(g, i) ? wrap_angle(a[i] + b[i]) : a[i] + b[i];
  }
  return out;
}

Element negate(const GroupSpec& g, const Element& x) { return scalar_mul(g, -1, x); }

Element scalar_mul(const GroupSpec& g, std::int64_t a, const Element& x) {
  require_member(g, x);
  if (g.is_finite()) {
    const auto& v = as_finite(g, x);
    FiniteElement out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = mul_mod(a, v[i], g.moduli()[i]);
    return out;
  }
  const auto& v = as_real(g, x);
  RealElement out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = static_cast<double>(a) * v[i];
    out[i] = is_angle_coordinate(g, i) ? wrap_angle(s) : s;
  }
  return out;
}

Element identity(const GroupSpec& g) {
  if (g.is_finite()) return FiniteElement(g.moduli().size(), 0);
  return RealElement(static_cast<std::size_t>(g.coordinate_count()), 0.0);
}

bool elements_equal(const GroupSpec& g, const Element& x, const Element& y) {
  require_member(g, x);
  require_member(g, y);
  if (g.is_finite()) return as_finite(g, x) == as_finite(g, y);
  const auto& a = as_real(g, x);
  const auto& b = as_real(g, y);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::abs(a[i] - b[i]);
    if (is_angle_coordinate(g, i)) d = std::min(d, kTwoPi - d);
    if (d > 1e-12) return false;
  }
  return true;
}

RealElement to_log_coordinates(double positive) {
  if (!(positive > 0.0) || !std::isfinite(positive)) {
    throw DomainError("multiplicative positive group needs x > 0");
  }
  return {std::log(positive)};
}

RealElement to_log_coordinates(double re, double im) {
  const double r = std::hypot(re, im);
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("complex multiplicative group excludes 0");
  return {std::log(r), wrap_angle(std::atan2(im, re))};
}

double from_log_coordinates_positive(const RealElement& x) {
  if (x.size() != 1) throw DomainError("positive multiplicative element needs one coordinate");
  return std::exp(x[0]);
}

std::pair<double, double> from_log_coordinates_complex(const RealElement& x) {
  if (x.size() != 2) throw DomainError("complex multiplicative element needs two coordinates");
  const double r = std::exp(x[0]);
  return {r * std::cos(x[1]), r * std::sin(x[1])};
}

// --- IntegerMatrix --------------------------------------------------------

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw ValidationError("integer matrix needs positive dimensions");
  if (entries_.size() != rows * cols) throw ValidationError("integer matrix entry count mismatch");
}

IntegerMatrix::IntegerMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw ValidationError("integer matrix needs positive dimensions");
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("ragged integer matrix");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
  std::vector<std::int64_t> e(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1;
  return IntegerMatrix(n, n, std::move(e));
}

std::int64_t IntegerMatrix::determinant() const {
  if (!is_square()) throw DomainError("determinant of a non-square matrix");
  const std::size_t n = rows_;
  std::vector<i128> a(entries_.begin(), entries_.end());
  auto at = [&](std::size_t i, std::size_t j) -> i128& { return a[i * n + j]; };
  i128 prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
        constexpr i128 kLimit = static_cast<i128>(1) << 100;
        if (at(i, j) > kLimit || at(i, j) < -kLimit) {
          throw DomainError("integer determinant overflow");
        }
      }
    }
    prev = at(k, k);
  }
  const i128 det = sign * at(n - 1, n - 1);
  if (det > INT64_MAX || det < INT64_MIN) throw DomainError("integer determinant overflow");
  return static_cast<std::int64_t>(det);
}

IntegerMatrix IntegerMatrix::inverse() const {
  const std::int64_t det = determinant();
  if (det != 1 && det != -1) throw DomainError("integer inverse needs determinant +-1");
  const std::size_t n = rows_;
  if (n == 1) return IntegerMatrix(1, 1, {det});
  // adj(A)_{ji} = (-1)^{i+j} det(minor_ij); A^{-1} = adj(A) / det.
  std::vector<std::int64_t> inv(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::int64_t> minor;
      minor.reserve((n - 1) * (n - 1));
      for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        for (std::size_t c = 0; c < n; ++c) {
          if (c != j) minor.push_back((*this)(r, c));
        }
      }
      const std::int64_t cof = IntegerMatrix(n - 1, n - 1, std::move(minor)).determinant();
      inv[j * n + i] = (((i + j) % 2) ? -cof : cof) * det;
    }
  }
  return IntegerMatrix(n, n, std::move(inv));
}

IntegerMatrix IntegerMatrix::operator*(const IntegerMatrix& other) const {
  if (cols_ != other.rows_) throw DomainError("integer matrix product dimension mismatch");
  std::vector<std::int64_t> out(rows_ * other.cols_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      for (std::size_t j = 0; j < other.cols_; ++j) {
        out[i * other.cols_ + j] += (*this)(i, k) * other(k, j);
      }
    }
  }
  return IntegerMatrix(rows_, other.cols_, std::move(out));
}

bool is_unimodular(const IntegerMatrix& a) {
  if (!a.is_square()) return false;
  const auto det = a.determinant();
  return det == 1 || det == -1;
}

std::vector<Element> apply_integer_matrix(const IntegerMatrix& a, const GroupSpec& g,
                                          std::span<const Element> x) {
  if (a.cols() != x.size()) {
    throw DomainError("matrix has " + std::to_string(a.cols()) + " columns but the tuple has " +
                      std::to_string(x.size()) + " components");
  }
  std::vector<Element> out;
  out.reserve(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Element acc = identity(g);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      acc = add(g, acc, scalar_mul(g, a(i, j), x[j]));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::size_t apply_integer_matrix_index(const IntegerMatrix& a, const GroupSpec& g,
                                       const GroupSpec& power, std::size_t x) {
  const std::size_t n = a.cols();
  const std::size_t order = g.order();
  std::vector<std::size_t> parts(n);
  for (std::size_t j = n; j-- > 0;) {
    parts[j] = x % order;
    x /= order;
  }
  std::size_t out = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::size_t acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) != 0) acc = g.add_index(acc, g.scale_index(a(i, j), parts[j]));
    }
    out = out * order + acc;
  }
  (void)power;
  return out;
}

// --- sumsets --------------------------------------------------------------

namespace {

void require_finite_nonempty(const GroupSpec& g, const ElementSet& a, const ElementSet& b) {
  if (!g.is_finite()) throw DomainError("sumsets are only defined here for finite groups");
  if (a.empty() || b.empty()) throw ValidationError("sumset of an empty set");
  const std::size_t n = g.order();
  for (auto x : a) {
    if (x >= n) throw DomainError("set element outside " + g.describe());
  }
  for (auto x : b) {
    if (x >= n) throw DomainError("set element outside " + g.describe());
  }
}

ElementSet from_mask(const std::vector<char>& mask) {
  ElementSet out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

ElementSet make_set(const GroupSpec& g, const std::vector<FiniteElement>& elements) {
  ElementSet out;
  out.reserve(elements.size());
  for (const auto& e : elements) out.push_back(g.index_of(e));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ElementSet sumset(const GroupSpec& g, const ElementSet& a, const ElementSet& b) {
  require_finite_nonempty(g, a, b);
  std::vector<char> mask(g.order(), 0);
  for (auto x : a) {
    for (auto y : b) mask[g.add_index(x, y)] = 1;
  }
  return from_mask(mask);
}

ElementSet difference_set(const GroupSpec& g, const ElementSet& a, const ElementSet& b) {
  require_finite_nonempty(g, a, b);
  std::vector<char> mask(g.order(), 0);
  for (auto x : a) {
    for (auto y : b) mask[g.add_index(x, g.negate_index(y))] = 1;
  }
  return from_mask(mask);
}

ElementSet restricted_sumset(const GroupSpec& g, const ElementSet& a, const ElementSet& b,
                             const std::vector<IndexPair>& edges) {
  require_finite_nonempty(g, a, b);
  std::vector<char> mask(g.order(), 0);
  for (const auto& [x, y] : edges) {
    if (!std::binary_search(a.begin(), a.end(), x) || !std::binary_search(b.begin(), b.end(), y)) {
      throw DomainError("restricted sumset edge outside A x B");
    }
    mask[g.add_index(x, y)] = 1;
  }
  return from_mask(mask);
}

// --- JSON -----------------------------------------------------------------

nlohmann::json group_to_json(const GroupSpec& g) {
  nlohmann::json j;
  j["version"] = 1;
  switch (g.kind()) {
    case GroupKind::FiniteProduct:
      j["kind"] = "finite";
      j["moduli"] = g.moduli();
      break;
    case GroupKind::RealVector:
      j["kind"] = "real";
      j["dim"] = g.coordinate_count();
      break;
    case GroupKind::Circle:
      j["kind"] = "circle";
      break;
    case GroupKind::MultiplicativePositive:
      j["kind"] = "multiplicative_positive";
      break;
    case GroupKind::MultiplicativeComplex:
      j["kind"] = "multiplicative_complex";
      break;
  }
  return j;
}

GroupSpec group_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ParseError("group must be a JSON object");
    if (j.contains("version") && j.at("version").get<int>() != 1) {
      throw ParseError("unsupported group schema version");
    }
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "finite") return GroupSpec::finite(j.at("moduli").get<std::vector<std::int64_t>>());
    if (kind == "real") return GroupSpec::real(j.at("dim").get<int>());
    if (kind == "circle") return GroupSpec::circle();
    if (kind == "multiplicative_positive") return GroupSpec::multiplicative_positive();
    if (kind == "multiplicative_complex") return GroupSpec::multiplicative_complex();
    throw ParseError("unknown group kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed group: ") + e.what());
  }
}

}  // namespace ruzsa
