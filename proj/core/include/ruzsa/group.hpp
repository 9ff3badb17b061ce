#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ruzsa {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Haar normalization, fixed once per kind:
//   FiniteProduct           counting measure
//   RealVector(n)           Lebesgue measure on R^n
//   Circle                  uniform probability measure on [0, 2pi)
//   MultiplicativePositive  dx/x, i.e. Lebesgue measure in the coordinate log x
//   MultiplicativeComplex   dz/|z|^2, i.e. Lebesgue measure dl dtheta in the
//                           coordinates (l, theta) = (log|z|, arg z)
// Multiplicative kinds are only ever handled through these log coordinates.
enum class GroupKind {
  FiniteProduct,
  RealVector,
  Circle,
  MultiplicativePositive,
  MultiplicativeComplex,
};

using FiniteElement = std::vector<std::int64_t>;
using RealElement = std::vector<double>;
using Element = std::variant<FiniteElement, RealElement>;

class GroupSpec {
 public:
  static GroupSpec finite(std::vector<std::int64_t> moduli);
  static GroupSpec cyclic(std::int64_t modulus) { return finite({modulus}); }
  static GroupSpec real(int dimension);
  static GroupSpec circle();
  static GroupSpec multiplicative_positive();
  static GroupSpec multiplicative_complex();

  GroupKind kind() const { return kind_; }
  bool is_finite() const { return kind_ == GroupKind::FiniteProduct; }
  bool is_multiplicative() const {
    return kind_ == GroupKind::MultiplicativePositive || kind_ == GroupKind::MultiplicativeComplex;
  }

  const std::vector<std::int64_t>& moduli() const { return moduli_; }

  // Number of coordinates of an element (number of cyclic factors for finite
  // groups, ambient real dimension otherwise).
  int coordinate_count() const;

  // Real dimension n used by entropy powers; finite groups have none.
  int real_dimension() const;

  // |G| for finite groups; throws DomainError otherwise.
  std::size_t order() const;

  // G^n for a finite group G (moduli repeated n times).
  GroupSpec power(std::size_t n) const;

  // Flat (mixed-radix, last factor fastest) indexing of finite elements.
  std::size_t index_of(const FiniteElement& x) const;
  FiniteElement element_at(std::size_t index) const;
  std::size_t add_index(std::size_t a, std::size_t b) const;
  std::size_t negate_index(std::size_t a) const;
  std::size_t scale_index(std::int64_t factor, std::size_t a) const;

  bool contains(const Element& x) const;
  std::string describe() const;

  bool operator==(const GroupSpec&) const = default;

 private:
  GroupKind kind_ = GroupKind::FiniteProduct;
  std::vector<std::int64_t> moduli_;
  int dimension_ = 0;
};

// Group operation, inverse and integer multiples; throw DomainError on
// elements outside the carrier.
Element add(const GroupSpec& g, const Element& x, const Element& y);
Element negate(const GroupSpec& g, const Element& x);
Element scalar_mul(const GroupSpec& g, std::int64_t a, const Element& x);
Element identity(const GroupSpec& g);

// Equality in the carrier; circle coordinates compare up to 1e-12 with
// wraparound.
bool elements_equal(const GroupSpec& g, const Element& x, const Element& y);

// Log-coordinate isomorphisms for the multiplicative kinds.
RealElement to_log_coordinates(double positive);
RealElement to_log_coordinates(double re, double im);
double from_log_coordinates_positive(const RealElement& x);
std::pair<double, double> from_log_coordinates_complex(const RealElement& x);

// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);

class IntegerMatrix {
 public:
  IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> entries);
  IntegerMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static IntegerMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  std::span<const std::int64_t> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }

  // Exact integer determinant (fraction-free Bareiss elimination).
  std::int64_t determinant() const;

  // Integer inverse; requires determinant +-1.
  IntegerMatrix inverse() const;

  IntegerMatrix operator*(const IntegerMatrix& other) const;
  bool operator==(const IntegerMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::int64_t> entries_;
};

bool is_unimodular(const IntegerMatrix& a);

// (Ax)_i = sum_j a_ij x_j for x in G^n.
std::vector<Element> apply_integer_matrix(const IntegerMatrix& a, const GroupSpec& g,
                                          std::span<const Element> x);

// Same map on flat indices of G^n, where `power` is g.power(n).
std::size_t apply_integer_matrix_index(const IntegerMatrix& a, const GroupSpec& g,
                                       const GroupSpec& power, std::size_t x);

// Finite subsets are sorted vectors of flat element indices.
using ElementSet = std::vector<std::size_t>;
using IndexPair = std::pair<std::size_t, std::size_t>;

ElementSet make_set(const GroupSpec& g, const std::vector<FiniteElement>& elements);
ElementSet sumset(const GroupSpec& g, const ElementSet& a, const ElementSet& b);
ElementSet difference_set(const GroupSpec& g, const ElementSet& a, const ElementSet& b);
ElementSet restricted_sumset(const GroupSpec& g, const ElementSet& a, const ElementSet& b,
                             const std::vector<IndexPair>& edges);

// {"version": 1, "kind": "finite", "moduli": [...]} etc.
nlohmann::json group_to_json(const GroupSpec& g);
GroupSpec group_from_json(const nlohmann::json& j);

}  // namespace ruzsa
