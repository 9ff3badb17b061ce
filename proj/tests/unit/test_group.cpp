#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "ruzsa/error.hpp"
#include "ruzsa/generators.hpp"
#include "ruzsa/group.hpp"

using namespace ruzsa;

namespace {

FiniteElement fin(const Element& e) { return std::get<FiniteElement>(e); }
double angle(const Element& e) { return std::get<RealElement>(e).at(0); }

}  // namespace

TEST(Group, ModularAddition) {
  const auto z4 = GroupSpec::cyclic(4);
  EXPECT_EQ(fin(add(z4, FiniteElement{3}, FiniteElement{2})), FiniteElement{1});
  const auto z2z3 = GroupSpec::finite({2, 3});
  EXPECT_EQ(fin(add(z2z3, FiniteElement{1, 2}, FiniteElement{1, 2})), (FiniteElement{0, 1}));
}

TEST(Group, CircleAdditionWraps) {
  const auto c = GroupSpec::circle();
  const double pi = std::numbers::pi;
  EXPECT_NEAR(angle(add(c, RealElement{1.5 * pi}, RealElement{pi})), 0.5 * pi, 1e-12);
  EXPECT_TRUE(elements_equal(c, RealElement{0.0}, RealElement{kTwoPi - 1e-13}));
}

TEST(Group, ScalarMultiples) {
  EXPECT_EQ(fin(scalar_mul(GroupSpec::cyclic(5), 3, FiniteElement{2})), FiniteElement{1});
  EXPECT_EQ(fin(scalar_mul(GroupSpec::cyclic(4), -1, FiniteElement{3})), FiniteElement{1});
  EXPECT_EQ(fin(scalar_mul(GroupSpec::cyclic(6), 0, FiniteElement{5})), FiniteElement{0});
}

TEST(Group, RejectsBadCarriers) {
  EXPECT_THROW(GroupSpec::cyclic(1), ValidationError);
  EXPECT_THROW(GroupSpec::real(0), ValidationError);
  EXPECT_THROW(add(GroupSpec::cyclic(4), FiniteElement{4}, FiniteElement{0}), DomainError);
  EXPECT_THROW(add(GroupSpec::cyclic(4), RealElement{0.5}, FiniteElement{0}), DomainError);
}

TEST(Group, FiniteAxiomsExhaustive) {
  for (const auto& g : {GroupSpec::cyclic(7), GroupSpec::finite({2, 4}), GroupSpec::finite({2, 2, 3})}) {
    const std::size_t n = g.order();
    ASSERT_LE(n, 64u);
    for (std::size_t a = 0; a < n; ++a) {
      EXPECT_EQ(g.add_index(a, 0), a);
      EXPECT_EQ(g.add_index(a, g.negate_index(a)), 0u);
      for (std::size_t b = 0; b < n; ++b) {
        EXPECT_EQ(g.add_index(a, b), g.add_index(b, a));
        for (std::size_t c = 0; c < n; ++c) {
          ASSERT_EQ(g.add_index(g.add_index(a, b), c), g.add_index(a, g.add_index(b, c)));
        }
      }
    }
  }
}

TEST(Group, IndexRoundTrip) {
  const auto g = GroupSpec::finite({3, 5});
  for (std::size_t i = 0; i < g.order(); ++i) EXPECT_EQ(g.index_of(g.element_at(i)), i);
  EXPECT_EQ(g.index_of({1, 2}), 1u * 5 + 2);
}

TEST(IntegerMatrix, Application) {
  const auto z5 = GroupSpec::cyclic(5);
  const IntegerMatrix a{{1, 0}, {1, -1}};
  const std::vector<Element> x = {FiniteElement{4}, FiniteElement{1}};
  const auto y = apply_integer_matrix(a, z5, x);
  EXPECT_EQ(fin(y[0]), FiniteElement{4});
  EXPECT_EQ(fin(y[1]), FiniteElement{3});  // y - z

  const auto z3 = GroupSpec::cyclic(3);
  const std::vector<Element> e = {FiniteElement{1}, FiniteElement{0}};
  const auto r = apply_integer_matrix(IntegerMatrix{{2, 1}, {1, 1}}, z3, e);
  EXPECT_EQ(fin(r[0]), FiniteElement{2});
  EXPECT_EQ(fin(r[1]), FiniteElement{1});

  const auto id = apply_integer_matrix(IntegerMatrix::identity(2), z3, e);
  EXPECT_EQ(fin(id[0]), FiniteElement{1});
  EXPECT_THROW(apply_integer_matrix(IntegerMatrix::identity(3), z3, e), DomainError);
}

TEST(IntegerMatrix, Unimodularity) {
  EXPECT_TRUE(is_unimodular(IntegerMatrix{{1, 0}, {1, -1}}));
  EXPECT_EQ((IntegerMatrix{{1, 0}, {1, -1}}).determinant(), -1);
  EXPECT_FALSE(is_unimodular(IntegerMatrix{{2, 0}, {0, 1}}));
  EXPECT_TRUE(is_unimodular(IntegerMatrix::identity(4)));
  EXPECT_EQ((IntegerMatrix{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}}).determinant(), 18);
  const IntegerMatrix a{{2, 1}, {1, 1}};
  EXPECT_EQ(a * a.inverse(), IntegerMatrix::identity(2));
}

TEST(IntegerMatrix, UnimodularIsBijection) {
  Rng rng(11);
  for (std::int64_t m : {2, 3, 4}) {
    const auto g = GroupSpec::cyclic(m);
    const auto g2 = g.power(2);
    for (int t = 0; t < 20; ++t) {
      const IntegerMatrix a = random_gl2z(rng);
      ASSERT_TRUE(is_unimodular(a));
      std::set<std::size_t> image;
      for (std::size_t x = 0; x < g2.order(); ++x) image.insert(apply_integer_matrix_index(a, g, g2, x));
      EXPECT_EQ(image.size(), g2.order());
    }
  }
}

TEST(Sumset, Enumeration) {
  const auto z4 = GroupSpec::cyclic(4);
  const ElementSet a = make_set(z4, {{0}, {1}});
  EXPECT_EQ(sumset(z4, a, a), (ElementSet{0, 1, 2}));
  EXPECT_EQ(difference_set(z4, a, a), (ElementSet{0, 1, 3}));
  std::vector<IndexPair> all;
  for (auto x : a)
    for (auto y : a) all.emplace_back(x, y);
  EXPECT_EQ(restricted_sumset(z4, a, a, all), sumset(z4, a, a));
  EXPECT_THROW(sumset(z4, {}, a), ValidationError);
}

TEST(Sumset, TriangleExample) {
  const auto z5 = GroupSpec::cyclic(5);
  const ElementSet a{0, 1}, b{0, 2}, c{0, 1};
  EXPECT_EQ(difference_set(z5, a, c).size() * b.size(), 6u);
  EXPECT_EQ(difference_set(z5, a, b).size() * difference_set(z5, b, c).size(), 16u);
}

TEST(Sumset, TriangleRandomSmallGroups) {
  Rng rng(5);
  for (int t = 0; t < 10000; ++t) {
    const auto g = GroupSpec::cyclic(2 + static_cast<std::int64_t>(rng() % 7));
    const auto a = random_set(g, rng), b = random_set(g, rng), c = random_set(g, rng);
    ASSERT_LE(difference_set(g, a, c).size() * b.size(),
              difference_set(g, a, b).size() * difference_set(g, b, c).size());
  }
}

TEST(Group, JsonRoundTrip) {
  for (const auto& g : {GroupSpec::finite({2, 6}), GroupSpec::real(3), GroupSpec::circle(),
                        GroupSpec::multiplicative_positive(), GroupSpec::multiplicative_complex()}) {
    EXPECT_EQ(group_from_json(group_to_json(g)), g);
  }
  EXPECT_THROW(group_from_json(nlohmann::json{{"kind", "torus"}}), ParseError);
}

TEST(Group, LogCoordinates) {
  EXPECT_NEAR(from_log_coordinates_positive(to_log_coordinates(3.5)), 3.5, 1e-14);
  const auto [re, im] = from_log_coordinates_complex(to_log_coordinates(-1.0, 2.0));
  EXPECT_NEAR(re, -1.0, 1e-14);
  EXPECT_NEAR(im, 2.0, 1e-14);
}
