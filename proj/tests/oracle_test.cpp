#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"

using namespace sheafss;

namespace {

std::vector<std::size_t> trimmed(std::vector<std::size_t> v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
  return v;
}

// Two further points above the circle model: a sphere.
PosetPtr sphere() {
  return Poset::from_covers({"a", "b", "c", "d", "n", "s"},
                            {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"},
                             {"c", "n"}, {"d", "n"}, {"c", "s"}, {"d", "s"}});
}

}  // namespace

TEST(Oracle, RankAndNullspace) {
  oracle::QMat m(2, 3);
  m(0, 0) = 1; m(0, 1) = 2; m(0, 2) = 3;
  m(1, 0) = 2; m(1, 1) = 4; m(1, 2) = 6;
  EXPECT_EQ(oracle::rank(m), 1u);
  const oracle::QMat n = oracle::nullspace(m);
  EXPECT_EQ(n.cols, 2u);
  EXPECT_TRUE((m * n).is_zero());
  EXPECT_EQ(oracle::rank(oracle::QMat::identity(4)), 4u);
}

TEST(Oracle, BettiNumbersOfModels) {
  EXPECT_EQ(trimmed(oracle::betti(Poset::point())), (std::vector<std::size_t>{1}));
  EXPECT_EQ(trimmed(oracle::betti(Poset::chain(4))), (std::vector<std::size_t>{1}));
  EXPECT_EQ(trimmed(oracle::betti(fixtures::x4())), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(trimmed(oracle::betti(sphere())), (std::vector<std::size_t>{1, 0, 1}));
  const auto x = fixtures::x4();
  EXPECT_EQ(trimmed(oracle::betti(product(*x, *x))), (std::vector<std::size_t>{1, 2, 1}));
}

TEST(Oracle, TwistedCircleHasNoCohomology) {
  const auto x = fixtures::x4();
  oracle::Functor f = oracle::constant(x);
  f.rho = [x](std::size_t a, std::size_t b) {
    oracle::QMat m(1, 1);
    m(0, 0) = (a == x->index("b") && b == x->index("d")) ? -1 : 1;
    return m;
  };
  EXPECT_TRUE(trimmed(oracle::cohomology(f)).empty());
}

TEST(Oracle, LerayOfTorusProjection) {
  const auto x = fixtures::x4();
  const auto t = product(*x, *x);
  const auto e2 = oracle::leray_e2(oracle::constant(t), MonotoneMap::projection(t, x, x, 0));
  const std::map<std::pair<int, int>, std::size_t> expected{{{0, 0}, 1}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 1}};
  EXPECT_EQ(e2, expected);
}

TEST(Oracle, PushforwardAlongIdentityIsTheFunctor) {
  const auto p = fixtures::fork();
  const auto r = oracle::derived_pushforward(oracle::constant(p, 2), MonotoneMap::identity(p));
  ASSERT_FALSE(r.empty());
  EXPECT_EQ(r[0].dims, (std::vector<std::size_t>(4, 2)));
  for (std::size_t q = 1; q < r.size(); ++q) EXPECT_EQ(r[q].dims, (std::vector<std::size_t>(4, 0)));
}

TEST(Oracle, StaircaseTotalComplexIsAcyclic) {
  for (const auto& [n, d] : oracle::total_cohomology(fixtures::staircase())) EXPECT_EQ(d, 0u) << n;
}
