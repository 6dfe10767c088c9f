#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "uwc/random.hpp"

using uwc::DiscreteSampler;
using uwc::Rng;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, DerivedSeedsDifferByTag) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(uwc::derive_seed(7, {t}));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(uwc::derive_seed(7, {1, 2}), uwc::derive_seed(7, {2, 1}));
  EXPECT_EQ(uwc::derive_seed(7, {1, 2}), uwc::derive_seed(7, {1, 2}));
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Rng, IndexCoversRange) {
  Rng r(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[r.index(7)];
  for (int h : hits) EXPECT_GT(h, 800);
  EXPECT_THROW(r.index(0), std::invalid_argument);
}

TEST(DiscreteSampler, NeverDrawsZeroWeight) {
  const std::vector<double> w{0.0, 1.0, 0.0, 3.0, 0.0};
  DiscreteSampler s(w);
  Rng r(9);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 8000; ++i) ++hits[s(r)];
  EXPECT_EQ(hits[0], 0);
  EXPECT_EQ(hits[2], 0);
  EXPECT_EQ(hits[4], 0);
  EXPECT_NEAR(hits[3] / 8000.0, 0.75, 0.03);
}

TEST(DiscreteSampler, TotalIsSum) {
  const std::vector<double> w{0.5, 1.5, 2.0};
  EXPECT_DOUBLE_EQ(DiscreteSampler(w).total(), 4.0);
}
