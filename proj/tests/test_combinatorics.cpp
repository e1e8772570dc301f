/*
 * Copyright 2026 The hsbm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "hsbm/combinatorics.hpp"
#include "hsbm/errors.hpp"

using namespace hsbm;

namespace {

// All K-tuples with entries in [0, m] summing to m, by exhaustive counting.
std::set<std::vector<int>> brute_compositions(int m, int K) {
  std::set<std::vector<int>> out;
  std::vector<int> t(static_cast<std::size_t>(K), 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == K) {
      int s = 0;
      for (int x : t) s += x;
      if (s == m) out.insert(t);
      return;
    }
    for (int v = 0; v <= m; ++v) {
      t[static_cast<std::size_t>(i)] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

std::uint64_t pascal(int n, int k) {
  std::vector<std::vector<std::uint64_t>> c(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    c[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(i) + 1, 1);
    for (int j = 1; j < i; ++j) {
      c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          c[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j) - 1] + c[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j)];
    }
  }
  return k > n ? 0 : c[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

}  // namespace

TEST(Binomial, MatchesPascalTriangle) {
  for (int n = 0; n <= 60; ++n) {
    for (int k = 0; k <= n + 2; ++k) {
      EXPECT_EQ(binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)), pascal(n, k)) << n << " " << k;
    }
  }
}

TEST(Binomial, OverflowIsReported) {
  EXPECT_THROW(binomial(200, 100), OverflowError);
  EXPECT_EQ(binomial(67, 33), 14226520737620288370ULL);
}

TEST(Binomial, RealVersionAgrees) {
  for (int n = 0; n <= 40; ++n) {
    for (int k = 0; k <= n; ++k) {
      EXPECT_NEAR(binomial_real(n, k), static_cast<double>(pascal(n, k)), 1e-9 * static_cast<double>(pascal(n, k)));
    }
  }
  EXPECT_EQ(binomial_real(3.0, 5), 0.0);
}

TEST(WeakCompositions, SmallCases) {
  const auto two = enumerate_weak_compositions(2, 2);
  ASSERT_EQ(two.size(), 3u);
  EXPECT_EQ(two[0], (WeakComposition{2, 0}));
  EXPECT_EQ(two[1], (WeakComposition{1, 1}));
  EXPECT_EQ(two[2], (WeakComposition{0, 2}));

  const auto one = enumerate_weak_compositions(1, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (WeakComposition{1}));

  EXPECT_EQ(enumerate_weak_compositions(3, 3).size(), 10u);
  EXPECT_EQ(enumerate_weak_compositions(0, 4).size(), 1u);
}

TEST(WeakCompositions, MatchBruteForceAndCountFormula) {
  for (int m = 0; m <= 6; ++m) {
    for (int K = 1; K <= 5; ++K) {
      const auto listed = enumerate_weak_compositions(m, K);
      std::set<std::vector<int>> got;
      for (const auto& w : listed) {
        EXPECT_EQ(w.order(), m);
        EXPECT_EQ(w.parts(), K);
        got.insert(std::vector<int>(w.counts().begin(), w.counts().end()));
      }
      EXPECT_EQ(got.size(), listed.size()) << "duplicates for m=" << m << " K=" << K;
      EXPECT_EQ(got, brute_compositions(m, K));
      EXPECT_EQ(listed.size(), pascal(m + K - 1, K - 1));
      EXPECT_EQ(weak_composition_count(m, K), pascal(m + K - 1, K - 1));
    }
  }
}

TEST(WeakCompositions, LexicographicallyDescendingAndIndexed) {
  for (int m = 0; m <= 5; ++m) {
    for (int K = 1; K <= 4; ++K) {
      const auto listed = enumerate_weak_compositions(m, K);
      for (std::size_t i = 0; i < listed.size(); ++i) {
        EXPECT_EQ(composition_index(listed[i]), i);
        if (i > 0) {
          EXPECT_TRUE(std::lexicographical_compare(listed[i].counts().begin(), listed[i].counts().end(),
                                                   listed[i - 1].counts().begin(), listed[i - 1].counts().end()));
        }
      }
    }
  }
}

TEST(WeakCompositions, InvalidArguments) {
  EXPECT_THROW(enumerate_weak_compositions(2, 0), std::invalid_argument);
  EXPECT_THROW(enumerate_weak_compositions(-1, 2), std::invalid_argument);
  EXPECT_THROW(WeakComposition({1, -1}), std::invalid_argument);
}

TEST(Oplus, IncrementsOneComponent) {
  EXPECT_EQ(oplus(0, WeakComposition{0, 0}), (WeakComposition{1, 0}));
  EXPECT_EQ(oplus(1, WeakComposition{1, 1}), (WeakComposition{1, 2}));
  EXPECT_EQ(oplus(1, WeakComposition{1, 1}).order(), 3);
  EXPECT_THROW(oplus(2, WeakComposition{1, 1}), std::invalid_argument);
  EXPECT_THROW(oplus(-1, WeakComposition{1, 1}), std::invalid_argument);
}

TEST(Oplus, Commutes) {
  for (const auto& w : enumerate_weak_compositions(2, 3)) {
    for (int j = 0; j < 3; ++j) {
      for (int l = 0; l < 3; ++l) EXPECT_EQ(oplus(j, oplus(l, w)), oplus(l, oplus(j, w)));
    }
  }
}

TEST(Capacity, Examples) {
  const std::size_t s1[] = {3, 2};
  EXPECT_EQ(capacity(WeakComposition{1, 1}, s1), 6u);
  const std::size_t s2[] = {1, 5};
  EXPECT_EQ(capacity(WeakComposition{2, 0}, s2), 0u);
  const std::size_t s3[] = {7, 0, 4};
  EXPECT_EQ(capacity(WeakComposition{0, 0, 0}, s3), 1u);
  const double r1[] = {3.0, 2.0};
  EXPECT_DOUBLE_EQ(capacity_real(WeakComposition{1, 1}.counts(), r1), 6.0);
  const std::size_t wrong[] = {3};
  EXPECT_THROW(capacity(WeakComposition{1, 1}, wrong), std::invalid_argument);
}

TEST(Capacity, SumsToAllSubsets) {
  // Σ_w Π C(s_l, w_l) = C(Σ s_l, m) (Vandermonde).
  const std::size_t sizes[] = {4, 3, 5};
  for (int m = 0; m <= 6; ++m) {
    std::uint64_t total = 0;
    for (const auto& w : enumerate_weak_compositions(m, 3)) total += capacity(w, sizes);
    EXPECT_EQ(total, pascal(12, m));
  }
}
