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

#include <cmath>
#include <set>

#include "hsbm/hsbm.hpp"
#include "test_util.hpp"

using namespace hsbm;

namespace {

NonUniformHypergraph star(std::size_t n) {
  const int orders[] = {2};
  NonUniformHypergraph h(n, orders);
  for (Vertex v = 1; v < n; ++v) h.add_edge({0, v});
  h.canonicalize();
  return h;
}

}  // namespace

TEST(Trim, NothingRemovedWhenThresholdIsZero) {
  const auto h = testutil::cliques({6, 6});  // d̄ = 5, ⌊12 e^-5⌋ = 0
  const auto a = adjacency_matrix(h);
  const auto t = trim(a, h.degrees(), TrimRule::largest_degrees());
  EXPECT_EQ(t.matrix, a);
  EXPECT_EQ(t.kept_vertices().size(), 12u);
}

TEST(Trim, StarLosesItsHub) {
  const auto h = star(10);  // d̄ = 1.8, ⌊10 e^-1.8⌋ = 1
  const auto a = adjacency_matrix(h);
  const auto t = trim(a, h.degrees(), TrimRule::largest_degrees());
  EXPECT_FALSE(t.kept[0]);
  for (Vertex v = 1; v < 10; ++v) EXPECT_TRUE(t.kept[v]);
  EXPECT_EQ(t.matrix.nonzeros(), 0u);
}

TEST(Trim, TiesRemoveSmallerIdsFirst) {
  // path 0-1-2-3-...: interior degree 2, endpoints 1
  const int orders[] = {2};
  NonUniformHypergraph h(6, orders);
  for (Vertex v = 0; v + 1 < 6; ++v) h.add_edge({v, v + 1});
  h.canonicalize();
  const std::int64_t deg[] = {1, 2, 2, 2, 2, 1};
  // d̄ = 10/6, ⌊6 e^{-5/3}⌋ = 1: the first of the degree-2 vertices goes
  const auto t = trim(adjacency_matrix(h), deg, TrimRule::largest_degrees());
  EXPECT_FALSE(t.kept[1]);
  EXPECT_EQ(t.kept_vertices().size(), 5u);
}

TEST(Trim, ZeroedRowsAndColumnsAndIdempotence) {
  const auto z = sample_membership(200, CommunityPrior::uniform(2), 1);
  const auto q = scale_to_probabilities(testutil::symmetric_tensors(2, {{2, {0.6, 0.2}}}), 200);
  const auto h = sample_hypergraph(200, z, q, 2);
  const auto a = adjacency_matrix(h);
  const auto deg = h.degrees();
  const auto t = trim(a, deg, TrimRule::largest_degrees());
  ASSERT_LT(t.kept_vertices().size(), 200u);
  for (Vertex v = 0; v < 200; ++v) {
    if (t.kept[v]) continue;
    EXPECT_TRUE(t.matrix.row_columns(v).empty());
    for (Vertex u = 0; u < 200; ++u) EXPECT_EQ(t.matrix.at(u, v), 0);
  }
  EXPECT_EQ(t.matrix.restricted(t.kept), t.matrix);
}

TEST(Trim, DegreeCap) {
  const auto h = star(10);
  const auto a = adjacency_matrix(h);
  EXPECT_THROW(trim(a, h.degrees(), TrimRule{TrimVariant::kDegreeCap, std::nullopt, 2}),
               std::invalid_argument);
  const auto t = trim(a, h.degrees(), TrimRule::degree_cap(2.0, 2));  // keep d_v <= 4
  EXPECT_FALSE(t.kept[0]);
  EXPECT_TRUE(t.kept[5]);
  TensorSet p(1);
  p.set_layer(2, {3.0});
  const auto rule = TrimRule::degree_cap(p, 100, 0.5);
  EXPECT_NEAR(*rule.d_max, 3.0 * std::log(100.0) * 0.5, 1e-12);
  EXPECT_EQ(rule.max_order, 2);
}

TEST(DefaultRadius, Examples) {
  EXPECT_NEAR(default_radius(std::exp(1.0), 100), std::exp(2.0) / 100.0, 1e-15);
  EXPECT_NEAR(default_radius(10.0, 1000), 100.0 / (1000.0 * std::log(10.0)), 1e-15);
  EXPECT_NEAR(default_radius(10.0, 1000), 0.0434, 1e-4);
  EXPECT_THROW(default_radius(1.0, 100), DegenerateDegreeError);
  EXPECT_THROW(default_radius(0.3, 100), DegenerateDegreeError);
}

TEST(SpectralInit, TwoCliquesSeparate) {
  MembershipVector truth;
  const auto h = testutil::cliques({4, 4}, &truth);
  const auto a = adjacency_matrix(h);
  const std::vector<bool> all(8, true);
  const double r = default_radius(mean_degree(h.degrees()), 8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto init = spectral_init(a, all, 2, r, seed);
    EXPECT_EQ(mismatch_ratio(truth, init.labels).eta, 0.0);
  }
}

TEST(SpectralInit, SingleCommunity) {
  const auto h = testutil::cliques({5, 3});
  const std::vector<bool> all(8, true);
  const auto init = spectral_init(adjacency_matrix(h), all, 1, 1.0, 3);
  for (int l : init.labels.labels()) EXPECT_EQ(l, 0);
}

TEST(SpectralInit, Errors) {
  const auto h = testutil::cliques({4, 4});
  const auto a = adjacency_matrix(h);
  std::vector<bool> one(8, false);
  one[0] = true;
  EXPECT_THROW(spectral_init(a, one, 2, 1.0, 1), InsufficientSampleError);
  const std::vector<bool> all(8, true);
  EXPECT_THROW(spectral_init(a, all, 2, 0.0, 1), std::invalid_argument);
}

TEST(SpectralInit, LabelsValidDeterministicAndOutsideVerticesRandom) {
  const std::size_t n = 300;
  const auto z = sample_membership(n, CommunityPrior::uniform(3), 8);
  const auto q = scale_to_probabilities(testutil::symmetric_tensors(3, {{2, {20.0, 2.0}}}), n);
  const auto h = sample_hypergraph(n, z, q, 9);
  const auto a = adjacency_matrix(h);
  std::vector<bool> kept(n, true);
  for (std::size_t v = 0; v < n; v += 10) kept[v] = false;
  const auto trimmed = a.restricted(kept);
  const double r = default_radius(mean_degree(h.degrees()), n);
  const auto x = spectral_init(trimmed, kept, 3, r, 5);
  const auto y = spectral_init(trimmed, kept, 3, r, 5);
  EXPECT_EQ(x.labels, y.labels);
  EXPECT_EQ(x.centers.size(), 3u);
  EXPECT_EQ(x.sample_size, center_sample_size(n));
  for (int l : x.labels.labels()) {
    EXPECT_GE(l, 0);
    EXPECT_LT(l, 3);
  }
  // vertices outside J follow the seed
  bool differs = false;
  for (std::uint64_t seed = 6; seed < 12 && !differs; ++seed) {
    const auto w = spectral_init(trimmed, kept, 3, r, seed);
    for (std::size_t v = 0; v < n; v += 10) differs |= w.labels[v] != x.labels[v];
  }
  EXPECT_TRUE(differs);
}

TEST(SpectralInit, PlantedGraphIsAlmostExact) {
  const std::size_t n = 500;
  const auto p = testutil::symmetric_tensors(2, {{2, {40.0, 5.0}}});
  const auto q = scale_to_probabilities(p, n);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto z = sample_membership(n, CommunityPrior::uniform(2), 100 + seed);
    const auto h = sample_hypergraph(n, z, q, 200 + seed);
    const auto deg = h.degrees();
    const auto t = trim(adjacency_matrix(h), deg, TrimRule::largest_degrees());
    const auto init = spectral_init(t.matrix, t.kept, 2, default_radius(mean_degree(deg), n), seed);
    good += mismatch_ratio(z, init.labels).eta <= 0.05 ? 1 : 0;
  }
  EXPECT_GE(good, 18);
}

TEST(Concentration, SpectralDeviationIsBounded) {
  const std::size_t n = 300;
  const auto p = testutil::symmetric_tensors(2, {{2, {6.0, 1.0}}, {3, {4.0, 1.0}}});
  const auto q = scale_to_probabilities(p, n);
  const double d_max = (6.0 + 4.0) * std::log(static_cast<double>(n));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto z = sample_membership(n, CommunityPrior::uniform(2), seed);
    const auto h = sample_hypergraph(n, z, q, seed + 50);
    const Eigen::MatrixXd dev = adjacency_matrix(h).to_dense() - expected_adjacency(z, q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dev, Eigen::EigenvaluesOnly);
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_LE(norm / std::sqrt(d_max), 30.0);
  }
}
