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
#include <random>

#include "hsbm/hsbm.hpp"
#include "test_util.hpp"

using namespace hsbm;

namespace {

MembershipVector corrupt(const MembershipVector& z, double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u;
  std::uniform_int_distribution<int> pick(0, z.communities() - 1);
  std::vector<int> labels(z.labels().begin(), z.labels().end());
  for (int& l : labels) {
    if (u(rng) < fraction) l = pick(rng);
  }
  return MembershipVector(labels, z.communities());
}

}  // namespace

TEST(EstimateTensors, CompleteAndEmptyClasses) {
  MembershipVector truth;
  const auto h = testutil::cliques({5, 4}, &truth);
  const auto est = estimate_tensors(h, truth, 2);
  EXPECT_DOUBLE_EQ(est.estimate(WeakComposition{2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(est.estimate(WeakComposition{0, 2}), 1.0);
  EXPECT_DOUBLE_EQ(est.estimate(WeakComposition{1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(est.capacity(WeakComposition{1, 1}), 20.0);
  // clamped into [1/(2N), 1 - 1/(2N)]
  EXPECT_DOUBLE_EQ(est.clamped(WeakComposition{1, 1}), 1.0 / 40.0);
  EXPECT_DOUBLE_EQ(est.clamped(WeakComposition{2, 0}), 1.0 - 1.0 / 20.0);
}

TEST(EstimateTensors, UndefinedWhenCapacityIsZero) {
  const int orders[] = {3};
  NonUniformHypergraph h(4, orders);
  h.add_edge({0, 1, 2});
  h.canonicalize();
  const MembershipVector z({0, 0, 0, 1}, 2);
  const auto est = estimate_tensors(h, z, 2);
  EXPECT_FALSE(est.defined(WeakComposition{0, 3}));
  EXPECT_TRUE(std::isnan(est.estimate(WeakComposition{0, 3})));
  EXPECT_DOUBLE_EQ(est.estimate(WeakComposition{3, 0}), 1.0);
  EXPECT_DOUBLE_EQ(est.estimate(WeakComposition{2, 1}), 0.0);
}

TEST(EstimateTensors, ConsistentWithTrueLabels) {
  const std::size_t n = 400;
  const auto p = testutil::symmetric_tensors(2, {{2, {30.0, 6.0}}});
  const auto q = scale_to_probabilities(p, n);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto z = sample_membership(n, CommunityPrior::uniform(2), seed);
    const auto h = sample_hypergraph(n, z, q, seed + 1000);
    const auto est = estimate_tensors(h, z, 2);
    double worst = 0.0;
    for (const auto& w : enumerate_weak_compositions(2, 2)) {
      worst = std::max(worst, std::abs(est.estimate(w) - q.at(w)) / q.at(w));
    }
    good += worst <= 0.1 ? 1 : 0;
  }
  EXPECT_GE(good, 18);
}

TEST(EstimateTensors, StandardizedErrorsLookStandard) {
  const std::size_t n = 30;
  const MembershipVector z = sample_membership(n, CommunityPrior::uniform(2), 1, BlockSizeMode::kFixed);
  TensorSet t(2);
  t.set_layer(2, {0.3, 0.1, 0.25});
  t.set_layer(3, {0.05, 0.02, 0.03, 0.04});
  const ProbabilityTensorSet q(t);
  const auto sizes = z.block_sizes();
  for (int m : {2, 3}) {
    for (const auto& w : enumerate_weak_compositions(m, 2)) {
      const double cap = static_cast<double>(capacity(w, sizes));
      const double sd = std::sqrt(q.at(w) * (1 - q.at(w)) / cap);
      double sum = 0.0, sum_sq = 0.0;
      const int seeds = 1000;
      for (int s = 0; s < seeds; ++s) {
        const auto h = sample_hypergraph(n, z, q, static_cast<std::uint64_t>(s) + 17);
        const double e = (estimate_tensors(h, z, 2).estimate(w) - q.at(w)) / sd;
        sum += e;
        sum_sq += e * e;
      }
      const double mean = sum / seeds;
      const double var = sum_sq / seeds - mean * mean;
      EXPECT_LE(std::abs(mean), 0.1) << w;
      EXPECT_GE(var, 0.7) << w;
      EXPECT_LE(var, 1.3) << w;
    }
  }
}

TEST(EdgeTypeCounts, Examples) {
  const int orders[] = {3};
  NonUniformHypergraph h(4, orders);
  h.add_edge({0, 1, 2});
  h.canonicalize();
  const MembershipVector z({0, 1, 1, 0}, 2);
  const auto c = edge_type_counts(h, z, 0);
  EXPECT_EQ(c.at(WeakComposition{0, 2}), 1);
  EXPECT_EQ(c.total(), 1);
  EXPECT_EQ(edge_type_counts(h, z, 3).total(), 0);
  EXPECT_THROW(edge_type_counts(h, z, 4), std::invalid_argument);
}

TEST(EdgeTypeCounts, AgreeWithDegreeProfileAndTable) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = testutil::bernoulli_hypergraph(9, {2, 3, 4}, 0.25, seed);
    const auto z = sample_membership(9, CommunityPrior::uniform(3), seed);
    const auto table = details::edge_type_table(h, z.labels(), 3);
    const auto deg = h.degrees();
    for (Vertex v = 0; v < 9; ++v) {
      const auto c = edge_type_counts(h, z, v);
      const auto p = degree_profile(h, v, z);
      EXPECT_EQ(c.counts, p.counts);
      EXPECT_EQ(c.total(), deg[v]);
      std::vector<std::int64_t> flat;
      for (const auto& [m, x] : c.counts) flat.insert(flat.end(), x.begin(), x.end());
      const auto row = table.row(v);
      EXPECT_EQ(std::vector<std::int64_t>(row.begin(), row.end()), flat);
    }
  }
}

TEST(RefineStep, CliquesAreAFixedPoint) {
  MembershipVector truth;
  const auto h = testutil::cliques({6, 6}, &truth);
  const auto est = estimate_tensors(h, truth, 2);
  const auto step = refine_step(h, truth, est, 1);
  EXPECT_EQ(step.labels, truth);
  EXPECT_EQ(step.changed, 0u);
}

TEST(RefineStep, MisplacedVertexCorrected) {
  MembershipVector truth;
  const auto h = testutil::cliques({6, 6}, &truth);
  const auto est = estimate_tensors(h, truth, 2);
  std::vector<int> labels(truth.labels().begin(), truth.labels().end());
  labels[2] = 1;
  const auto step = refine_step(h, MembershipVector(labels, 2), est, 1);
  EXPECT_EQ(step.labels, truth);
  EXPECT_EQ(step.changed, 1u);
}

TEST(RefineStep, SingleCommunityIsIdentity) {
  const auto h = testutil::cliques({3, 3});
  const MembershipVector z(std::vector<int>(6, 0), 1);
  const auto step = refine_step(h, z, estimate_tensors(h, z, 1), 1);
  EXPECT_EQ(step.labels, z);
}

TEST(RefineStep, PermutationEquivariant) {
  const std::size_t n = 240;
  const auto q = scale_to_probabilities(testutil::symmetric_tensors(3, {{2, {10.0, 2.0}}, {3, {6.0, 1.0}}}), n);
  const auto z = sample_membership(n, CommunityPrior({0.5, 0.3, 0.2}), 4);
  const auto h = sample_hypergraph(n, z, q, 5);
  const auto noisy = corrupt(z, 0.2, 6);
  const int perm[] = {2, 0, 1};
  std::vector<int> permuted;
  for (int l : noisy.labels()) permuted.push_back(perm[l]);
  const MembershipVector noisy_p(permuted, 3);
  const auto a = refine_step(h, noisy, estimate_tensors(h, noisy, 3), 9);
  const auto b = refine_step(h, noisy_p, estimate_tensors(h, noisy_p, 3), 9);
  for (std::size_t v = 0; v < n; ++v) EXPECT_EQ(perm[a.labels[v]], b.labels[v]);
}

TEST(AgnosticRefine, FixedPointStopsAfterOneSweep) {
  MembershipVector truth;
  const auto h = testutil::cliques({7, 5}, &truth);
  const auto r = agnostic_refine(h, truth, 2, 3);
  EXPECT_EQ(r.labels, truth);
  EXPECT_EQ(r.iterations, 1);
}

TEST(AgnosticRefine, IterationBoundAndExactRecovery) {
  const std::size_t n = 500;
  const auto p = testutil::symmetric_tensors(2, {{2, {15.0, 2.0}}});
  EXPECT_GT(gch_global(CommunityPrior::uniform(2), p, n).global, 2.8);
  const auto q = scale_to_probabilities(p, n);
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto z = sample_membership(n, CommunityPrior::uniform(2), seed);
    const auto h = sample_hypergraph(n, z, q, seed + 77);
    const auto r = agnostic_refine(h, corrupt(z, 0.2, seed + 5), 2, seed);
    EXPECT_LE(r.iterations, refine_iteration_limit(n));
    exact += mismatch_ratio(z, r.labels).eta == 0.0 ? 1 : 0;
  }
  EXPECT_GE(exact, 18);
}

TEST(Split, ExtremesAndPartition) {
  const auto z = sample_membership(100, CommunityPrior::uniform(2), 1);
  const auto q = scale_to_probabilities(testutil::symmetric_tensors(2, {{2, {8.0, 2.0}}, {3, {4.0, 1.0}}}), 100);
  const auto h = sample_hypergraph(100, z, q, 2);
  const auto all = split(h, std::log(100.0), 3);
  EXPECT_EQ(all.initial, h);
  EXPECT_EQ(all.correction.total_edge_count(), 0u);
  const auto none = split(h, 0.0, 3);
  EXPECT_EQ(none.initial.total_edge_count(), 0u);
  EXPECT_EQ(none.correction, h);
  EXPECT_THROW(split(h, 2.0 * std::log(100.0), 3), std::invalid_argument);
  EXPECT_THROW(split(h, -0.1, 3), std::invalid_argument);

  const auto s = split(h, 1.5, 4);
  for (int m : h.orders()) {
    EXPECT_EQ(s.initial.edge_count(m) + s.correction.edge_count(m), h.edge_count(m));
    std::set<std::vector<Vertex>> a, b, c;
    for (std::size_t i = 0; i < h.edge_count(m); ++i) a.insert(std::vector<Vertex>(h.edge(m, i).begin(), h.edge(m, i).end()));
    for (std::size_t i = 0; i < s.initial.edge_count(m); ++i) b.insert(std::vector<Vertex>(s.initial.edge(m, i).begin(), s.initial.edge(m, i).end()));
    for (std::size_t i = 0; i < s.correction.edge_count(m); ++i) c.insert(std::vector<Vertex>(s.correction.edge(m, i).begin(), s.correction.edge(m, i).end()));
    std::set<std::vector<Vertex>> both;
    both.insert(b.begin(), b.end());
    both.insert(c.begin(), c.end());
    EXPECT_EQ(both, a);
    EXPECT_EQ(b.size() + c.size(), a.size());
  }
}

TEST(Split, RetainedFractionMatchesBinomial) {
  const auto z = sample_membership(100, CommunityPrior::uniform(2), 1);
  const auto q = scale_to_probabilities(testutil::symmetric_tensors(2, {{2, {8.0, 2.0}}}), 100);
  const auto h = sample_hypergraph(100, z, q, 2);
  const double theta = split_theta(100);
  const double ratio = theta / std::log(100.0);
  const auto total = static_cast<double>(h.total_edge_count());
  double sum = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) sum += static_cast<double>(split(h, theta, static_cast<std::uint64_t>(s)).initial.total_edge_count());
  const double sigma = std::sqrt(total * ratio * (1 - ratio) / seeds);
  EXPECT_NEAR(sum / seeds, total * ratio, 3 * sigma);
}

TEST(MapCorrect, PriorDecidesWhenLikelihoodsTie) {
  const int orders[] = {2};
  NonUniformHypergraph h(6, orders);
  h.add_edge({0, 1});
  h.add_edge({3, 4});
  h.canonicalize();
  const MembershipVector z0({0, 0, 0, 1, 1, 1}, 2);
  TensorSet t(2);
  t.set_symmetric_layer(2, 0.4, 0.1);
  const ProbabilityTensorSet q(t);
  // vertex 2 and 5 are isolated; block sizes are equal so only α matters
  EXPECT_EQ(map_correct_vertex(h, z0, q, CommunityPrior({0.9, 0.1}), 5), 0);
  EXPECT_EQ(map_correct_vertex(h, z0, q, CommunityPrior({0.1, 0.9}), 2), 1);
  EXPECT_EQ(map_correct_vertex(h, z0, q, CommunityPrior({0.5, 0.5}), 5), 0);  // smallest k
}

TEST(MapCorrect, AssortativeNeighborhoodWins) {
  const int orders[] = {2};
  NonUniformHypergraph h(8, orders);
  for (Vertex u : {1u, 2u, 3u}) h.add_edge({0, u});
  h.canonicalize();
  const MembershipVector z0({1, 0, 0, 0, 1, 1, 1, 0}, 2);
  TensorSet t(2);
  t.set_symmetric_layer(2, 0.6, 0.05);
  const auto out = map_correct(h, z0, ProbabilityTensorSet(t), CommunityPrior::uniform(2));
  EXPECT_EQ(out[0], 0);
}

TEST(MapCorrect, RejectsDegenerateProbabilities) {
  const auto h = testutil::cliques({3, 3});
  const MembershipVector z0({0, 0, 0, 1, 1, 1}, 2);
  TensorSet t(2);
  t.set_symmetric_layer(2, 1.0, 0.0);
  EXPECT_THROW(map_correct(h, z0, ProbabilityTensorSet(t), CommunityPrior::uniform(2)), std::invalid_argument);
}

TEST(MapCorrect, PriorMonotoneAndVertexwiseAgreement) {
  const std::size_t n = 200;
  const auto q = scale_to_probabilities(testutil::symmetric_tensors(2, {{2, {4.0, 2.0}}, {3, {3.0, 1.0}}}), n);
  const auto z = sample_membership(n, CommunityPrior::uniform(2), 3);
  const auto h = sample_hypergraph(n, z, q, 4);
  const auto z0 = corrupt(z, 0.3, 5);
  const auto even = map_correct(h, z0, q, CommunityPrior::uniform(2));
  const auto tilted = map_correct(h, z0, q, CommunityPrior({0.8, 0.2}));
  for (std::size_t v = 0; v < n; ++v) {
    if (even[v] == 0) EXPECT_EQ(tilted[v], 0);
  }
  for (Vertex v = 0; v < n; v += 17) {
    EXPECT_EQ(map_correct_vertex(h, z0, q, CommunityPrior::uniform(2), v), even[v]);
  }
}

TEST(MapCorrect, PlantedModelRecoveredFromNoisyStart) {
  const std::size_t n = 500;
  const auto p = testutil::symmetric_tensors(2, {{2, {15.0, 2.0}}});
  const auto q = scale_to_probabilities(p, n);
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto z = sample_membership(n, CommunityPrior::uniform(2), seed);
    const auto h = sample_hypergraph(n, z, q, seed + 31);
    const auto out = map_correct(h, corrupt(z, 0.1, seed), q, CommunityPrior::uniform(2));
    exact += mismatch_ratio(z, out).eta == 0.0 ? 1 : 0;
  }
  EXPECT_GE(exact, 18);
}
