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

#pragma once

/*
 * First stage: degree trimming and ball-peeling spectral initialization.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hsbm/adjacency.hpp"
#include "hsbm/eigensolver.hpp"
#include "hsbm/errors.hpp"
#include "hsbm/model.hpp"
#include "hsbm/random.hpp"

namespace hsbm {

enum class TrimVariant {
  kNone,
  kLargestDegrees,  // drop the ⌊n exp(-d̄)⌋ highest-degree vertices (J1)
  kDegreeCap,       // keep d_v <= M_max * d_max (J2); needs the tensors
};

struct TrimRule {
  TrimVariant variant = TrimVariant::kLargestDegrees;
  std::optional<double> d_max;
  int max_order = 2;

  static TrimRule none() { return {TrimVariant::kNone, std::nullopt, 2}; }
  static TrimRule largest_degrees() { return {TrimVariant::kLargestDegrees, std::nullopt, 2}; }
  static TrimRule degree_cap(double d_max, int max_order) {
    return {TrimVariant::kDegreeCap, d_max, max_order};
  }
  // d_max = retention · Σ_m max_w P^(m)_w · log n, for a hypergraph whose edges
  // were kept independently with probability `retention`.
  static TrimRule degree_cap(const TensorSet& unscaled, std::size_t n, double retention = 1.0) {
    double d_max = 0.0;
    for (int m : unscaled.orders()) d_max += unscaled.layer_max(m);
    d_max *= std::log(static_cast<double>(n)) * retention;
    return degree_cap(d_max, unscaled.max_order());
  }
};

struct TrimResult {
  AdjacencyMatrix matrix;  // A_J
  std::vector<bool> kept;  // membership in J

  std::vector<Vertex> kept_vertices() const {
    std::vector<Vertex> out;
    for (std::size_t v = 0; v < kept.size(); ++v) {
      if (kept[v]) out.push_back(static_cast<Vertex>(v));
    }
    return out;
  }
};

// Zeroes the rows and columns of vertices outside J. `degrees` are the vertex
// degrees the rule is evaluated on.
inline TrimResult trim(const AdjacencyMatrix& a, std::span<const std::int64_t> degrees,
                       const TrimRule& rule) {
  const std::size_t n = a.size();
  if (degrees.size() != n) throw std::invalid_argument("trim: degree vector length != n");
  std::vector<bool> kept(n, true);
  switch (rule.variant) {
    case TrimVariant::kNone:
      return {a, kept};
    case TrimVariant::kLargestDegrees: {
      if (n == 0) return {a, kept};
      const double mean =
          static_cast<double>(std::accumulate(degrees.begin(), degrees.end(), std::int64_t{0})) /
          static_cast<double>(n);
      const auto remove = static_cast<std::size_t>(std::floor(static_cast<double>(n) * std::exp(-mean)));
      if (remove == 0) return {a, kept};
      std::vector<Vertex> order(n);
      std::iota(order.begin(), order.end(), Vertex{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Vertex x, Vertex y) { return degrees[x] > degrees[y]; });
      for (std::size_t i = 0; i < std::min(remove, n); ++i) kept[order[i]] = false;
      break;
    }
    case TrimVariant::kDegreeCap: {
      if (!rule.d_max) {
        throw std::invalid_argument("trim: degree-cap rule needs d_max from the tensors");
      }
      const double cap = static_cast<double>(rule.max_order) * *rule.d_max;
      for (std::size_t v = 0; v < n; ++v) kept[v] = static_cast<double>(degrees[v]) <= cap;
      break;
    }
  }
  return {a.restricted(kept), std::move(kept)};
}

inline TrimResult trim(const AdjacencyMatrix& a, const TrimRule& rule) {
  const auto degrees = a.row_sums();
  return trim(a, degrees, rule);
}

// Ball radius d̄² / (n log d̄).
inline double default_radius(double mean_degree, std::size_t n) {
  if (!(mean_degree > 1.0)) {
    throw DegenerateDegreeError("mean degree must exceed 1 to derive the ball radius");
  }
  return mean_degree * mean_degree / (static_cast<double>(n) * std::log(mean_degree));
}

inline double mean_degree(std::span<const std::int64_t> degrees) {
  if (degrees.empty()) return 0.0;
  return static_cast<double>(std::accumulate(degrees.begin(), degrees.end(), std::int64_t{0})) /
         static_cast<double>(degrees.size());
}

struct SpectralInit {
  MembershipVector labels;
  std::vector<Vertex> centers;  // s_1..s_K
  std::size_t sample_size = 0;  // |S|
};

inline std::size_t center_sample_size(std::size_t n) {
  const double l = std::log(static_cast<double>(n));
  return static_cast<std::size_t>(std::ceil(2.0 * l * l));
}

// Ball-peeling initialization on the rank-K approximation of A_J:
//   1. sample ⌈2 log² n⌉ candidate centers from J without replacement;
//   2. K rounds, each taking the candidate whose radius-r ball holds the
//      most still-unassigned J vertices (ties: smallest vertex id);
//   3. remaining J vertices go to the nearest chosen center (ties: smallest k);
//   4. vertices outside J get a uniformly random label.
inline SpectralInit spectral_init(const AdjacencyMatrix& a_j, const std::vector<bool>& kept, int k,
                                  double radius, std::uint64_t seed,
                                  const EigenOptions& eigen = {}) {
  const std::size_t n = a_j.size();
  if (k < 1) throw std::invalid_argument("spectral_init: K must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("spectral_init: radius must be > 0");
  std::vector<Vertex> members;
  for (std::size_t v = 0; v < n; ++v) {
    if (kept[v]) members.push_back(static_cast<Vertex>(v));
  }
  if (members.size() < static_cast<std::size_t>(k)) {
    throw InsufficientSampleError("spectral_init: fewer kept vertices than communities");
  }

  SpectralInit out;
  std::vector<int> labels(n, -1);
  if (k == 1) {
    std::fill(labels.begin(), labels.end(), 0);
    out.labels = MembershipVector(std::move(labels), 1);
    out.centers = {members.front()};
    out.sample_size = 1;
    return out;
  }

  const LowRankApprox approx = rank_k_approx(a_j, k, eigen);

  Engine sampler(derive_seed(seed, 1));
  const std::size_t wanted = std::min(center_sample_size(n), members.size());
  std::vector<Vertex> sample;
  for (std::uint64_t idx : sample_without_replacement(members.size(), wanted, sampler)) {
    sample.push_back(members[static_cast<std::size_t>(idx)]);
  }
  std::sort(sample.begin(), sample.end());
  sample.erase(std::unique(sample.begin(), sample.end()), sample.end());
  out.sample_size = sample.size();
  if (sample.size() < static_cast<std::size_t>(k)) {
    throw InsufficientSampleError("spectral_init: center sample smaller than K");
  }

  std::vector<std::vector<Vertex>> balls;
  balls.reserve(sample.size());
  for (Vertex s : sample) {
    std::vector<Vertex> ball;
    for (Vertex v : members) {
      if (approx.row_distance_sq(s, v) <= radius) ball.push_back(v);
    }
    balls.push_back(std::move(ball));
  }

  for (int round = 0; round < k; ++round) {
    std::size_t best = 0;
    std::size_t best_count = 0;
    bool found = false;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      std::size_t count = 0;
      for (Vertex v : balls[i]) count += labels[v] < 0 ? 1 : 0;
      if (!found || count > best_count) {
        best = i;
        best_count = count;
        found = true;
      }
    }
    out.centers.push_back(sample[best]);
    for (Vertex v : balls[best]) {
      if (labels[v] < 0) labels[v] = round;
    }
  }

  for (Vertex v : members) {
    if (labels[v] >= 0) continue;
    int nearest = 0;
    double nearest_dist = approx.row_distance_sq(out.centers[0], v);
    for (int c = 1; c < k; ++c) {
      const double d = approx.row_distance_sq(out.centers[static_cast<std::size_t>(c)], v);
      if (d < nearest_dist) {
        nearest = c;
        nearest_dist = d;
      }
    }
    labels[v] = nearest;
  }

  Engine outside(derive_seed(seed, 2));
  std::uniform_int_distribution<int> pick(0, k - 1);
  for (std::size_t v = 0; v < n; ++v) {
    if (labels[v] < 0) labels[v] = pick(outside);
  }
  out.labels = MembershipVector(std::move(labels), k);
  return out;
}

}  // namespace hsbm
