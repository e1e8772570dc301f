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
 * Second stage: plug-in tensor estimates, likelihood refinement, edge
 * splitting and per-vertex MAP correction.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "hsbm/combinatorics.hpp"
#include "hsbm/model.hpp"
#include "hsbm/random.hpp"

namespace hsbm {

// Q̂_w = observed_w / n̂_w with n̂_w = Π_l C(|V̂_l|, w_l), for every order and
// every w ∈ WC(m, K). Entries with n̂_w = 0 are undefined.
class EstimatedTensorSet {
 public:
  EstimatedTensorSet() = default;
  explicit EstimatedTensorSet(int communities) : communities_(communities) {}

  int communities() const { return communities_; }
  std::vector<int> orders() const {
    std::vector<int> out;
    for (const auto& [m, _] : observed_) out.push_back(m);
    return out;
  }

  std::int64_t observed(const WeakComposition& w) const {
    return observed_.at(w.order())[composition_index(w)];
  }
  double capacity(const WeakComposition& w) const {
    return capacity_.at(w.order())[composition_index(w)];
  }
  bool defined(const WeakComposition& w) const { return capacity(w) > 0.0; }

  // NaN when undefined.
  double estimate(const WeakComposition& w) const {
    const double cap = capacity(w);
    if (cap <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(observed(w)) / cap;
  }

  // Estimate pulled into [1/(2 n̂_w), 1 - 1/(2 n̂_w)] so that both logarithms
  // are finite. NaN when undefined.
  double clamped(const WeakComposition& w) const {
    return clamp_entry(observed(w), capacity(w));
  }

  static double clamp_entry(std::int64_t observed, double cap) {
    if (cap <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double lo = 0.5 / cap;
    return std::clamp(static_cast<double>(observed) / cap, lo, 1.0 - lo);
  }

  // Plain estimates as a tensor set; undefined entries become 0.
  ProbabilityTensorSet to_tensors() const {
    TensorSet out(communities_);
    for (const auto& [m, obs] : observed_) {
      std::vector<double> v(obs.size(), 0.0);
      const auto& cap = capacity_.at(m);
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = cap[i] > 0.0 ? static_cast<double>(obs[i]) / cap[i] : 0.0;
      }
      out.set_layer(m, std::move(v));
    }
    return ProbabilityTensorSet(std::move(out));
  }

  std::span<const std::int64_t> observed_layer(int m) const { return observed_.at(m); }
  std::span<const double> capacity_layer(int m) const { return capacity_.at(m); }

 private:
  friend EstimatedTensorSet estimate_tensors(const NonUniformHypergraph&, const MembershipVector&,
                                             int);
  int communities_ = 0;
  std::map<int, std::vector<std::int64_t>> observed_;
  std::map<int, std::vector<double>> capacity_;
};

inline EstimatedTensorSet estimate_tensors(const NonUniformHypergraph& h,
                                           const MembershipVector& z_hat, int K) {
  if (z_hat.size() != h.vertex_count()) {
    throw std::invalid_argument("estimate_tensors: label vector length != n");
  }
  if (z_hat.communities() > K) throw std::invalid_argument("estimate_tensors: labels exceed K");
  EstimatedTensorSet out(K);
  std::vector<double> sizes(static_cast<std::size_t>(K), 0.0);
  for (int l : z_hat.labels()) sizes[static_cast<std::size_t>(l)] += 1.0;
  for (int m : h.orders()) {
    const auto comps = enumerate_weak_compositions(m, K);
    auto& cap = out.capacity_[m];
    for (const auto& w : comps) cap.push_back(capacity_real(w.counts(), sizes));
    out.observed_[m].assign(comps.size(), 0);
  }
  std::vector<int> w(static_cast<std::size_t>(K));
  h.for_each_edge([&](int m, std::span<const Vertex> e) {
    std::fill(w.begin(), w.end(), 0);
    for (Vertex v : e) ++w[static_cast<std::size_t>(z_hat[v])];
    ++out.observed_[m][composition_index(w)];
  });
  return out;
}

// Ê_{v,w}: per order m, counts of m-edges at v indexed by the composition
// w ∈ WC(m-1, K) of the other members.
struct EdgeTypeCounts {
  std::map<int, std::vector<std::int64_t>> counts;

  std::int64_t at(const WeakComposition& w) const {
    auto it = counts.find(w.order() + 1);
    return it == counts.end() ? 0 : it->second[composition_index(w)];
  }
  std::int64_t total() const {
    std::int64_t s = 0;
    for (const auto& [m, c] : counts) {
      for (auto x : c) s += x;
    }
    return s;
  }
};

inline EdgeTypeCounts edge_type_counts(const NonUniformHypergraph& h, const MembershipVector& z_hat,
                                       Vertex v) {
  if (v >= h.vertex_count()) throw std::invalid_argument("edge_type_counts: vertex out of range");
  const int K = z_hat.communities();
  EdgeTypeCounts out;
  for (int m : h.orders()) out.counts[m].assign(weak_composition_count(m - 1, K), 0);
  std::vector<int> w(static_cast<std::size_t>(K));
  h.for_each_edge([&](int m, std::span<const Vertex> e) {
    if (!std::binary_search(e.begin(), e.end(), v)) return;
    std::fill(w.begin(), w.end(), 0);
    for (Vertex u : e) {
      if (u != v) ++w[static_cast<std::size_t>(z_hat[u])];
    }
    ++out.counts[m][composition_index(w)];
  });
  return out;
}

namespace details {

// Edge-type counts for every vertex at once: row v holds, for each order in
// `orders` (ascending), the WC(m-1, K) counts back to back.
struct EdgeTypeTable {
  std::vector<int> orders;
  std::vector<std::size_t> offset;  // per order, start within a row
  std::size_t width = 0;
  std::vector<std::int64_t> data;   // n * width

  std::span<const std::int64_t> row(std::size_t v) const {
    return std::span<const std::int64_t>(data).subspan(v * width, width);
  }
};

inline EdgeTypeTable edge_type_table(const NonUniformHypergraph& h, std::span<const int> labels,
                                     int K) {
  EdgeTypeTable t;
  t.orders = h.orders();
  for (int m : t.orders) {
    t.offset.push_back(t.width);
    t.width += weak_composition_count(m - 1, K);
  }
  t.data.assign(h.vertex_count() * t.width, 0);
  std::map<int, std::size_t> offset_of;
  for (std::size_t i = 0; i < t.orders.size(); ++i) offset_of[t.orders[i]] = t.offset[i];
  std::vector<int> whole(static_cast<std::size_t>(K));
  h.for_each_edge([&](int m, std::span<const Vertex> e) {
    std::fill(whole.begin(), whole.end(), 0);
    for (Vertex u : e) ++whole[static_cast<std::size_t>(labels[u])];
    const std::size_t base = offset_of[m];
    for (Vertex u : e) {
      auto& c = whole[static_cast<std::size_t>(labels[u])];
      --c;
      ++t.data[u * t.width + base + composition_index(whole)];
      ++c;
    }
  });
  return t;
}

// Per candidate label k, the score of vertex v is
//   base[k] + Σ_{(m,w) : E_w > 0} E_w · slope[k][(m,w)]
// with base[k] = Σ n̂_w log(1 - q_{k⊕w}) and slope = log q - log(1 - q).
// Undefined entries are stored as zeros in both.
struct LinearScores {
  std::vector<double> base;                // K
  std::vector<std::vector<double>> slope;  // K x width

  template <typename Q>
  static LinearScores build(const EdgeTypeTable& t, std::span<const double> sizes, int K, Q&& q) {
    LinearScores s;
    s.base.assign(static_cast<std::size_t>(K), 0.0);
    s.slope.assign(static_cast<std::size_t>(K), std::vector<double>(t.width, 0.0));
    for (std::size_t oi = 0; oi < t.orders.size(); ++oi) {
      const int m = t.orders[oi];
      const auto comps = enumerate_weak_compositions(m - 1, K);
      for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const double cap = capacity_real(comps[ci].counts(), sizes);
        for (int k = 0; k < K; ++k) {
          const double p = q(oplus(k, comps[ci]));
          if (std::isnan(p)) continue;
          const double log_absent = std::log1p(-p);
          s.base[static_cast<std::size_t>(k)] += cap * log_absent;
          s.slope[static_cast<std::size_t>(k)][t.offset[oi] + ci] = std::log(p) - log_absent;
        }
      }
    }
    return s;
  }

  double score(int k, std::span<const std::int64_t> row) const {
    const auto& sl = slope[static_cast<std::size_t>(k)];
    double out = base[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] != 0) out += static_cast<double>(row[i]) * sl[i];
    }
    return out;
  }
};

}  // namespace details

struct RefineStep {
  MembershipVector labels;
  std::size_t changed = 0;
};

// One synchronous likelihood sweep. Ties (relative gap below 1e-12) are
// broken uniformly with a draw keyed by (iteration, vertex).
inline RefineStep refine_step(const NonUniformHypergraph& h, const MembershipVector& z_hat,
                              const EstimatedTensorSet& q_hat, std::uint64_t seed,
                              std::uint64_t iteration = 0) {
  const int K = z_hat.communities();
  const std::size_t n = h.vertex_count();
  if (z_hat.size() != n) throw std::invalid_argument("refine_step: label vector length != n");
  if (q_hat.communities() != K) throw std::invalid_argument("refine_step: K mismatch");
  if (K == 1) return {z_hat, 0};

  const auto table = details::edge_type_table(h, z_hat.labels(), K);
  const auto sizes = z_hat.block_sizes_real();
  const auto scores = details::LinearScores::build(
      table, sizes, K, [&](const WeakComposition& w) { return q_hat.clamped(w); });

  std::vector<int> next(n);
  std::size_t changed = 0;
  std::vector<double> s(static_cast<std::size_t>(K));
  std::vector<int> tied;
  for (std::size_t v = 0; v < n; ++v) {
    const auto row = table.row(v);
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      s[static_cast<std::size_t>(k)] = scores.score(k, row);
      best = std::max(best, s[static_cast<std::size_t>(k)]);
    }
    tied.clear();
    const double slack = 1e-12 * std::max(1.0, std::abs(best));
    for (int k = 0; k < K; ++k) {
      if (s[static_cast<std::size_t>(k)] >= best - slack) tied.push_back(k);
    }
    int pick = tied.front();
    if (tied.size() > 1) {
      pick = tied[static_cast<std::size_t>(keyed_uniform(seed, iteration, v, tied.size()))];
    }
    next[v] = pick;
    if (pick != z_hat[v]) ++changed;
  }
  return {MembershipVector(std::move(next), K), changed};
}

struct RefineResult {
  MembershipVector labels;
  int iterations = 0;
};

inline int refine_iteration_limit(std::size_t n) {
  return static_cast<int>(std::ceil(std::log(static_cast<double>(n)))) + 1;
}

// Estimates Q̂ once from the initial labels, then repeats refine_step until no
// label changes or ⌈log n⌉ + 1 sweeps have run.
inline RefineResult agnostic_refine(const NonUniformHypergraph& h, const MembershipVector& z0,
                                    int K, std::uint64_t seed) {
  if (z0.communities() != K) throw std::invalid_argument("agnostic_refine: K mismatch");
  RefineResult out{z0, 0};
  if (K == 1) {
    out.iterations = 1;
    return out;
  }
  const auto q_hat = estimate_tensors(h, z0, K);
  const int limit = refine_iteration_limit(h.vertex_count());
  for (int it = 0; it < limit; ++it) {
    auto step = refine_step(h, out.labels, q_hat, seed, static_cast<std::uint64_t>(it));
    out.iterations = it + 1;
    out.labels = std::move(step.labels);
    if (step.changed == 0) break;
  }
  return out;
}

struct SplitPair {
  NonUniformHypergraph initial;     // H⁽⁰⁾
  NonUniformHypergraph correction;  // H⁽¹⁾
  double retention = 0.0;           // θ_n / log n
};

// Each edge goes to H⁽⁰⁾ with probability θ_n / log n, otherwise to H⁽¹⁾.
inline SplitPair split(const NonUniformHypergraph& h, double theta, std::uint64_t seed) {
  const double ratio = theta / std::log(static_cast<double>(h.vertex_count()));
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("split: retention θ/log n must lie in [0, 1]");
  }
  const auto orders = h.orders();
  SplitPair out{NonUniformHypergraph(h.vertex_count(), orders),
                NonUniformHypergraph(h.vertex_count(), orders), ratio};
  Engine engine(seed);
  std::bernoulli_distribution keep(ratio);
  h.for_each_edge([&](int, std::span<const Vertex> e) {
    std::vector<Vertex> edge(e.begin(), e.end());
    if (keep(engine)) {
      out.initial.add_edge(std::move(edge));
    } else {
      out.correction.add_edge(std::move(edge));
    }
  });
  return out;
}

namespace details {

inline void require_open_unit(const TensorSet& q, const char* who) {
  for (int m : q.orders()) {
    for (double x : q.layer(m)) {
      if (!(x > 0.0 && x < 1.0)) {
        throw std::invalid_argument(std::string(who) + ": probabilities must lie in (0, 1)");
      }
    }
  }
}

inline int map_decision(const LinearScores& scores, const CommunityPrior& alpha,
                        std::span<const std::int64_t> row) {
  int best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < alpha.communities(); ++k) {
    const double s = std::log(alpha[k]) + scores.score(k, row);
    if (s > best) {
      best = s;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace details

// ẑ_v = argmax_k log α_k + Σ_m Σ_w d̂_{v,w} log Q_{k⊕w} + (n̂_w - d̂_{v,w}) log(1 - Q_{k⊕w}),
// where d̂ are the edge-type counts in H⁽¹⁾ under ẑ⁽⁰⁾ and n̂_w the capacities
// of the ẑ⁽⁰⁾ blocks. Ties go to the smallest k.
inline MembershipVector map_correct(const NonUniformHypergraph& h1, const MembershipVector& z0,
                                    const ProbabilityTensorSet& q1, const CommunityPrior& alpha) {
  const int K = z0.communities();
  if (q1.communities() != K || alpha.communities() != K) {
    throw std::invalid_argument("map_correct: K mismatch");
  }
  if (z0.size() != h1.vertex_count()) throw std::invalid_argument("map_correct: length mismatch");
  details::require_open_unit(q1, "map_correct");
  const auto table = details::edge_type_table(h1, z0.labels(), K);
  const auto sizes = z0.block_sizes_real();
  const auto scores = details::LinearScores::build(
      table, sizes, K, [&](const WeakComposition& w) { return q1.at(w); });
  std::vector<int> labels(z0.size());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    labels[v] = details::map_decision(scores, alpha, table.row(v));
  }
  return MembershipVector(std::move(labels), K);
}

// Decision for a single vertex; identical to map_correct(...)[v].
inline int map_correct_vertex(const NonUniformHypergraph& h1, const MembershipVector& z0,
                              const ProbabilityTensorSet& q1, const CommunityPrior& alpha,
                              Vertex v) {
  const int K = z0.communities();
  if (q1.communities() != K || alpha.communities() != K) {
    throw std::invalid_argument("map_correct: K mismatch");
  }
  details::require_open_unit(q1, "map_correct");
  const auto counts = edge_type_counts(h1, z0, v);
  details::EdgeTypeTable t;
  t.orders = h1.orders();
  for (int m : t.orders) {
    t.offset.push_back(t.width);
    const auto& c = counts.counts.at(m);
    t.width += c.size();
    t.data.insert(t.data.end(), c.begin(), c.end());
  }
  const auto sizes = z0.block_sizes_real();
  const auto scores = details::LinearScores::build(
      t, sizes, K, [&](const WeakComposition& w) { return q1.at(w); });
  return details::map_decision(scores, alpha, t.row(0));
}

}  // namespace hsbm
