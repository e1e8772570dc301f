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
 * Model description and sampling for the non-uniform hypergraph stochastic
 * block model.
 *
 * Conventions used across the library: vertices are 0-based ids in [0, n),
 * communities are 0-based indices in [0, K). Text files use 1-based ids and
 * labels; the io header does the translation.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hsbm/combinatorics.hpp"
#include "hsbm/errors.hpp"
#include "hsbm/random.hpp"

namespace hsbm {

using Vertex = std::uint32_t;

class CommunityPrior {
 public:
  CommunityPrior() = default;
  explicit CommunityPrior(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.empty()) throw std::invalid_argument("community prior needs K >= 1 entries");
    double sum = 0.0;
    for (double a : alpha_) {
      if (!(a > 0.0)) throw std::invalid_argument("community prior entries must be > 0");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("community prior must sum to 1");
    }
  }

  static CommunityPrior uniform(int communities) {
    std::vector<double> alpha(static_cast<std::size_t>(communities), 1.0 / communities);
    // Push the rounding residue into the last entry so the sum is exact.
    double head = 0.0;
    for (int k = 0; k + 1 < communities; ++k) head += alpha[static_cast<std::size_t>(k)];
    alpha.back() = 1.0 - head;
    return CommunityPrior(std::move(alpha));
  }

  int communities() const { return static_cast<int>(alpha_.size()); }
  double operator[](int k) const { return alpha_[static_cast<std::size_t>(k)]; }
  std::span<const double> values() const { return alpha_; }

  // ⌊α_l n⌋ for every community, as used by the expected capacities.
  std::vector<double> expected_sizes(std::size_t n) const {
    std::vector<double> out;
    out.reserve(alpha_.size());
    // The slack keeps products such as 0.29 * 100 from flooring to 28.
    for (double a : alpha_) out.push_back(std::floor(a * static_cast<double>(n) + 1e-9));
    return out;
  }

 private:
  std::vector<double> alpha_;
};

// n̄_w = Π_l C(⌊α_l n⌋, w_l).
inline double expected_capacity(const WeakComposition& w, const CommunityPrior& alpha,
                                std::size_t n) {
  if (w.parts() != alpha.communities()) {
    throw std::invalid_argument("expected_capacity: composition and prior disagree on K");
  }
  const auto sizes = alpha.expected_sizes(n);
  return capacity_real(w.counts(), sizes);
}

// Values indexed by weak composition, one layer per hyperedge order. Used for
// both the unscaled coefficients P and the edge probabilities Q.
class TensorSet {
 public:
  TensorSet() = default;
  explicit TensorSet(int communities) : communities_(communities) {
    if (communities < 1) throw std::invalid_argument("tensor set needs K >= 1");
  }

  int communities() const { return communities_; }

  void set_layer(int order, std::vector<double> values) {
    if (order < 2) throw std::invalid_argument("hyperedge orders must be >= 2");
    if (values.size() != weak_composition_count(order, communities_)) {
      throw std::invalid_argument("layer " + std::to_string(order) +
                                  " must have one value per weak composition");
    }
    for (double v : values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("tensor entries must be finite and >= 0");
      }
    }
    layers_[order] = std::move(values);
  }

  // Layer where concentrated compositions (all members in one community) get
  // `within` and every other composition gets `cross`.
  void set_symmetric_layer(int order, double within, double cross) {
    std::vector<double> values;
    for (const auto& w : enumerate_weak_compositions(order, communities_)) {
      values.push_back(w.is_concentrated() ? within : cross);
    }
    set_layer(order, std::move(values));
  }

  bool has_order(int order) const { return layers_.count(order) > 0; }

  std::vector<int> orders() const {
    std::vector<int> out;
    for (const auto& [m, _] : layers_) out.push_back(m);
    return out;
  }

  int max_order() const { return layers_.empty() ? 0 : layers_.rbegin()->first; }

  std::span<const double> layer(int order) const { return layers_.at(order); }

  double at(std::span<const int> counts) const {
    int order = 0;
    for (int c : counts) order += c;
    return layers_.at(order)[composition_index(counts)];
  }
  double at(const WeakComposition& w) const { return at(w.counts()); }

  void set(const WeakComposition& w, double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("tensor entries must be finite and >= 0");
    }
    layers_.at(w.order())[composition_index(w)] = value;
  }

  double layer_max(int order) const {
    const auto& v = layers_.at(order);
    return *std::max_element(v.begin(), v.end());
  }
  double layer_min(int order) const {
    const auto& v = layers_.at(order);
    return *std::min_element(v.begin(), v.end());
  }

  // Copy with every layer-m entry multiplied by factor(m).
  TensorSet scaled(const std::function<double(int)>& factor) const {
    TensorSet out(communities_);
    for (const auto& [m, values] : layers_) {
      std::vector<double> v = values;
      const double f = factor(m);
      for (double& x : v) x *= f;
      out.set_layer(m, std::move(v));
    }
    return out;
  }

  // Restriction to a subset of orders.
  TensorSet restricted(std::span<const int> keep) const {
    TensorSet out(communities_);
    for (int m : keep) out.set_layer(m, layers_.at(m));
    return out;
  }

  bool operator==(const TensorSet&) const = default;

 private:
  int communities_ = 0;
  std::map<int, std::vector<double>> layers_;
};

// TensorSet whose entries are edge probabilities in [0, 1].
class ProbabilityTensorSet : public TensorSet {
 public:
  ProbabilityTensorSet() = default;
  explicit ProbabilityTensorSet(TensorSet values) : TensorSet(std::move(values)) {
    for (int m : orders()) {
      for (double q : layer(m)) {
        if (q > 1.0) {
          throw std::invalid_argument("edge probability above 1 in layer " + std::to_string(m));
        }
      }
    }
  }
};

// Q_w = P_w * log(n) / C(n-1, m-1).
inline double exact_recovery_scale(std::size_t n, int order) {
  return std::log(static_cast<double>(n)) /
         binomial_real(static_cast<double>(n - 1), order - 1);
}

inline ProbabilityTensorSet scale_to_probabilities(const TensorSet& unscaled, std::size_t n) {
  return ProbabilityTensorSet(
      unscaled.scaled([n](int m) { return exact_recovery_scale(n, m); }));
}

class MembershipVector {
 public:
  MembershipVector() = default;
  MembershipVector(std::vector<int> labels, int communities)
      : labels_(std::move(labels)), communities_(communities) {
    if (communities < 1) throw std::invalid_argument("membership needs K >= 1");
    for (int l : labels_) {
      if (l < 0 || l >= communities) {
        throw std::invalid_argument("membership label out of range");
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  int communities() const { return communities_; }
  int operator[](std::size_t v) const { return labels_[v]; }
  std::span<const int> labels() const { return labels_; }

  std::vector<std::size_t> block_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(communities_), 0);
    for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
  }

  std::vector<double> block_sizes_real() const {
    const auto s = block_sizes();
    return {s.begin(), s.end()};
  }

  bool operator==(const MembershipVector&) const = default;

 private:
  std::vector<int> labels_;
  int communities_ = 1;
};

class NonUniformHypergraph {
 public:
  NonUniformHypergraph() = default;
  NonUniformHypergraph(std::size_t vertices, std::span<const int> orders) : n_(vertices) {
    for (int m : orders) add_order(m);
  }

  void add_order(int order) {
    if (order < 2) throw std::invalid_argument("hyperedge orders must be >= 2");
    layers_.try_emplace(order);
  }

  // Appends an edge. Vertices may come in any order; duplicates within the
  // edge, out-of-range ids and undeclared orders are rejected. Call
  // canonicalize() after bulk insertion to sort and reject duplicate edges.
  void add_edge(std::vector<Vertex> edge) {
    const int m = static_cast<int>(edge.size());
    if (!layers_.contains(m)) {
      throw std::invalid_argument("hyperedge order " + std::to_string(m) + " not declared");
    }
    std::sort(edge.begin(), edge.end());
    if (std::adjacent_find(edge.begin(), edge.end()) != edge.end()) {
      throw std::invalid_argument("hyperedge repeats a vertex");
    }
    if (!edge.empty() && edge.back() >= n_) {
      throw std::invalid_argument("hyperedge vertex id out of range");
    }
    auto& flat = layers_[m];
    flat.insert(flat.end(), edge.begin(), edge.end());
  }

  // Sorts each layer lexicographically; throws on duplicate edges.
  void canonicalize() {
    for (auto& [m, flat] : layers_) {
      const std::size_t count = flat.size() / static_cast<std::size_t>(m);
      std::vector<std::size_t> idx(count);
      std::iota(idx.begin(), idx.end(), 0);
      auto less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(flat.begin() + a * m, flat.begin() + (a + 1) * m,
                                            flat.begin() + b * m, flat.begin() + (b + 1) * m);
      };
      std::sort(idx.begin(), idx.end(), less);
      std::vector<Vertex> sorted;
      sorted.reserve(flat.size());
      for (std::size_t i = 0; i < count; ++i) {
        if (i > 0 && !less(idx[i - 1], idx[i])) {
          throw std::invalid_argument("duplicate hyperedge of order " + std::to_string(m));
        }
        sorted.insert(sorted.end(), flat.begin() + idx[i] * m, flat.begin() + (idx[i] + 1) * m);
      }
      flat = std::move(sorted);
    }
  }

  std::size_t vertex_count() const { return n_; }

  std::vector<int> orders() const {
    std::vector<int> out;
    for (const auto& [m, _] : layers_) out.push_back(m);
    return out;
  }

  bool has_order(int order) const { return layers_.count(order) > 0; }

  std::size_t edge_count(int order) const {
    auto it = layers_.find(order);
    return it == layers_.end() ? 0 : it->second.size() / static_cast<std::size_t>(order);
  }

  std::size_t total_edge_count() const {
    std::size_t total = 0;
    for (const auto& [m, flat] : layers_) total += flat.size() / static_cast<std::size_t>(m);
    return total;
  }

  std::span<const Vertex> edge(int order, std::size_t i) const {
    const auto& flat = layers_.at(order);
    return std::span<const Vertex>(flat).subspan(i * static_cast<std::size_t>(order),
                                                 static_cast<std::size_t>(order));
  }

  template <typename F>
  void for_each_edge(F&& f) const {
    for (const auto& [m, flat] : layers_) {
      const std::size_t count = flat.size() / static_cast<std::size_t>(m);
      for (std::size_t i = 0; i < count; ++i) {
        f(m, std::span<const Vertex>(flat).subspan(i * m, static_cast<std::size_t>(m)));
      }
    }
  }

  // Number of hyperedges containing each vertex.
  std::vector<std::int64_t> degrees() const {
    std::vector<std::int64_t> d(n_, 0);
    for (const auto& [m, flat] : layers_) {
      for (Vertex v : flat) ++d[v];
    }
    return d;
  }

  bool operator==(const NonUniformHypergraph&) const = default;

 private:
  std::size_t n_ = 0;
  std::map<int, std::vector<Vertex>> layers_;
};

// Per-vertex incidence lists: (order, edge index) for every edge containing v.
struct EdgeRef {
  int order;
  std::uint32_t index;
};

inline std::vector<std::vector<EdgeRef>> incidence_lists(const NonUniformHypergraph& h) {
  std::vector<std::vector<EdgeRef>> out(h.vertex_count());
  for (int m : h.orders()) {
    const std::size_t count = h.edge_count(m);
    for (std::size_t i = 0; i < count; ++i) {
      for (Vertex v : h.edge(m, i)) out[v].push_back({m, static_cast<std::uint32_t>(i)});
    }
  }
  return out;
}

enum class BlockSizeMode {
  kMultinomial,  // labels drawn i.i.d. from alpha
  kFixed,        // exactly ⌊α_k n⌋ per block, remainder by largest fraction
};

inline MembershipVector sample_membership(std::size_t n, const CommunityPrior& alpha,
                                          std::uint64_t seed,
                                          BlockSizeMode mode = BlockSizeMode::kMultinomial) {
  if (n < 1) throw std::invalid_argument("sample_membership: n must be >= 1");
  const int K = alpha.communities();
  Engine engine(seed);
  std::vector<int> labels(n);
  if (mode == BlockSizeMode::kMultinomial) {
    std::discrete_distribution<int> pick(alpha.values().begin(), alpha.values().end());
    for (auto& l : labels) l = pick(engine);
    return MembershipVector(std::move(labels), K);
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(K));
  std::vector<std::pair<double, int>> remainders;
  std::size_t assigned = 0;
  for (int k = 0; k < K; ++k) {
    const double exact = alpha[k] * static_cast<double>(n);
    sizes[static_cast<std::size_t>(k)] = static_cast<std::size_t>(std::floor(exact));
    assigned += sizes[static_cast<std::size_t>(k)];
    remainders.emplace_back(-(exact - std::floor(exact)), k);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
    ++sizes[static_cast<std::size_t>(remainders[i % remainders.size()].second)];
  }
  std::size_t pos = 0;
  for (int k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < sizes[static_cast<std::size_t>(k)]; ++i) labels[pos++] = k;
  }
  std::shuffle(labels.begin(), labels.end(), engine);
  return MembershipVector(std::move(labels), K);
}

namespace details {

// Inverse of the combinatorial number system: the rank-th c-subset of
// {0, ..., size-1} in colex order, written to out (ascending).
inline void unrank_subset(std::uint64_t rank, int c, std::uint64_t size, std::vector<Vertex>& out) {
  std::vector<Vertex> picked;
  std::uint64_t hi = size;  // candidates are < hi
  for (int j = c; j >= 1; --j) {
    // largest x < hi with C(x, j) <= rank
    std::uint64_t lo = static_cast<std::uint64_t>(j - 1);
    std::uint64_t top = hi - 1;
    while (lo < top) {
      const std::uint64_t mid = lo + (top - lo + 1) / 2;
      if (binomial(mid, static_cast<std::uint64_t>(j)) <= rank) {
        lo = mid;
      } else {
        top = mid - 1;
      }
    }
    picked.push_back(static_cast<Vertex>(lo));
    rank -= binomial(lo, static_cast<std::uint64_t>(j));
    hi = lo;
  }
  out.insert(out.end(), picked.rbegin(), picked.rend());
}

}  // namespace details

// Draws H = ∪_m H_m given the labels. Edges are generated per composition
// class: the number present in a class of N candidate m-subsets is
// Binomial(N, Q_w), and that many distinct members are picked uniformly. This
// has the same law as one Bernoulli(Q_w) trial per candidate subset.
inline NonUniformHypergraph sample_hypergraph(std::size_t n, const MembershipVector& z,
                                              const ProbabilityTensorSet& q,
                                              std::uint64_t seed) {
  if (z.size() != n) throw std::invalid_argument("sample_hypergraph: label vector length != n");
  const int K = q.communities();
  if (z.communities() != K) {
    throw std::invalid_argument("sample_hypergraph: label and tensor community counts differ");
  }
  std::vector<std::vector<Vertex>> blocks(static_cast<std::size_t>(K));
  for (std::size_t v = 0; v < n; ++v) blocks[static_cast<std::size_t>(z[v])].push_back(static_cast<Vertex>(v));
  std::vector<std::size_t> sizes;
  for (const auto& b : blocks) sizes.push_back(b.size());

  const auto orders = q.orders();
  NonUniformHypergraph h(n, orders);
  for (int m : orders) {
    Engine engine(derive_seed(seed, static_cast<std::uint64_t>(m)));
    const auto comps = enumerate_weak_compositions(m, K);
    const auto values = q.layer(m);
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
      const double p = values[ci];
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("edge probability outside [0, 1]");
      const auto& w = comps[ci];
      const std::uint64_t population = capacity(w, sizes);
      if (population == 0 || p == 0.0) continue;
      std::uint64_t count = population;
      if (p < 1.0) {
        if (population > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) {
          throw OverflowError("composition class too large to sample");
        }
        std::binomial_distribution<long long> draw(static_cast<long long>(population), p);
        count = static_cast<std::uint64_t>(draw(engine));
      }
      std::vector<std::uint64_t> radix(static_cast<std::size_t>(K));
      for (int l = 0; l < K; ++l) {
        radix[static_cast<std::size_t>(l)] =
            binomial(sizes[static_cast<std::size_t>(l)], static_cast<std::uint64_t>(w[l]));
      }
      std::vector<Vertex> local;
      std::vector<Vertex> edge;
      for (std::uint64_t index : sample_without_replacement(population, count, engine)) {
        edge.clear();
        for (int l = 0; l < K; ++l) {
          const auto L = static_cast<std::size_t>(l);
          const std::uint64_t digit = index % radix[L];
          index /= radix[L];
          if (w[l] == 0) continue;
          local.clear();
          details::unrank_subset(digit, w[l], sizes[L], local);
          for (Vertex x : local) edge.push_back(blocks[L][x]);
        }
        h.add_edge(edge);
      }
    }
  }
  h.canonicalize();
  return h;
}

// ρ_n: maximum expected degree, max_k Σ_m Σ_{w ∈ WC(m-1,K)} n̄_w Q_{k⊕w} with
// n̄_w computed from ⌊α_l n⌋ block sizes.
inline double max_expected_degree(const CommunityPrior& alpha, const TensorSet& q,
                                  std::size_t n) {
  const int K = q.communities();
  const auto sizes = alpha.expected_sizes(n);
  double best = 0.0;
  for (int k = 0; k < K; ++k) {
    double total = 0.0;
    for (int m : q.orders()) {
      for (const auto& w : enumerate_weak_compositions(m - 1, K)) {
        total += capacity_real(w.counts(), sizes) * q.at(oplus(k, w));
      }
    }
    best = std::max(best, total);
  }
  return best;
}

}  // namespace hsbm
