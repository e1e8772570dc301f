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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hsbm/combinatorics.hpp"
#include "hsbm/model.hpp"

namespace hsbm {

// Symmetric n x n count matrix with zero diagonal, stored as CSR. Entry (i, j)
// is the number of hyperedges containing both i and j.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;

  // Builds from (i, j, count) triplets with i != j; both orientations must be
  // present. Duplicate positions are summed.
  AdjacencyMatrix(std::size_t n, std::vector<std::pair<std::uint64_t, std::int64_t>> keyed)
      : n_(n), row_ptr_(n + 1, 0) {
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size();) {
      const std::uint64_t key = keyed[i].first;
      std::int64_t sum = 0;
      for (; i < keyed.size() && keyed[i].first == key; ++i) sum += keyed[i].second;
      if (sum == 0) continue;
      const auto row = static_cast<std::size_t>(key / n_);
      cols_.push_back(static_cast<Vertex>(key % n_));
      vals_.push_back(sum);
      ++row_ptr_[row + 1];
    }
    for (std::size_t r = 0; r < n_; ++r) row_ptr_[r + 1] += row_ptr_[r];
  }

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return vals_.size(); }

  std::span<const Vertex> row_columns(std::size_t i) const {
    return std::span<const Vertex>(cols_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }
  std::span<const std::int64_t> row_values(std::size_t i) const {
    return std::span<const std::int64_t>(vals_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }

  std::int64_t at(std::size_t i, std::size_t j) const {
    const auto cols = row_columns(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<Vertex>(j));
    if (it == cols.end() || *it != j) return 0;
    return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
  }

  std::vector<std::int64_t> row_sums() const {
    std::vector<std::int64_t> out(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::int64_t v : row_values(i)) out[i] += v;
    }
    return out;
  }

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        acc += static_cast<double>(vals_[p]) * x[cols_[p]];
      }
      y[i] = acc;
    }
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                                static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      const auto cols = row_columns(i);
      const auto vals = row_values(i);
      for (std::size_t p = 0; p < cols.size(); ++p) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[p])) =
            static_cast<double>(vals[p]);
      }
    }
    return out;
  }

  // Rows and columns with keep[v] == false set to zero.
  AdjacencyMatrix restricted(const std::vector<bool>& keep) const {
    std::vector<std::pair<std::uint64_t, std::int64_t>> keyed;
    keyed.reserve(vals_.size());
    for (std::size_t i = 0; i < n_; ++i) {
      if (!keep[i]) continue;
      const auto cols = row_columns(i);
      const auto vals = row_values(i);
      for (std::size_t p = 0; p < cols.size(); ++p) {
        if (keep[cols[p]]) keyed.emplace_back(i * n_ + cols[p], vals[p]);
      }
    }
    return AdjacencyMatrix(n_, std::move(keyed));
  }

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Vertex> cols_;
  std::vector<std::int64_t> vals_;
};

inline AdjacencyMatrix adjacency_matrix(const NonUniformHypergraph& h) {
  const std::size_t n = h.vertex_count();
  std::vector<std::pair<std::uint64_t, std::int64_t>> keyed;
  h.for_each_edge([&](int, std::span<const Vertex> e) {
    for (std::size_t a = 0; a < e.size(); ++a) {
      for (std::size_t b = a + 1; b < e.size(); ++b) {
        keyed.emplace_back(static_cast<std::uint64_t>(e[a]) * n + e[b], 1);
        keyed.emplace_back(static_cast<std::uint64_t>(e[b]) * n + e[a], 1);
      }
    }
  });
  return AdjacencyMatrix(n, std::move(keyed));
}

// Counts of the edges containing v, split by order m and by the composition
// w ∈ WC(m-1, K) of the other m-1 members under the given labels.
struct DegreeProfile {
  std::map<int, std::vector<std::int64_t>> counts;  // indexed by composition_index
  std::int64_t total = 0;

  std::int64_t at(const WeakComposition& w) const {
    auto it = counts.find(w.order() + 1);
    return it == counts.end() ? 0 : it->second[composition_index(w)];
  }
};

inline DegreeProfile degree_profile(const NonUniformHypergraph& h, Vertex v,
                                    const MembershipVector& labels) {
  if (v >= h.vertex_count()) throw std::invalid_argument("degree_profile: vertex out of range");
  const int K = labels.communities();
  DegreeProfile out;
  for (int m : h.orders()) {
    out.counts[m].assign(static_cast<std::size_t>(weak_composition_count(m - 1, K)), 0);
  }
  std::vector<int> w(static_cast<std::size_t>(K));
  h.for_each_edge([&](int m, std::span<const Vertex> e) {
    if (!std::binary_search(e.begin(), e.end(), v)) return;
    std::fill(w.begin(), w.end(), 0);
    for (Vertex u : e) {
      if (u != v) ++w[static_cast<std::size_t>(labels[u])];
    }
    ++out.counts[m][composition_index(w)];
    ++out.total;
  });
  return out;
}

// E[A] given the labels and edge probabilities: for i != j,
// Σ_m Σ_{w ∈ WC(m-2,K)} (#ways to pick the other m-2 members as w) · Q_{z_i ⊕ z_j ⊕ w}.
inline Eigen::MatrixXd expected_adjacency(const MembershipVector& z, const ProbabilityTensorSet& q) {
  const auto n = static_cast<Eigen::Index>(z.size());
  const int K = q.communities();
  const auto sizes = z.block_sizes_real();
  // Value depends only on the unordered label pair (z_i, z_j).
  Eigen::MatrixXd pair_value(K, K);
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < K; ++b) {
      std::vector<double> others = sizes;
      others[static_cast<std::size_t>(a)] -= 1;
      others[static_cast<std::size_t>(b)] -= 1;
      double total = 0.0;
      for (int m : q.orders()) {
        for (const auto& w : enumerate_weak_compositions(m - 2, K)) {
          const double cap = capacity_real(w.counts(), others);
          if (cap == 0.0) continue;
          total += cap * q.at(oplus(a, oplus(b, w)));
        }
      }
      pair_value(a, b) = total;
    }
  }
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = i == j ? 0.0 : pair_value(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace hsbm
