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
 * Weak compositions and the binomial capacities built on them.
 *
 * A weak composition of m into K parts is the membership count vector of an
 * m-subset of vertices: w_l vertices come from community l. Every edge
 * probability in the model is indexed by one. The canonical order is
 * lexicographically descending on the counts, e.g. for m = 2, K = 2:
 * (2,0), (1,1), (0,2).
 */

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsbm/errors.hpp"

namespace hsbm {

namespace details {

inline std::uint64_t mul_or_throw(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw OverflowError("binomial product exceeds 64 bits");
  }
  return out;
}

}  // namespace details

// C(n, k) in exact 64-bit arithmetic. Throws OverflowError when the result
// (or an intermediate that must divide exactly) leaves the 64-bit range.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step; divide by the gcd
    // first so the intermediate stays as small as possible.
    const std::uint64_t num = n - k + i;
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t r = result / g;
    const std::uint64_t d = i / g;
    result = details::mul_or_throw(r, num / d);
  }
  return result;
}

// C(n, k) as a floating point value; never overflows for desk-scale inputs.
inline double binomial_real(double n, int k) {
  if (k < 0 || static_cast<double>(k) > n) return 0.0;
  long double out = 1.0L;
  for (int i = 0; i < k; ++i) {
    out *= static_cast<long double>(n - i) / static_cast<long double>(i + 1);
  }
  return static_cast<double>(out);
}

class WeakComposition {
 public:
  WeakComposition() = default;
  explicit WeakComposition(std::vector<int> counts) : counts_(std::move(counts)) {
    for (int c : counts_) {
      if (c < 0) throw std::invalid_argument("weak composition entries must be >= 0");
    }
  }
  WeakComposition(std::initializer_list<int> counts)
      : WeakComposition(std::vector<int>(counts)) {}

  // Zero composition of order 0 with K parts.
  static WeakComposition zeros(int parts) {
    if (parts < 1) throw std::invalid_argument("composition needs K >= 1 parts");
    return WeakComposition(std::vector<int>(static_cast<std::size_t>(parts), 0));
  }

  int parts() const { return static_cast<int>(counts_.size()); }
  int order() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }
  int operator[](int l) const { return counts_[static_cast<std::size_t>(l)]; }
  std::span<const int> counts() const { return counts_; }

  bool operator==(const WeakComposition&) const = default;

  // True when all members of the composition fall in one community.
  bool is_concentrated() const {
    int nonzero = 0;
    for (int c : counts_) nonzero += c > 0 ? 1 : 0;
    return nonzero <= 1;
  }

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(counts_[i]);
    }
    return out + ")";
  }

 private:
  std::vector<int> counts_;
};

inline std::ostream& operator<<(std::ostream& os, const WeakComposition& w) {
  return os << w.to_string();
}

// |WC(m, K)| = C(m + K - 1, K - 1).
inline std::uint64_t weak_composition_count(int order, int parts) {
  if (parts < 1) throw std::invalid_argument("weak compositions need K >= 1");
  if (order < 0) return 0;
  return binomial(static_cast<std::uint64_t>(order + parts - 1),
                  static_cast<std::uint64_t>(parts - 1));
}

// All weak compositions of `order` into `parts` parts, lexicographically
// descending.
inline std::vector<WeakComposition> enumerate_weak_compositions(int order, int parts) {
  if (parts < 1) throw std::invalid_argument("enumerate_weak_compositions: K must be >= 1");
  if (order < 0) throw std::invalid_argument("enumerate_weak_compositions: m must be >= 0");
  std::vector<WeakComposition> out;
  out.reserve(static_cast<std::size_t>(weak_composition_count(order, parts)));
  std::vector<int> current(static_cast<std::size_t>(parts), 0);
  auto recurse = [&](auto&& self, int slot, int remaining) -> void {
    if (slot == parts - 1) {
      current[static_cast<std::size_t>(slot)] = remaining;
      out.emplace_back(current);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      current[static_cast<std::size_t>(slot)] = v;
      self(self, slot + 1, remaining - v);
    }
  };
  recurse(recurse, 0, order);
  return out;
}

// Position of `w` in enumerate_weak_compositions(w.order(), w.parts()).
inline std::size_t composition_index(std::span<const int> counts) {
  const int parts = static_cast<int>(counts.size());
  int remaining = 0;
  for (int c : counts) remaining += c;
  std::size_t index = 0;
  for (int i = 0; i + 1 < parts; ++i) {
    const int tail_parts = parts - i - 1;
    const int wi = counts[static_cast<std::size_t>(i)];
    for (int v = remaining; v > wi; --v) {
      index += static_cast<std::size_t>(weak_composition_count(remaining - v, tail_parts));
    }
    remaining -= wi;
  }
  return index;
}

inline std::size_t composition_index(const WeakComposition& w) {
  return composition_index(w.counts());
}

// k ⊕ w: the composition seen from a vertex of community k whose other edge
// members are distributed as w.
inline WeakComposition oplus(int k, const WeakComposition& w) {
  if (k < 0 || k >= w.parts()) {
    throw std::invalid_argument("oplus: community index out of range");
  }
  std::vector<int> counts(w.counts().begin(), w.counts().end());
  ++counts[static_cast<std::size_t>(k)];
  return WeakComposition(std::move(counts));
}

// Number of vertex sets realizing composition w: prod_l C(sizes_l, w_l).
// Zero whenever some w_l exceeds the block size.
inline std::uint64_t capacity(const WeakComposition& w, std::span<const std::size_t> sizes) {
  if (sizes.size() != static_cast<std::size_t>(w.parts())) {
    throw std::invalid_argument("capacity: block size vector has wrong length");
  }
  std::uint64_t out = 1;
  for (int l = 0; l < w.parts(); ++l) {
    const std::uint64_t c = binomial(sizes[static_cast<std::size_t>(l)],
                                     static_cast<std::uint64_t>(w[l]));
    if (c == 0) return 0;
    out = details::mul_or_throw(out, c);
  }
  return out;
}

// Floating point capacity, used in likelihood and divergence weights.
inline double capacity_real(std::span<const int> w, std::span<const double> sizes) {
  double out = 1.0;
  for (std::size_t l = 0; l < w.size(); ++l) {
    out *= binomial_real(sizes[l], w[l]);
    if (out == 0.0) return 0.0;
  }
  return out;
}

}  // namespace hsbm
