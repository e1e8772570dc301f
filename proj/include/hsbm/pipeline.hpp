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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hsbm/adjacency.hpp"
#include "hsbm/eigensolver.hpp"
#include "hsbm/errors.hpp"
#include "hsbm/model.hpp"
#include "hsbm/refinement.hpp"
#include "hsbm/spectral.hpp"

namespace hsbm {

// ---------------------------------------------------------------------------
// Mismatch ratio

struct Matching {
  std::vector<int> assignment;  // row a -> column assignment[a]
  std::int64_t weight = 0;
};

namespace details {

inline Matching max_matching_bruteforce(const std::vector<std::vector<std::int64_t>>& w) {
  const int k = static_cast<int>(w.size());
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  Matching best{perm, std::numeric_limits<std::int64_t>::min()};
  do {
    std::int64_t total = 0;
    for (int a = 0; a < k; ++a) total += w[static_cast<std::size_t>(a)][static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
    if (total > best.weight) best = {perm, total};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Maximum-weight perfect matching on a square matrix (Hungarian method with
// potentials, O(K^3)).
inline Matching max_matching_hungarian(const std::vector<std::vector<std::int64_t>>& w) {
  const int k = static_cast<int>(w.size());
  if (k == 0) return {};
  std::int64_t top = 0;
  for (const auto& row : w) {
    for (auto x : row) top = std::max(top, x);
  }
  // cost = top - w, 1-based arrays as in the textbook formulation
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(static_cast<std::size_t>(k) + 1, 0), v(static_cast<std::size_t>(k) + 1, 0);
  std::vector<int> p(static_cast<std::size_t>(k) + 1, 0), way(static_cast<std::size_t>(k) + 1, 0);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(static_cast<std::size_t>(k) + 1, kInf);
    std::vector<bool> used(static_cast<std::size_t>(k) + 1, false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = p[static_cast<std::size_t>(j0)];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const std::int64_t cost = top - w[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)];
        const std::int64_t cur = cost - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  Matching out;
  out.assignment.assign(static_cast<std::size_t>(k), 0);
  for (int j = 1; j <= k; ++j) {
    out.assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  for (int a = 0; a < k; ++a) {
    out.weight += w[static_cast<std::size_t>(a)][static_cast<std::size_t>(out.assignment[static_cast<std::size_t>(a)])];
  }
  return out;
}

}  // namespace details

struct MismatchResult {
  double eta = 0.0;
  std::vector<int> permutation;  // true label a is matched to estimated label permutation[a]
};

enum class MatchingMethod { kAuto, kBruteForce, kHungarian };

// η = (1/n) min_π Hamming(π∘z, ẑ). Exhaustive over permutations for K <= 6,
// Hungarian method otherwise (or as requested).
inline MismatchResult mismatch_ratio(std::span<const int> z, std::span<const int> z_hat,
                                     MatchingMethod method = MatchingMethod::kAuto) {
  if (z.size() != z_hat.size()) throw std::invalid_argument("mismatch_ratio: length mismatch");
  int k = 1;
  for (int l : z) k = std::max(k, l + 1);
  for (int l : z_hat) k = std::max(k, l + 1);
  for (int l : z) {
    if (l < 0) throw std::invalid_argument("mismatch_ratio: negative label");
  }
  for (int l : z_hat) {
    if (l < 0) throw std::invalid_argument("mismatch_ratio: negative label");
  }
  std::vector<std::vector<std::int64_t>> confusion(static_cast<std::size_t>(k),
                                                   std::vector<std::int64_t>(static_cast<std::size_t>(k), 0));
  for (std::size_t v = 0; v < z.size(); ++v) {
    ++confusion[static_cast<std::size_t>(z[v])][static_cast<std::size_t>(z_hat[v])];
  }
  const bool brute = method == MatchingMethod::kBruteForce ||
                     (method == MatchingMethod::kAuto && k <= 6);
  const Matching m = brute ? details::max_matching_bruteforce(confusion)
                           : details::max_matching_hungarian(confusion);
  MismatchResult out;
  out.permutation = m.assignment;
  out.eta = z.empty() ? 0.0
                      : static_cast<double>(static_cast<std::int64_t>(z.size()) - m.weight) /
                            static_cast<double>(z.size());
  return out;
}

inline MismatchResult mismatch_ratio(const MembershipVector& z, const MembershipVector& z_hat,
                                     MatchingMethod method = MatchingMethod::kAuto) {
  return mismatch_ratio(z.labels(), z_hat.labels(), method);
}

// ---------------------------------------------------------------------------
// Pipelines

struct RecoveryReport {
  MembershipVector estimate;
  MembershipVector stage1;        // ẑ⁽⁰⁾
  std::size_t kept = 0;           // |J|
  int iterations = 0;             // refinement sweeps (MAP counts as one)
  double radius = 0.0;
  std::optional<double> eta;      // set by score()
  std::optional<double> eta_stage1;
  std::vector<int> permutation;
};

// Fills the mismatch fields against a ground truth.
inline void score(RecoveryReport& report, const MembershipVector& truth) {
  const auto final_match = mismatch_ratio(truth, report.estimate);
  report.eta = final_match.eta;
  report.permutation = final_match.permutation;
  report.eta_stage1 = mismatch_ratio(truth, report.stage1).eta;
}

struct PipelineOptions {
  EigenOptions eigen;
  std::optional<double> radius;  // overrides the derived ball radius
  bool split_adjust = true;      // MAP on H⁽¹⁾ uses Q (1 - θ/log n)
};

inline RecoveryReport agnostic_partition(const NonUniformHypergraph& h, int K, std::uint64_t seed,
                                         const PipelineOptions& opts = {}) {
  if (K < 1) throw std::invalid_argument("agnostic_partition: K must be >= 1");
  const std::size_t n = h.vertex_count();
  RecoveryReport report;
  if (K == 1) {
    report.estimate = MembershipVector(std::vector<int>(n, 0), 1);
    report.stage1 = report.estimate;
    report.kept = n;
    report.iterations = 1;
    return report;
  }
  const auto a = adjacency_matrix(h);
  const auto degrees = h.degrees();
  const auto trimmed = trim(a, degrees, TrimRule::largest_degrees());
  report.radius = opts.radius ? *opts.radius : default_radius(mean_degree(degrees), n);
  const auto init =
      spectral_init(trimmed.matrix, trimmed.kept, K, report.radius, derive_seed(seed, 10), opts.eigen);
  report.kept = static_cast<std::size_t>(std::count(trimmed.kept.begin(), trimmed.kept.end(), true));
  report.stage1 = init.labels;
  auto refined = agnostic_refine(h, init.labels, K, derive_seed(seed, 11));
  report.estimate = std::move(refined.labels);
  report.iterations = refined.iterations;
  return report;
}

namespace details {

// Joint log-likelihood of (labels, H) under (α, Q).
inline double log_likelihood(const NonUniformHypergraph& h, std::span<const int> labels,
                             const TensorSet& q, const CommunityPrior& alpha) {
  const int K = q.communities();
  std::vector<double> sizes(static_cast<std::size_t>(K), 0.0);
  double out = 0.0;
  for (int l : labels) {
    sizes[static_cast<std::size_t>(l)] += 1.0;
    out += std::log(alpha[l]);
  }
  std::vector<int> w(static_cast<std::size_t>(K));
  std::map<int, std::vector<std::int64_t>> counts;
  for (int m : h.orders()) counts[m].assign(weak_composition_count(m, K), 0);
  h.for_each_edge([&](int m, std::span<const Vertex> e) {
    std::fill(w.begin(), w.end(), 0);
    for (Vertex v : e) ++w[static_cast<std::size_t>(labels[v])];
    ++counts[m][composition_index(w)];
  });
  for (int m : q.orders()) {
    const auto comps = enumerate_weak_compositions(m, K);
    const auto it = counts.find(m);
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const double cap = capacity_real(comps[i].counts(), sizes);
      const double e = it == counts.end() ? 0.0 : static_cast<double>(it->second[i]);
      const double p = q.at(comps[i]);
      if (e > 0) out += e * std::log(p);
      if (cap - e > 0) out += (cap - e) * std::log1p(-p);
    }
  }
  return out;
}

// Relabels the stage-one estimate so that its label indices line up with the
// indices of the known tensors: the permutation maximizing the joint
// likelihood of H⁽⁰⁾. Exhaustive, so only attempted for K <= 8.
inline MembershipVector align_to_tensors(const NonUniformHypergraph& h0, const MembershipVector& z0,
                                         const TensorSet& q0, const CommunityPrior& alpha) {
  const int K = z0.communities();
  if (K > 8) return z0;
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> relabeled(z0.size());
  do {
    for (std::size_t v = 0; v < z0.size(); ++v) relabeled[v] = perm[static_cast<std::size_t>(z0[v])];
    const double ll = log_likelihood(h0, relabeled, q0, alpha);
    if (ll > best) {
      best = ll;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (std::size_t v = 0; v < z0.size(); ++v) relabeled[v] = best_perm[static_cast<std::size_t>(z0[v])];
  return MembershipVector(std::move(relabeled), K);
}

}  // namespace details

inline double split_theta(std::size_t n) { return std::log(std::log(static_cast<double>(n))); }

inline RecoveryReport partition_with_prior(const NonUniformHypergraph& h, int K,
                                           const ProbabilityTensorSet& q,
                                           const CommunityPrior& alpha, std::uint64_t seed,
                                           const PipelineOptions& opts = {}) {
  const std::size_t n = h.vertex_count();
  if (n < 16) {
    throw std::invalid_argument("partition_with_prior: needs n >= 16 so that log log n < log n");
  }
  if (q.communities() != K || alpha.communities() != K) {
    throw std::invalid_argument("partition_with_prior: K mismatch");
  }
  details::require_open_unit(q, "partition_with_prior");
  const double theta = split_theta(n);
  const auto pair = split(h, theta, derive_seed(seed, 20));
  const double ratio = pair.retention;

  RecoveryReport report;
  const ProbabilityTensorSet q0(q.scaled([ratio](int) { return ratio; }));
  if (K == 1) {
    report.stage1 = MembershipVector(std::vector<int>(n, 0), 1);
  } else {
    double d_max = 0.0;
    for (int m : q.orders()) {
      d_max += q.layer_max(m) * binomial_real(static_cast<double>(n - 1), m - 1) * ratio;
    }
    const auto a0 = adjacency_matrix(pair.initial);
    const auto degrees0 = pair.initial.degrees();
    const auto trimmed = trim(a0, degrees0, TrimRule::degree_cap(d_max, q.max_order()));
    report.kept = static_cast<std::size_t>(std::count(trimmed.kept.begin(), trimmed.kept.end(), true));
    report.radius = opts.radius ? *opts.radius : default_radius(max_expected_degree(alpha, q0, n), n);
    const auto init = spectral_init(trimmed.matrix, trimmed.kept, K, report.radius,
                                    derive_seed(seed, 21), opts.eigen);
    report.stage1 = details::align_to_tensors(pair.initial, init.labels, q0, alpha);
  }
  const ProbabilityTensorSet q1 =
      opts.split_adjust ? ProbabilityTensorSet(q.scaled([ratio](int) { return 1.0 - ratio; })) : q;
  report.estimate = map_correct(pair.correction, report.stage1, q1, alpha);
  report.iterations = 1;
  if (report.kept == 0) report.kept = n;
  return report;
}

// ---------------------------------------------------------------------------
// Number of communities

struct CommunityCountEstimate {
  int k_hat = 0;
  double threshold = 0.0;            // d̃^{3/4}
  double max_degree = 0.0;           // d̃
  std::vector<double> eigenvalues;   // computed leading eigenvalues, descending
  bool crossed = false;              // some computed λ_r fell below the threshold
};

struct CommunityCountOptions {
  bool full_spectrum = false;  // all n eigenvalues; n <= 200 only
  EigenOptions eigen;
};

// K̂ = r - 1 for the first r with λ_r(A) <= d̃^{3/4}, d̃ the maximum degree.
// Only the leading min(n, ⌈log n⌉ + 5) eigenvalues are computed; if none of
// them falls below the threshold, K̂ is the number computed.
inline CommunityCountEstimate estimate_num_communities(const NonUniformHypergraph& h,
                                                       const CommunityCountOptions& opts = {}) {
  const std::size_t n = h.vertex_count();
  if (n == 0) throw std::invalid_argument("estimate_num_communities: empty hypergraph");
  const auto degrees = h.degrees();
  const auto d_tilde = static_cast<double>(*std::max_element(degrees.begin(), degrees.end()));
  if (d_tilde <= 0.0) throw DegenerateDegreeError("estimate_num_communities: maximum degree is 0");
  CommunityCountEstimate out;
  out.max_degree = d_tilde;
  out.threshold = std::pow(d_tilde, 0.75);

  const auto a = adjacency_matrix(h);
  int count = 0;
  if (opts.full_spectrum) {
    if (n > 200) throw std::invalid_argument("estimate_num_communities: full spectrum needs n <= 200");
    count = static_cast<int>(n);
  } else {
    count = static_cast<int>(std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)))) + 5));
  }
  const auto top = rank_k_approx(a, count, opts.eigen);
  for (int r = 0; r < count; ++r) out.eigenvalues.push_back(top.values(r));
  out.k_hat = count;
  for (int r = 0; r < count; ++r) {
    if (out.eigenvalues[static_cast<std::size_t>(r)] <= out.threshold) {
      out.k_hat = r;  // r is 0-based: λ_{r+1} is the first below, K̂ = r
      out.crossed = true;
      break;
    }
  }
  return out;
}

}  // namespace hsbm
