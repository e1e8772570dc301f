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
 * Information-theoretic quantities that govern exact recovery.
 *
 * The generalized Chernoff-Hellinger divergence between communities j and k
 * is
 *
 *   D(j,k) = max_{t ∈ [0,1]} Σ_m Σ_{w ∈ WC(m-1,K)} c_w [ t P_{j⊕w} + (1-t) P_{k⊕w}
 *                                                       - P_{j⊕w}^t P_{k⊕w}^(1-t) ]
 *
 * with weights c_w = n̄_w / C(n-1, m-1) and n̄_w = Π_l C(⌊α_l n⌋, w_l). Exact
 * recovery is impossible when min_{j≠k} D(j,k) < 1 and achievable above 1.
 * The objective is concave in t, so a golden-section search plus the two
 * endpoints finds the maximum.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hsbm/combinatorics.hpp"
#include "hsbm/model.hpp"

namespace hsbm {

// KL(Bern(y) || Bern(q)) with 0 log 0 = 0.
inline double kl_bernoulli(double y, double q) {
  if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("kl_bernoulli: y outside [0, 1]");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("kl_bernoulli: q outside (0, 1)");
  double out = 0.0;
  if (y > 0.0) out += y * std::log(y / q);
  if (y < 1.0) out += (1.0 - y) * std::log((1.0 - y) / (1.0 - q));
  return out;
}

struct UnitMaximum {
  double argmax = 0.0;
  double value = 0.0;
};

// Maximum of a concave function on [0, 1]: golden-section search to `tol` in
// the argument, then compared against both endpoints.
inline UnitMaximum maximize_concave_unit(const std::function<double(double)>& f,
                                         double tol = 1e-9) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  UnitMaximum best{0.5 * (a + b), f(0.5 * (a + b))};
  for (double t : {0.0, 1.0}) {
    const double v = f(t);
    if (v > best.value) best = {t, v};
  }
  return best;
}

enum class GchWeights {
  kFiniteN,     // n̄_w / C(n-1, m-1) evaluated at the given n
  kAsymptotic,  // the n → ∞ limit (m-1)!/Π w_l! · Π α_l^{w_l}
};

namespace details {

inline double composition_weight(const WeakComposition& w, const CommunityPrior& alpha,
                                 std::size_t n, GchWeights mode) {
  const int m_minus_1 = w.order();
  if (mode == GchWeights::kFiniteN) {
    const auto sizes = alpha.expected_sizes(n);
    return capacity_real(w.counts(), sizes) /
           binomial_real(static_cast<double>(n - 1), m_minus_1);
  }
  double out = std::tgamma(m_minus_1 + 1.0);
  for (int l = 0; l < w.parts(); ++l) {
    out *= std::pow(alpha[l], w[l]) / std::tgamma(w[l] + 1.0);
  }
  return out;
}

// p^t q^(1-t), with the t → 0+ and t → 1- limits at the endpoints.
inline double geometric_mix(double p, double q, double t) {
  if (t <= 0.0) return p > 0.0 ? q : 0.0;
  if (t >= 1.0) return q > 0.0 ? p : 0.0;
  if (p == 0.0 || q == 0.0) return 0.0;
  return std::exp(t * std::log(p) + (1.0 - t) * std::log(q));
}

}  // namespace details

// One (weight, P_{j⊕w}, P_{k⊕w}) triple per composition and order.
struct DivergenceTerm {
  double weight;
  double p_j;
  double p_k;
};

// The t-objective of D(j,k), kept explicit so that callers (and tests) can
// evaluate it pointwise.
class GchObjective {
 public:
  GchObjective(int j, int k, const CommunityPrior& alpha, const TensorSet& unscaled,
               std::size_t n, GchWeights mode = GchWeights::kFiniteN) {
    const int K = unscaled.communities();
    if (alpha.communities() != K) {
      throw std::invalid_argument("prior and tensors disagree on K");
    }
    if (j < 0 || k < 0 || j >= K || k >= K || j == k) {
      throw std::invalid_argument("divergence needs two distinct communities");
    }
    if (mode == GchWeights::kFiniteN && n < static_cast<std::size_t>(unscaled.max_order()) + 1) {
      throw std::invalid_argument("divergence needs n >= max order + 1");
    }
    for (int m : unscaled.orders()) {
      for (const auto& w : enumerate_weak_compositions(m - 1, K)) {
        const double c = details::composition_weight(w, alpha, n, mode);
        if (c == 0.0) continue;
        terms_.push_back({c, unscaled.at(oplus(j, w)), unscaled.at(oplus(k, w))});
      }
    }
  }

  double operator()(double t) const {
    double total = 0.0;
    for (const auto& term : terms_) {
      total += term.weight * (t * term.p_j + (1.0 - t) * term.p_k -
                              details::geometric_mix(term.p_j, term.p_k, t));
    }
    return total;
  }

  // d/dt of the objective on (0, 1); its root is the optimal t.
  double derivative(double t) const {
    double total = 0.0;
    for (const auto& term : terms_) {
      double mix_slope = 0.0;
      if (term.p_j > 0.0 && term.p_k > 0.0) {
        mix_slope = details::geometric_mix(term.p_j, term.p_k, t) * std::log(term.p_j / term.p_k);
      }
      total += term.weight * (term.p_j - term.p_k - mix_slope);
    }
    return total;
  }

  const std::vector<DivergenceTerm>& terms() const { return terms_; }

 private:
  std::vector<DivergenceTerm> terms_;
};

struct GchPair {
  int j = 0;
  int k = 1;
  double value = 0.0;
  double t_star = 0.5;
};

struct GchResult {
  std::vector<GchPair> pairs;  // all j < k, row-major
  double global = 0.0;
  int argmin_j = 0;
  int argmin_k = 1;
};

inline GchPair gch_pair(int j, int k, const CommunityPrior& alpha, const TensorSet& unscaled,
                        std::size_t n, GchWeights mode = GchWeights::kFiniteN) {
  const GchObjective objective(j, k, alpha, unscaled, n, mode);
  const auto best = maximize_concave_unit(objective);
  return {j, k, std::max(best.value, 0.0), best.argmax};
}

inline GchResult gch_global(const CommunityPrior& alpha, const TensorSet& unscaled, std::size_t n,
                            GchWeights mode = GchWeights::kFiniteN) {
  const int K = unscaled.communities();
  if (K < 2) throw std::invalid_argument("gch_global needs K >= 2");
  GchResult out;
  out.global = std::numeric_limits<double>::infinity();
  for (int j = 0; j < K; ++j) {
    for (int k = j + 1; k < K; ++k) {
      out.pairs.push_back(gch_pair(j, k, alpha, unscaled, n, mode));
      if (out.pairs.back().value < out.global) {
        out.global = out.pairs.back().value;
        out.argmin_j = j;
        out.argmin_k = k;
      }
    }
  }
  return out;
}

// Generalized KL divergence between communities j and k for edge
// probabilities Q. Evaluated through its Lagrange dual
//
//   max_{λ ∈ [0,1]} Σ_m Σ_w n̄_w · ( -log[ Q_j^λ Q_k^(1-λ) + (1-Q_j)^λ (1-Q_k)^(1-λ) ] ),
//
// whose inner minimizer is the exponential-family interpolation between
// Bern(Q_j) and Bern(Q_k). In the sparse regime this is D(j,k) · log n.
inline double gkl_pair(int j, int k, const ProbabilityTensorSet& q, const CommunityPrior& alpha,
                       std::size_t n) {
  const int K = q.communities();
  if (j < 0 || k < 0 || j >= K || k >= K || j == k) {
    throw std::invalid_argument("divergence needs two distinct communities");
  }
  const auto sizes = alpha.expected_sizes(n);
  std::vector<DivergenceTerm> terms;
  for (int m : q.orders()) {
    for (const auto& w : enumerate_weak_compositions(m - 1, K)) {
      const double c = capacity_real(w.counts(), sizes);
      if (c == 0.0) continue;
      terms.push_back({c, q.at(oplus(j, w)), q.at(oplus(k, w))});
    }
  }
  auto dual = [&](double lambda) {
    double total = 0.0;
    for (const auto& term : terms) {
      const double mass = details::geometric_mix(term.p_j, term.p_k, lambda) +
                          details::geometric_mix(1.0 - term.p_j, 1.0 - term.p_k, lambda);
      if (mass <= 0.0) return std::numeric_limits<double>::infinity();
      total -= term.weight * std::log(mass);
    }
    return total;
  };
  return std::max(maximize_concave_unit(dual).value, 0.0);
}

enum class Regime { kImpossible, kCritical, kAchievable };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::kImpossible:
      return "impossible";
    case Regime::kCritical:
      return "critical";
    case Regime::kAchievable:
      return "achievable";
  }
  return "?";
}

struct RegimeVerdict {
  double value = 0.0;
  Regime regime = Regime::kCritical;
};

inline RegimeVerdict classify_regime(double divergence, double tol = 1e-3) {
  if (!(tol > 0.0)) throw std::invalid_argument("classify_regime: tol must be > 0");
  if (divergence > 1.0 + tol) return {divergence, Regime::kAchievable};
  if (divergence < 1.0 - tol) return {divergence, Regime::kImpossible};
  return {divergence, Regime::kCritical};
}

inline RegimeVerdict classify_regime(const GchResult& gch, double tol = 1e-3) {
  return classify_regime(gch.global, tol);
}

// Expected-center separation check. For each pair j != k, the largest over l
// of (n/ρ_n) |Σ_m Σ_{w ∈ WC(m-2,K)} n̄_w (Q_{j⊕l⊕w} - Q_{k⊕l⊕w})|, and whether
// it reaches eps.
struct SeparationTable {
  std::vector<std::vector<double>> margin;  // K x K, diagonal 0
  std::vector<std::vector<bool>> separated;  // K x K, diagonal false
  double rho = 0.0;
};

inline SeparationTable check_separation(const ProbabilityTensorSet& q, const CommunityPrior& alpha,
                                        std::size_t n, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("check_separation: eps must be > 0");
  const int K = q.communities();
  const auto sizes = alpha.expected_sizes(n);
  SeparationTable out;
  out.rho = max_expected_degree(alpha, q, n);
  out.margin.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(K), 0.0));
  out.separated.assign(static_cast<std::size_t>(K), std::vector<bool>(static_cast<std::size_t>(K), false));
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) {
      if (j == k) continue;
      double best = 0.0;
      for (int l = 0; l < K; ++l) {
        double diff = 0.0;
        for (int m : q.orders()) {
          for (const auto& w : enumerate_weak_compositions(m - 2, K)) {
            const double c = capacity_real(w.counts(), sizes);
            if (c == 0.0) continue;
            diff += c * (q.at(oplus(j, oplus(l, w))) - q.at(oplus(k, oplus(l, w))));
          }
        }
        best = std::max(best, std::abs(diff));
      }
      const double scaled = out.rho > 0.0 ? static_cast<double>(n) / out.rho * best : 0.0;
      out.margin[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = scaled;
      out.separated[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = scaled >= eps;
    }
  }
  return out;
}

// max over m and w, w' ∈ WC(m,K) of Q_w / Q_w'. Infinity when any entry is 0.
inline double check_prob_ratio(const TensorSet& q) {
  double out = 1.0;
  for (int m : q.orders()) {
    const double lo = q.layer_min(m);
    const double hi = q.layer_max(m);
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    out = std::max(out, hi / lo);
  }
  return out;
}

}  // namespace hsbm
