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
 * Leading eigenpairs of symmetric matrices.
 *
 * Lanczos with full reorthogonalization against the whole Krylov basis; small
 * problems go to a dense solver instead. When the Krylov space becomes
 * invariant before enough steps were taken, the iteration restarts from a
 * fresh random vector orthogonal to the basis so repeated eigenvalues are not
 * silently dropped.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hsbm/adjacency.hpp"
#include "hsbm/errors.hpp"
#include "hsbm/random.hpp"

namespace hsbm {

enum class EigenMethod { kAuto, kLanczos, kDense };

struct EigenOptions {
  double tol = 1e-8;  // relative residual ‖Ax - θx‖ / max|θ|
  int max_iter = 5000;
  EigenMethod method = EigenMethod::kAuto;
  std::size_t dense_cutoff = 200;  // kAuto uses the dense solver up to this n
  std::uint64_t seed = 0x1a2b3c4d5e6f7788ULL;
};

// K leading eigenpairs, λ_1 >= ... >= λ_K, of a symmetric matrix.
struct LowRankApprox {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // n x K, orthonormal columns

  int rank() const { return static_cast<int>(values.size()); }

  // Row i of Σ λ_r u_r u_r^T.
  Eigen::VectorXd row(Eigen::Index i) const {
    return vectors * values.cwiseProduct(vectors.row(i).transpose());
  }

  Eigen::MatrixXd reconstruct() const {
    return vectors * values.asDiagonal() * vectors.transpose();
  }

  // Squared Euclidean distance between rows u and v of the reconstruction,
  // computed in the K-dimensional embedding: ‖Λ (U_u - U_v)‖².
  double row_distance_sq(Eigen::Index u, Eigen::Index v) const {
    double out = 0.0;
    for (Eigen::Index r = 0; r < values.size(); ++r) {
      const double d = values(r) * (vectors(u, r) - vectors(v, r));
      out += d * d;
    }
    return out;
  }
};

namespace details {

inline LowRankApprox top_from_dense(const Eigen::MatrixXd& a, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense symmetric eigensolver failed", 0.0);
  }
  const Eigen::Index n = a.rows();
  LowRankApprox out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (int r = 0; r < k; ++r) {
    out.values(r) = solver.eigenvalues()(n - 1 - r);
    out.vectors.col(r) = solver.eigenvectors().col(n - 1 - r);
  }
  return out;
}

inline void orthogonalize(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) w -= b.dot(w) * b;
  }
}

template <typename Apply>
LowRankApprox lanczos_top(const Apply& apply, Eigen::Index n, int k, const EigenOptions& opts) {
  Engine engine(opts.seed);
  std::normal_distribution<double> gauss;
  auto random_unit = [&](const std::vector<Eigen::VectorXd>& basis) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(engine);
      orthogonalize(v, basis);
      const double norm = v.norm();
      if (norm > 1e-8) return Eigen::VectorXd(v / norm);
    }
    throw ConvergenceError("could not extend Krylov basis", 0.0);
  };

  const Eigen::Index max_dim = std::min<Eigen::Index>(n, std::max(opts.max_iter, k));
  const Eigen::Index min_dim = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * k + 20, 40));

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples basis[j] and basis[j+1]
  basis.push_back(random_unit(basis));
  Eigen::VectorXd w(n);
  double last_residual = 0.0;

  for (Eigen::Index j = 0;; ++j) {
    apply(basis.back(), w);
    const double a = basis.back().dot(w);
    w -= a * basis.back();
    if (j > 0) w -= beta.back() * basis[basis.size() - 2];
    orthogonalize(w, basis);
    const double b = w.norm();
    alpha.push_back(a);
    const Eigen::Index dim = j + 1;

    const bool exhausted = dim == n || dim == max_dim;
    if (dim >= k && (dim >= min_dim || exhausted) && (dim % 4 == 0 || exhausted || b < 1e-10)) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), dim);
      Eigen::VectorXd sub(std::max<Eigen::Index>(dim - 1, 0));
      for (Eigen::Index i = 0; i + 1 < dim; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const auto& theta = tri.eigenvalues();
      const double scale = std::max({std::abs(theta(0)), std::abs(theta(dim - 1)), 1e-300});
      bool converged = true;
      last_residual = 0.0;
      for (int r = 0; r < k; ++r) {
        const double res = std::abs(b * tri.eigenvectors()(dim - 1, dim - 1 - r)) / scale;
        last_residual = std::max(last_residual, res);
        if (res > opts.tol) converged = false;
      }
      if (converged || dim == n) {
        LowRankApprox out;
        out.values.resize(k);
        out.vectors = Eigen::MatrixXd::Zero(n, k);
        for (int r = 0; r < k; ++r) {
          out.values(r) = theta(dim - 1 - r);
          const auto s = tri.eigenvectors().col(dim - 1 - r);
          for (Eigen::Index i = 0; i < dim; ++i) out.vectors.col(r) += s(i) * basis[static_cast<std::size_t>(i)];
          out.vectors.col(r).normalize();
        }
        return out;
      }
      if (exhausted) {
        throw ConvergenceError("Lanczos did not converge within the iteration budget",
                               last_residual);
      }
    }
    if (b < 1e-10 * std::max(1.0, std::abs(a))) {
      // Invariant subspace: continue from a fresh direction.
      beta.push_back(0.0);
      basis.push_back(random_unit(basis));
    } else {
      beta.push_back(b);
      basis.push_back(w / b);
    }
  }
}

}  // namespace details

inline LowRankApprox rank_k_approx(const Eigen::MatrixXd& a, int k, const EigenOptions& opts = {}) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("rank_k_approx: matrix must be square");
  if (k < 0 || k > n) throw std::invalid_argument("rank_k_approx: need 0 <= K <= n");
  if (k == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(n, 0)};
  const bool dense = opts.method == EigenMethod::kDense ||
                     (opts.method == EigenMethod::kAuto && static_cast<std::size_t>(n) <= opts.dense_cutoff);
  if (dense) return details::top_from_dense(a, k);
  return details::lanczos_top(
      [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = a * x; }, n, k, opts);
}

inline LowRankApprox rank_k_approx(const AdjacencyMatrix& a, int k, const EigenOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (k < 0 || k > n) throw std::invalid_argument("rank_k_approx: need 0 <= K <= n");
  if (k == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(n, 0)};
  const bool dense = opts.method == EigenMethod::kDense ||
                     (opts.method == EigenMethod::kAuto && a.size() <= opts.dense_cutoff);
  if (dense) return details::top_from_dense(a.to_dense(), k);
  return details::lanczos_top(
      [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        a.multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                   std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
      },
      n, k, opts);
}

}  // namespace hsbm
