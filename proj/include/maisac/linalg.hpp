#pragma once

// Cyclic Jacobi eigensolver for small complex Hermitian matrices and the
// PSD projections built on it.

#include "maisac/core.hpp"

#include <algorithm>
#include <numeric>
#include <span>

namespace maisac {

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // unitary, column i pairs with values(i)
};

namespace detail {

inline double off_diagonal_norm2(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

}  // namespace detail

// Cyclic-sweep Jacobi. Each rotation first removes the phase of a(p,q) and
// then applies a real Givens rotation, so the accumulated transform stays
// unitary. Throws NumericalError if `max_sweeps` sweeps do not converge.
inline EigenDecomposition hermitian_eig(const CMatrix& input, int max_sweeps = 64) {
  CMatrix a = symmetrized(input, "hermitian_eig input");
  const Eigen::Index n = a.rows();
  CMatrix v = CMatrix::Identity(n, n);

  const double scale2 = std::max(a.squaredNorm(), std::numeric_limits<double>::min());
  const double eps2 = 1e-28 * scale2;

  bool converged = n <= 1;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    if (detail::off_diagonal_norm2(a) <= eps2) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const Complex phase = apq / r;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
        const Complex gpp = c;
        const Complex gpq = s;
        const Complex gqp = -s * std::conj(phase);
        const Complex gqq = c * std::conj(phase);
        for (Eigen::Index i = 0; i < n; ++i) {
          const Complex aip = a(i, p);
          const Complex aiq = a(i, q);
          a(i, p) = aip * gpp + aiq * gqp;
          a(i, q) = aip * gpq + aiq * gqq;
          const Complex vip = v(i, p);
          const Complex viq = v(i, q);
          v(i, p) = vip * gpp + viq * gqp;
          v(i, q) = vip * gpq + viq * gqq;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          const Complex apj = a(p, j);
          const Complex aqj = a(q, j);
          a(p, j) = std::conj(gpp) * apj + std::conj(gqp) * aqj;
          a(q, j) = std::conj(gpq) * apj + std::conj(gqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (!converged && detail::off_diagonal_norm2(a) > eps2) {
    throw NumericalError("hermitian_eig: Jacobi sweeps did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]).real();
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

inline CMatrix reassemble(const RVector& values, const CMatrix& vectors) {
  return vectors * values.asDiagonal() * vectors.adjoint();
}

// Nearest PSD matrix in Frobenius norm.
inline CMatrix psd_project(const CMatrix& a) {
  auto eig = hermitian_eig(a);
  return reassemble(eig.values.cwiseMax(0.0), eig.vectors);
}

inline double min_eigenvalue(const CMatrix& a) {
  if (a.rows() == 0) return 0.0;
  return hermitian_eig(a).values(0);
}

// Number of eigenvalues above kRankTol * lambda_max.
inline int numerical_rank(const CMatrix& a, double rel_tol = kRankTol) {
  if (a.rows() == 0) return 0;
  const auto eig = hermitian_eig(a);
  const double top = eig.values.maxCoeff();
  if (top <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > rel_tol * top) ++r;
  return r;
}

// Euclidean projection of a real vector onto {v >= 0, sum(v) <= budget}.
inline void project_capped_simplex(std::span<double> v, double budget) {
  double clipped_sum = 0.0;
  for (double x : v) clipped_sum += std::max(x, 0.0);
  if (clipped_sum <= budget) {
    for (double& x : v) x = std::max(x, 0.0);
    return;
  }
  // Find tau >= 0 with sum(max(v - tau, 0)) = budget.
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    prefix += sorted[i];
    const double candidate = (prefix - budget) / static_cast<double>(i + 1);
    if (i + 1 == sorted.size() || sorted[i + 1] <= candidate) {
      tau = candidate;
      break;
    }
  }
  for (double& x : v) x = std::max(x - tau, 0.0);
}

// Projects a block-diagonal Hermitian variable onto
// {X_i PSD, sum_i tr(X_i) <= budget}. The set is unitarily invariant per
// block, so the projection acts on the pooled eigenvalues only.
inline void project_budgeted_psd(std::vector<CMatrix>& blocks, double budget) {
  std::vector<EigenDecomposition> eigs;
  eigs.reserve(blocks.size());
  std::vector<double> pooled;
  for (const auto& b : blocks) {
    eigs.push_back(hermitian_eig(b));
    for (Eigen::Index i = 0; i < eigs.back().values.size(); ++i) pooled.push_back(eigs.back().values(i));
  }
  project_capped_simplex(pooled, budget);
  std::size_t at = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& e = eigs[b];
    for (Eigen::Index i = 0; i < e.values.size(); ++i) e.values(i) = pooled[at++];
    blocks[b] = reassemble(e.values, e.vectors);
  }
}

}  // namespace maisac
