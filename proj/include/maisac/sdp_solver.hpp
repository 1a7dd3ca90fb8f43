#pragma once

// Small dense solver for concave "log2 of affine" programs over Hermitian PSD
// matrix variables:
//
//   maximize   sum_i w_i log2(a_i(X)) + sum_v Re tr(G_v X_v) + c
//   subject to X_v PSD, sum_v tr(X_v) <= budget, b_j(X) >= 0
//
// Primal log-barrier method. The cones get -log det barriers and every affine
// inequality (the trace budget included) a -log barrier. Each barrier weight
// is centered with damped Newton steps, then multiplied by `barrier_decay`
// until (barrier parameter) * weight <= gap_tol.
//
// In coordinates scaled by the Cholesky factors of the current iterate the
// Newton matrix is mu * I plus a rank-r term from the log objective terms and
// the affine barriers, so each step needs one thin QR and an r x r eigensolve.

#include "maisac/core.hpp"
#include "maisac/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <limits>
#include <optional>
#include <utility>

namespace maisac {

// constant + sum over (var, C) of Re tr(C X_var)
struct AffineForm {
  std::vector<std::pair<int, CMatrix>> terms;
  double constant = 0.0;

  double eval(const std::vector<CMatrix>& x) const {
    double v = constant;
    for (const auto& [var, c] : terms) v += trace_inner(c, x[static_cast<std::size_t>(var)]);
    return v;
  }
};

struct LogTerm {
  AffineForm arg;
  double weight = 1.0;  // multiplies log2(arg); must be >= 0
};

struct SolverSettings {
  double gap_tol = 1e-8;        // target on the final duality-gap bound
  double initial_barrier = 1.0;  // times (start suboptimality bound) / (barrier parameter)
  double barrier_decay = 0.5;
  int max_iterations = 2000;    // Newton steps over all barrier stages
  int max_backtracks = 60;
};

struct ConicProblem {
  int num_vars = 0;
  int dim = 0;
  std::vector<LogTerm> log_terms;
  std::vector<CMatrix> linear;  // per variable; empty vector means zero
  double constant = 0.0;
  std::optional<double> trace_budget;
  std::vector<AffineForm> inequalities;  // each must stay > 0
  SolverSettings settings;
};

struct SolveResult {
  std::vector<CMatrix> x;
  double objective = 0.0;
  double gap_estimate = 0.0;
  int iterations = 0;
};

class InfeasibleStartError : public Error {
 public:
  using Error::Error;
};

class MaxIterationsError : public Error {
 public:
  MaxIterationsError(const std::string& what, SolveResult best) : Error(what), best_(std::move(best)) {}
  const SolveResult& best_so_far() const noexcept { return best_; }

 private:
  SolveResult best_;
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Blocks = std::vector<CMatrix>;

// Objective without barrier; -inf outside the log domain.
inline double conic_objective(const ConicProblem& p, const Blocks& x) {
  double v = p.constant;
  for (const auto& t : p.log_terms) {
    const double a = t.arg.eval(x);
    if (!(a > 0.0)) return kNegInf;
    v += t.weight * std::log2(a);
  }
  for (std::size_t i = 0; i < p.linear.size(); ++i)
    if (p.linear[i].size() != 0) v += trace_inner(p.linear[i], x[i]);
  return v;
}

inline double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += trace_inner(a[i], b[i]);
  return s;
}

inline Blocks dense(const AffineForm& f, int num_vars, int dim) {
  Blocks out(static_cast<std::size_t>(num_vars), CMatrix::Zero(dim, dim));
  for (const auto& [var, c] : f.terms) out[static_cast<std::size_t>(var)] += symmetrized(c, "affine form");
  return out;
}

// All affine inequalities, with the trace budget appended as one more.
inline std::vector<AffineForm> all_inequalities(const ConicProblem& p) {
  std::vector<AffineForm> out = p.inequalities;
  if (p.trace_budget) {
    AffineForm budget;
    budget.constant = *p.trace_budget;
    for (int v = 0; v < p.num_vars; ++v) budget.terms.emplace_back(v, -CMatrix::Identity(p.dim, p.dim));
    out.push_back(std::move(budget));
  }
  return out;
}

// Hermitian n x n <-> real n^2 vector, isometric for Re tr(A B).
inline Eigen::VectorXd hermitian_to_vec(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd out(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out[k++] = a(i, i).real();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex c = 0.5 * (a(i, j) + std::conj(a(j, i)));
      out[k++] = std::sqrt(2.0) * c.real();
      out[k++] = std::sqrt(2.0) * c.imag();
    }
  return out;
}

inline CMatrix vec_to_hermitian(const Eigen::VectorXd& v, Eigen::Index n) {
  CMatrix out(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = v[k++];
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex c(v[k] / std::sqrt(2.0), v[k + 1] / std::sqrt(2.0));
      k += 2;
      out(i, j) = c;
      out(j, i) = std::conj(c);
    }
  return out;
}

struct BarrierState {
  std::vector<Eigen::LLT<CMatrix>> chol;
  double value = kNegInf;
};

// f(x) + mu (sum log det X_v + sum log b_j(x)); -inf outside the domain.
inline BarrierState barrier_value(const ConicProblem& p, const std::vector<AffineForm>& ineq, const Blocks& x,
                                  double mu) {
  BarrierState st;
  double v = conic_objective(p, x);
  if (v == kNegInf) return st;
  st.chol.reserve(x.size());
  for (const auto& b : x) {
    st.chol.emplace_back(b);
    if (st.chol.back().info() != Eigen::Success) return st;
    const auto diag = st.chol.back().matrixLLT().diagonal().real();
    if ((diag.array() <= 0.0).any()) return st;
    v += 2.0 * mu * diag.array().log().sum();
  }
  for (const auto& g : ineq) {
    const double s = g.eval(x);
    if (!(s > 0.0)) return st;
    v += mu * std::log(s);
  }
  st.value = v;
  return st;
}

}  // namespace detail

inline double evaluate_objective(const ConicProblem& p, const std::vector<CMatrix>& x) {
  return detail::conic_objective(p, x);
}

// Gradient of the (barrier-free) objective.
inline std::vector<CMatrix> objective_gradient(const ConicProblem& p, const std::vector<CMatrix>& x) {
  std::vector<CMatrix> g(static_cast<std::size_t>(p.num_vars), CMatrix::Zero(p.dim, p.dim));
  for (std::size_t i = 0; i < p.linear.size(); ++i)
    if (p.linear[i].size() != 0) g[i] += p.linear[i];
  for (const auto& t : p.log_terms) {
    const double scale = t.weight / (kLn2 * t.arg.eval(x));
    for (const auto& [var, c] : t.arg.terms) g[static_cast<std::size_t>(var)] += scale * c;
  }
  return g;
}

inline SolveResult solve(const ConicProblem& p, const std::vector<CMatrix>& start) {
  using namespace detail;
  const auto& cfg = p.settings;
  if (static_cast<int>(start.size()) != p.num_vars) throw std::invalid_argument("solve: start has wrong variable count");
  for (const auto& b : start)
    if (b.rows() != p.dim || b.cols() != p.dim) throw std::invalid_argument("solve: start has wrong dimension");
  for (const auto& t : p.log_terms)
    if (t.weight < 0.0) throw std::invalid_argument("solve: negative log weight makes the problem non-concave");

  const std::vector<AffineForm> ineq = all_inequalities(p);
  const std::size_t nv = start.size();
  const int n = p.dim;

  // Feasibility of the start, up to rounding.
  Blocks x;
  x.reserve(nv);
  double start_trace = 0.0;
  for (const auto& b : start) {
    x.push_back(psd_project(symmetrized(b, "solver start")));
    start_trace += real_trace(x.back());
    if (min_eigenvalue(symmetrized(b, "solver start")) < -1e-9 * std::max(1.0, max_abs(b)))
      throw InfeasibleStartError("solve: start is not PSD");
  }
  if (p.trace_budget && start_trace > *p.trace_budget * (1.0 + 1e-9))
    throw InfeasibleStartError("solve: start exceeds trace budget");
  const double start_objective = conic_objective(p, start);
  if (conic_objective(p, x) == kNegInf) throw InfeasibleStartError("solve: log argument not positive at start");
  for (const auto& g : p.inequalities)
    if (!(g.eval(x) > 0.0)) throw InfeasibleStartError("solve: start is not strictly feasible");

  // Pull the start into the interior by mixing with a scaled identity, keeping
  // every strict inequality at least half as slack as it was.
  {
    const double scale = p.trace_budget ? 0.5 * *p.trace_budget / static_cast<double>(nv * static_cast<std::size_t>(n))
                                        : std::max(1.0, start_trace) / static_cast<double>(nv * static_cast<std::size_t>(n));
    Blocks centre(nv, scale * CMatrix::Identity(n, n));
    double eps = 1e-2;
    for (const auto& g : p.inequalities) {
      const double now = g.eval(x);
      const double there = g.eval(centre);
      if (there < now) eps = std::min(eps, 0.5 * now / (now - there));
    }
    for (const auto& t : p.log_terms) {
      const double now = t.arg.eval(x);
      const double there = t.arg.eval(centre);
      if (there < now) eps = std::min(eps, 0.5 * now / (now - there));
    }
    for (std::size_t v = 0; v < nv; ++v) x[v] = (1.0 - eps) * x[v] + eps * centre[v];
  }

  const double nu = static_cast<double>(nv * static_cast<std::size_t>(n) + ineq.size());
  // Initial weight from a bound on the start's suboptimality: over the budget
  // set, max <grad, Y - x> (inequalities ignored, so still an upper bound).
  double start_gap = std::max(1.0, std::abs(conic_objective(p, x)));
  if (p.trace_budget) {
    const Blocks g0 = objective_gradient(p, x);
    double top = 0.0;
    for (const auto& gv : g0) top = std::max(top, hermitian_eig(symmetrized(gv, "gradient")).values.maxCoeff());
    start_gap = std::max(start_gap * 1e-6, *p.trace_budget * top - inner(g0, x));
  }
  double mu = cfg.initial_barrier * start_gap / nu;
  BarrierState state = barrier_value(p, ineq, x, mu);
  if (state.value == kNegInf) throw InfeasibleStartError("solve: could not find an interior start");

  // Low-rank directions of the Hessian: log terms first, then inequalities.
  std::vector<Blocks> dirs;
  for (const auto& t : p.log_terms) dirs.push_back(dense(t.arg, p.num_vars, n));
  for (const auto& g : ineq) dirs.push_back(dense(g, p.num_vars, n));
  const std::size_t r = dirs.size();

  SolveResult result;
  int iterations = 0;
  double decrement = 0.0;
  auto finish = [&](double gap) {
    result.objective = conic_objective(p, x);
    result.x = x;
    result.gap_estimate = gap;
    result.iterations = iterations;
  };

  for (;;) {
    const bool final_stage = nu * mu <= 0.5 * cfg.gap_tol;
    for (;;) {
      if (iterations >= cfg.max_iterations) {
        finish(nu * mu + decrement);
        throw MaxIterationsError("solve: iteration cap reached", result);
      }

      // Work in scaled coordinates D_v = L_v Z_v L_v^H (X_v = L_v L_v^H), where
      // the log det Hessian is mu * I and the rest is V V^T with rank r.
      std::vector<CMatrix> chol_l(nv);
      for (std::size_t v = 0; v < nv; ++v) chol_l[v] = state.chol[v].matrixL();
      auto scaled = [&](const Blocks& g) {
        Eigen::VectorXd out(static_cast<Eigen::Index>(nv) * n * n);
        for (std::size_t v = 0; v < nv; ++v)
          out.segment(static_cast<Eigen::Index>(v) * n * n, n * n) =
              hermitian_to_vec(chol_l[v].adjoint() * g[v] * chol_l[v]);
        return out;
      };

      Blocks grad = objective_gradient(p, x);
      Eigen::MatrixXd cols(static_cast<Eigen::Index>(nv) * n * n, static_cast<Eigen::Index>(r));
      for (std::size_t i = 0; i < p.log_terms.size(); ++i) {
        const double a = p.log_terms[i].arg.eval(x);
        cols.col(static_cast<Eigen::Index>(i)) = std::sqrt(p.log_terms[i].weight / kLn2) / a * scaled(dirs[i]);
      }
      for (std::size_t j = 0; j < ineq.size(); ++j) {
        const double s = ineq[j].eval(x);
        const auto& u = dirs[p.log_terms.size() + j];
        for (std::size_t v = 0; v < nv; ++v) grad[v] += (mu / s) * u[v];
        cols.col(static_cast<Eigen::Index>(p.log_terms.size() + j)) = std::sqrt(mu) / s * scaled(u);
      }
      Eigen::VectorXd g = scaled(grad);
      for (std::size_t v = 0; v < nv; ++v)
        g.segment(static_cast<Eigen::Index>(v) * n * n, n).array() += mu;  // mu X^{-1} in scaled form

      // (mu I + V V^T)^{-1} g through a thin QR of V.
      Eigen::VectorXd z;
      if (r > 0) {
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(cols);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols.rows(), std::min<Eigen::Index>(cols.rows(), cols.cols()));
        const Eigen::MatrixXd rr = qr.matrixQR().topRows(q.cols()).template triangularView<Eigen::Upper>();
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rr * rr.transpose());
        const Eigen::VectorXd c = q.transpose() * g;
        const Eigen::VectorXd e = es.eigenvectors().transpose() * c;
        const Eigen::VectorXd inside = es.eigenvectors() * (e.array() / (mu + es.eigenvalues().array().max(0.0))).matrix();
        const Eigen::VectorXd rest = g - q * c;
        z = rest / mu + q * inside;
        decrement = rest.squaredNorm() / mu + c.dot(inside);
      } else {
        z = g / mu;
        decrement = g.squaredNorm() / mu;
      }
      Blocks d(nv);
      for (std::size_t v = 0; v < nv; ++v)
        d[v] = chol_l[v] * vec_to_hermitian(z.segment(static_cast<Eigen::Index>(v) * n * n, n * n), n) *
               chol_l[v].adjoint();

      const double centre_tol = final_stage ? 0.5 * cfg.gap_tol : 0.25 * nu * mu;
      if (!(decrement > centre_tol)) break;
      ++iterations;

      // Damped step: stay in the domain and ascend sufficiently.
      double t = 1.0;
      bool accepted = false;
      bool stalled = false;
      for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
        Blocks trial = x;
        for (std::size_t v = 0; v < nv; ++v) trial[v] += t * d[v];
        BarrierState next = barrier_value(p, ineq, trial, mu);
        if (next.value != kNegInf && next.value >= state.value + 0.25 * t * decrement) {
          stalled = next.value - state.value <= 1e-14 * std::max(1.0, std::abs(state.value));
          x = std::move(trial);
          state = std::move(next);
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted || stalled) break;  // at the rounding floor for this weight
    }
    if (final_stage) break;
    mu *= cfg.barrier_decay;
    state = barrier_value(p, ineq, x, mu);
  }

  finish(nu * mu + std::max(0.0, decrement));
  if (start_objective != kNegInf && result.objective < start_objective) {
    // Ascent guarantee: never hand back a point worse than the start.
    result.x.clear();
    for (const auto& b : start) result.x.push_back(psd_project(symmetrized(b, "solver start")));
    result.objective = conic_objective(p, result.x);
  }
  return result;
}

}  // namespace maisac
