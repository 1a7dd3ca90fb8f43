#pragma once

// Self-checks for the numerical core: lower-bound tightness, rank-one
// reconstruction identities, and the solver's closed-form battery.

#include "maisac/beamforming.hpp"

#include <random>
#include <sstream>

namespace maisac {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

template <class Rng>
CMatrix random_psd(int m, int rank, double trace, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(m, rank);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(n(rng), n(rng));
  CMatrix a = g * g.adjoint();
  const double tr = real_trace(a);
  return tr > 0.0 ? CMatrix(a * (trace / tr)) : a;
}

template <class Rng>
CMatrix random_hermitian(int m, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = Complex(n(rng), n(rng));
  return (a + a.adjoint()) * 0.5;
}

template <class Rng>
CVector random_steering(int m, double wavelength, Rng& rng) {
  std::uniform_real_distribution<double> pos(0.0, 10.0 * wavelength);
  std::uniform_real_distribution<double> cosine(-1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(m));
  for (auto& v : x) v = pos(rng);
  return steering_vector(AntennaPositions(std::move(x)), cosine(rng), wavelength);
}

// Random feasible slot point: K general-rank W_k and S sharing a power budget.
template <class Rng>
SlotPoint random_slot_point(int gns, int m, double budget, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_int_distribution<int> rank(1, m);
  std::vector<double> share(static_cast<std::size_t>(gns + 1));
  double sum = 0.0;
  for (auto& v : share) sum += (v = u(rng));
  const double used = budget * u(rng);
  SlotPoint pt;
  for (int k = 0; k < gns; ++k)
    pt.w.push_back(random_psd(m, rank(rng), used * share[static_cast<std::size_t>(k)] / sum, rng));
  pt.s = random_psd(m, rank(rng), used * share.back() / sum, rng);
  return pt;
}

inline std::string format_max(const char* label, double v) {
  std::ostringstream os;
  os << label << '=' << std::setprecision(3) << v;
  return os.str();
}

}  // namespace detail

// The SCA minorant matches the trace-form rate at its expansion point and
// never exceeds it elsewhere.
inline CheckResult check_lower_bound(int expansions, int candidates_per_expansion, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_gain(-11.0, -9.0);
  const int gns = 3;
  const int m = 4;
  const double noise = 1e-14;
  const double budget = 1.0;
  double tight = 0.0;
  double excess = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < expansions; ++e) {
    std::vector<CVector> a;
    std::vector<double> power;
    for (int k = 0; k < gns; ++k) {
      a.push_back(detail::random_steering(m, 0.1, rng));
      power.push_back(std::pow(10.0, log_gain(rng)));
    }
    const SlotPoint expansion = detail::random_slot_point(gns, m, budget, rng);
    for (int k = 0; k < gns; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      tight = std::max(tight, std::abs(lower_bound_rate(k, expansion, expansion, power[kk], a[kk], noise) -
                                       true_rate_matrix_form(k, expansion, power[kk], a[kk], noise)));
    }
    for (int c = 0; c < candidates_per_expansion; ++c) {
      const SlotPoint cand = detail::random_slot_point(gns, m, budget, rng);
      for (int k = 0; k < gns; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        excess = std::max(excess, lower_bound_rate(k, cand, expansion, power[kk], a[kk], noise) -
                                      true_rate_matrix_form(k, cand, power[kk], a[kk], noise));
      }
    }
  }
  CheckResult r{"lower_bound_tightness", tight <= 1e-10 && excess <= 1e-9, ""};
  r.detail = detail::format_max("max|lb-rate| at expansion", tight) + ", " +
             detail::format_max("max(lb-rate) elsewhere", excess);
  return r;
}

// Rank-one reconstruction: rank one, preserved quadratic forms, PSD S,
// preserved covariance sum, preserved per-GN rates.
inline CheckResult check_reconstruction(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_m(0, 2);
  std::uniform_int_distribution<int> pick_k(1, 4);
  std::uniform_real_distribution<double> log_gain(-11.0, -9.0);
  const double noise = 1e-14;
  double quad = 0.0;
  double cov = 0.0;
  double rate = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  bool rank_one = true;
  for (int i = 0; i < instances; ++i) {
    const int m = 2 + 2 * pick_m(rng);
    const int gns = pick_k(rng);
    const SlotPoint pt = detail::random_slot_point(gns, m, 1.0, rng);
    std::vector<CVector> a;
    std::vector<double> power;
    for (int k = 0; k < gns; ++k) {
      a.push_back(detail::random_steering(m, 0.1, rng));
      power.push_back(std::pow(10.0, log_gain(rng)));
    }
    const Reconstruction rec = rank_one_reconstruct(pt.w, pt.s, a);
    for (int k = 0; k < gns; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      rank_one = rank_one && numerical_rank(rec.point.w[kk]) <= 1;
      quad = std::max(quad, std::abs(quad_form(a[kk], rec.point.w[kk]) - quad_form(a[kk], pt.w[kk])));
      rate = std::max(rate, std::abs(true_rate_matrix_form(k, rec.point, power[kk], a[kk], noise) -
                                     true_rate_matrix_form(k, pt, power[kk], a[kk], noise)));
    }
    min_eig = std::min(min_eig, rec.check.min_sensing_eig);
    cov = std::max(cov, rec.check.covariance_error);
  }
  CheckResult r{"rank_one_reconstruction",
                rank_one && quad <= 1e-9 && min_eig >= kSensingPsdFloor && cov <= 1e-9 && rate <= 1e-8, ""};
  r.detail = std::string("rank_one=") + (rank_one ? "yes" : "no") + ", " + detail::format_max("quad", quad) + ", " +
             detail::format_max("min_eig(S)", min_eig) + ", " + detail::format_max("cov", cov) + ", " +
             detail::format_max("rate", rate);
  return r;
}

namespace detail {

inline double relative_error(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// Largest relative mismatch between <grad, D> and a central difference,
// over random Hermitian directions D.
template <class Rng>
double gradient_mismatch(const ConicProblem& p, const std::vector<CMatrix>& x, int directions, Rng& rng) {
  const double h = 1e-6;
  const auto g = objective_gradient(p, x);
  double worst = 0.0;
  for (int d = 0; d < directions; ++d) {
    std::vector<CMatrix> dir, plus = x, minus = x;
    double analytic = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) {
      dir.push_back(random_hermitian(p.dim, rng));
      dir.back() /= std::sqrt(dir.back().squaredNorm());
      analytic += trace_inner(g[v], dir.back());
      plus[v] += h * dir.back();
      minus[v] -= h * dir.back();
    }
    const double numeric = (evaluate_objective(p, plus) - evaluate_objective(p, minus)) / (2.0 * h);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  }
  return worst;
}

}  // namespace detail

// Closed-form battery: lambda_max, log of trace, single-user transmit
// beamforming; plus finite-difference checks of every objective gradient.
inline CheckResult check_solver_battery(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_value = 0.0;
  double worst_grad = 0.0;

  for (int m : {2, 4, 6}) {
    const CMatrix a = detail::random_hermitian(m, rng);
    ConicProblem p;
    p.num_vars = 1;
    p.dim = m;
    p.linear = {a};
    p.trace_budget = 1.0;
    const auto r = solve(p, {CMatrix::Identity(m, m) / (2.0 * m)});
    worst_value = std::max(worst_value, detail::relative_error(r.objective, hermitian_eig(a).values.maxCoeff()));
    worst_grad = std::max(worst_grad, detail::gradient_mismatch(p, {detail::random_psd(m, m, 0.5, rng)}, 5, rng));
  }

  for (double c : {0.5, 3.0, 1e3}) {
    for (double budget : {0.2, 1.0, 5.0}) {
      const int m = 3;
      ConicProblem p;
      p.num_vars = 1;
      p.dim = m;
      LogTerm t;
      t.arg.constant = 1.0;
      t.arg.terms.emplace_back(0, c * CMatrix::Identity(m, m));
      p.log_terms.push_back(t);
      p.trace_budget = budget;
      const auto r = solve(p, {CMatrix::Identity(m, m) * (budget / (4.0 * m))});
      worst_value = std::max(worst_value, detail::relative_error(r.objective, std::log2(1.0 + c * budget)));
      worst_grad =
          std::max(worst_grad, detail::gradient_mismatch(p, {detail::random_psd(m, m, 0.5 * budget, rng)}, 5, rng));
    }
  }

  std::uniform_real_distribution<double> log_gain(-11.0, -9.0);
  for (int m : {2, 4, 6}) {
    SlotContext c;
    c.steering = {detail::random_steering(m, 0.1, rng)};
    c.target_steering = detail::random_steering(m, 0.1, rng);
    c.channel_power = {std::pow(10.0, log_gain(rng))};
    c.noise = {1e-14};
    c.max_power = 1.0;
    c.threshold = 0.0;
    SlotPoint start{{CMatrix::Identity(m, m) * (0.25 / m)}, CMatrix::Zero(m, m)};
    const ScaParams params;
    const ConicProblem p = build_slot_problem(c, start, params);
    const auto r = solve(p, to_variables(start, true));
    const double want = std::log2(1.0 + c.channel_power[0] / c.noise[0] * c.max_power * m);
    worst_value = std::max(worst_value, detail::relative_error(r.objective, want));
    const SlotPoint probe = detail::random_slot_point(1, m, 0.5, rng);
    worst_grad = std::max(worst_grad, detail::gradient_mismatch(p, to_variables(probe, true), 5, rng));
  }

  // Multi-user subproblem, gradient only.
  for (int m : {2, 4, 6}) {
    SlotContext c;
    for (int k = 0; k < 3; ++k) {
      c.steering.push_back(detail::random_steering(m, 0.1, rng));
      c.channel_power.push_back(std::pow(10.0, log_gain(rng)));
      c.noise.push_back(1e-14);
    }
    c.target_steering = detail::random_steering(m, 0.1, rng);
    c.max_power = 1.0;
    c.threshold = 1e-5;
    const SlotPoint expansion = detail::random_slot_point(3, m, 1.0, rng);
    const ConicProblem p = build_slot_problem(c, expansion, ScaParams{});
    const SlotPoint probe = detail::random_slot_point(3, m, 1.0, rng);
    worst_grad = std::max(worst_grad, detail::gradient_mismatch(p, to_variables(probe, true), 5, rng));
  }

  CheckResult r{"solver_battery", worst_value <= 1e-5 && worst_grad <= 1e-4, ""};
  r.detail = detail::format_max("max rel objective error", worst_value) + ", " +
             detail::format_max("max rel gradient error", worst_grad);
  return r;
}

inline CheckResult check_eigensolver(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int m = 1 + i % 8;
    const CMatrix a = detail::random_hermitian(m, rng);
    const auto e = hermitian_eig(a);
    worst = std::max(worst, max_abs(a - reassemble(e.values, e.vectors)) / std::max(1.0, max_abs(a)));
  }
  CheckResult r{"hermitian_eig", worst <= 1e-10, detail::format_max("max reconstruction residual", worst)};
  return r;
}

inline std::vector<CheckResult> run_validation(std::uint64_t seed) {
  return {check_eigensolver(200, seed), check_lower_bound(1000, 1, seed + 1), check_reconstruction(200, seed + 2),
          check_solver_battery(seed + 3)};
}

}  // namespace maisac
