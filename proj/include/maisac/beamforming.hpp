#pragma once

// Joint information/sensing covariance design for fixed antenna positions.
//
// The sum rate is a difference of concave logs per GN. Each SCA round
// linearizes the interference-plus-sensing log around the current point,
// solves the resulting concave per-slot program over PSD covariances, and
// repeats until the true objective stalls. On exit every W_k is replaced by
// a rank-one beamformer with the same quadratic form toward GN k, with the
// remainder moved into S so the total covariance is unchanged.

#include "maisac/array_model.hpp"
#include "maisac/rate_model.hpp"
#include "maisac/sdp_solver.hpp"

#include <functional>

namespace maisac {

struct ScaParams {
  int max_iter = 20;      // j_max
  double tol = 1e-4;      // bits/s/Hz on the true objective
  bool sensing_enabled = true;
  SolverSettings solver;
};

// Covariances of one slot: W_1..W_K and S.
struct SlotPoint {
  std::vector<CMatrix> w;
  CMatrix s;
};

inline SlotPoint slot_point(const BeamformingSolution& sol, int t) {
  return {sol.w[static_cast<std::size_t>(t)], sol.s[static_cast<std::size_t>(t)]};
}

namespace detail {

struct SlotTerms {
  double total;         // |h|^2 (sum_l a^H W_l a + a^H S a) + sigma^2
  double interference;  // the same without GN k's own term
};

inline SlotTerms slot_terms(int k, const SlotPoint& pt, double channel_power, const CVector& a_k, double noise) {
  double own = 0.0;
  double other = quad_form(a_k, pt.s);
  for (int l = 0; l < static_cast<int>(pt.w.size()); ++l) {
    const double q = quad_form(a_k, pt.w[static_cast<std::size_t>(l)]);
    (l == k ? own : other) += q;
  }
  const double interference = channel_power * std::max(0.0, other) + noise;
  return {interference + channel_power * std::max(0.0, own), interference};
}

}  // namespace detail

// log2(total) - log2(interference + noise), the trace form of the rate.
inline double true_rate_matrix_form(int k, const SlotPoint& pt, double channel_power, const CVector& a_k,
                                    double noise) {
  const auto terms = detail::slot_terms(k, pt, channel_power, a_k, noise);
  const double r = std::log2(terms.total) - std::log2(terms.interference);
  if (!std::isfinite(r)) throw NumericalError("true_rate_matrix_form: non-finite rate (noise power must be > 0)");
  return r;
}

// |h|^2 a a^H / (ln 2 * F_k), F_k = interference + sensing + noise at the expansion point.
inline CMatrix linearization(int k, const SlotPoint& expansion, double channel_power, const CVector& a_k,
                             double noise) {
  const double f = detail::slot_terms(k, expansion, channel_power, a_k, noise).interference;
  return (channel_power / (kLn2 * f)) * (a_k * a_k.adjoint());
}

// Concave minorant of the rate, tight at `expansion`.
inline double lower_bound_rate(int k, const SlotPoint& candidate, const SlotPoint& expansion, double channel_power,
                               const CVector& a_k, double noise) {
  const auto cand = detail::slot_terms(k, candidate, channel_power, a_k, noise);
  const double f = detail::slot_terms(k, expansion, channel_power, a_k, noise).interference;
  const CMatrix lin = linearization(k, expansion, channel_power, a_k, noise);
  double correction = trace_inner(lin, candidate.s - expansion.s);
  for (int l = 0; l < static_cast<int>(candidate.w.size()); ++l) {
    if (l == k) continue;
    correction += trace_inner(lin, candidate.w[static_cast<std::size_t>(l)] - expansion.w[static_cast<std::size_t>(l)]);
  }
  return std::log2(cand.total) - std::log2(f) - correction;
}

// Per-slot data the subproblem needs.
struct SlotContext {
  std::vector<CVector> steering;        // communication GNs
  CVector target_steering;
  std::vector<double> channel_power;    // |h_k(t)|^2
  std::vector<double> noise;            // sigma_k^2
  double max_power = 1.0;
  double threshold = 0.0;               // Lambda_th
};

inline SlotContext slot_context(const Scenario& s, const ChannelState& h, const std::vector<CVector>& steering, int t) {
  SlotContext c;
  c.steering.assign(steering.begin(), steering.begin() + s.num_gns);
  c.target_steering = steering[static_cast<std::size_t>(s.target_index())];
  for (int k = 0; k < s.num_gns; ++k) c.channel_power.push_back(h.power(k, t));
  c.noise = s.noise_power;
  c.max_power = s.max_power;
  c.threshold = s.beampattern_threshold;
  return c;
}

// Builds the concave program whose objective equals sum_k lower_bound_rate
// at the given expansion point. Variables are W_1..W_K, then S when sensing
// is enabled. Channel gains are normalized by the noise so the data is O(1).
inline ConicProblem build_slot_problem(const SlotContext& c, const SlotPoint& expansion, const ScaParams& params) {
  const int gns = static_cast<int>(c.steering.size());
  const int m = static_cast<int>(c.target_steering.size());
  const int sensing_var = params.sensing_enabled ? gns : -1;
  ConicProblem p;
  p.num_vars = gns + (params.sensing_enabled ? 1 : 0);
  p.dim = m;
  p.linear.assign(static_cast<std::size_t>(p.num_vars), CMatrix::Zero(m, m));
  p.trace_budget = c.max_power;
  p.settings = params.solver;

  for (int k = 0; k < gns; ++k) {
    const CVector& a = c.steering[static_cast<std::size_t>(k)];
    const double gain = c.channel_power[static_cast<std::size_t>(k)] / c.noise[static_cast<std::size_t>(k)];
    const CMatrix coeff = gain * (a * a.adjoint());
    LogTerm term;
    term.arg.constant = 1.0;
    for (int v = 0; v < p.num_vars; ++v) term.arg.terms.emplace_back(v, coeff);
    p.log_terms.push_back(std::move(term));

    const double f = detail::slot_terms(k, expansion, gain, a, 1.0).interference;
    const CMatrix lin = coeff / (kLn2 * f);
    p.constant -= std::log2(f);
    for (int l = 0; l < gns; ++l) {
      if (l == k) continue;
      p.linear[static_cast<std::size_t>(l)] -= lin;
      p.constant += trace_inner(lin, expansion.w[static_cast<std::size_t>(l)]);
    }
    if (sensing_var >= 0) {
      p.linear[static_cast<std::size_t>(sensing_var)] -= lin;
      p.constant += trace_inner(lin, expansion.s);
    }
  }

  if (c.threshold > 0.0) {
    AffineForm beam;
    const CMatrix at = c.target_steering * c.target_steering.adjoint() / c.threshold;
    for (int v = 0; v < p.num_vars; ++v) beam.terms.emplace_back(v, at);
    beam.constant = -1.0;  // a^H (sum W + S) a / Lambda - 1 >= 0
    p.inequalities.push_back(std::move(beam));
  }
  return p;
}

inline std::vector<CMatrix> to_variables(const SlotPoint& pt, bool sensing_enabled) {
  std::vector<CMatrix> x = pt.w;
  if (sensing_enabled) x.push_back(pt.s);
  return x;
}

inline SlotPoint from_variables(const std::vector<CMatrix>& x, int gns, int m, bool sensing_enabled) {
  SlotPoint pt;
  pt.w.assign(x.begin(), x.begin() + gns);
  pt.s = sensing_enabled ? x[static_cast<std::size_t>(gns)] : CMatrix::Zero(m, m);
  return pt;
}

// Rejects thresholds no covariance within the budget can reach:
// a^H X a <= M tr(X) <= M P_max.
inline void check_threshold_feasible(const Scenario& s) {
  const double ceiling = s.max_power * s.num_antennas;
  if (s.beampattern_threshold >= ceiling * (1.0 - 1e-12)) {
    throw InfeasibleError("beampattern threshold " + std::to_string(s.beampattern_threshold) +
                          " W is not below P_max * M = " + std::to_string(ceiling) + " W");
  }
}

// W_k = P/(2KM) I and S = P/(2M) I, whose beampattern toward any direction
// equals P_max. When that does not clear the threshold, part of the power
// is moved into a sensing beam aimed at the target so the start sits
// strictly inside the feasible set.
inline BeamformingSolution default_init(const Scenario& s, const CVector& target_steering, bool sensing_enabled = true) {
  check_threshold_feasible(s);
  const int m = s.num_antennas;
  const int gns = s.num_gns;
  const double p = s.max_power;
  auto sol = BeamformingSolution::zeros(s.num_slots, gns, m);
  const CMatrix eye = CMatrix::Identity(m, m);
  const double info_share = sensing_enabled ? 0.5 : 1.0;
  CMatrix wk = (info_share * p / (gns * m)) * eye;
  CMatrix sens = sensing_enabled ? CMatrix((0.5 * p / m) * eye) : CMatrix::Zero(m, m);
  if (s.beampattern_threshold >= p * (1.0 - 1e-9) && m > 1) {
    // Mix toward the matched beam a a^H / M, whose gain is P*M.
    const double goal = 0.5 * (s.beampattern_threshold + p * m);
    const double beta = (goal - p) / (p * m - p);
    const CMatrix matched = target_steering * target_steering.adjoint() / static_cast<double>(m);
    if (sensing_enabled) {
      wk = ((1.0 - beta) * info_share * p / (gns * m)) * eye;
      sens = ((1.0 - beta) * 0.5 * p / m) * eye + beta * p * matched;
    } else {
      wk = ((1.0 - beta) * p / (gns * m)) * eye + (beta * p / gns) * matched;
    }
  }
  for (int t = 0; t < s.num_slots; ++t) {
    for (int k = 0; k < gns; ++k) sol.w[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] = wk;
    sol.s[static_cast<std::size_t>(t)] = sens;
  }
  return sol;
}

struct ReconstructionCheck {
  bool rank_one = true;
  double quad_form_error = 0.0;  // max_k |a^H W~ a - a^H W* a|
  double min_sensing_eig = 0.0;  // smallest eigenvalue of S~
  double covariance_error = 0.0; // max entry of |sum W~ + S~ - sum W* - S*|
};

struct Reconstruction {
  SlotPoint point;
  std::vector<std::optional<CVector>> beams;
  ReconstructionCheck check;
};

// Floor below which a reconstructed S is reported as not PSD.
inline constexpr double kSensingPsdFloor = -1e-9;

// w~_k = (a^H W*_k a)^{-1/2} W*_k a,  W~_k = w~ w~^H,
// S~ = S* + sum W*_k - sum W~_k.
// A GN with a^H W*_k a = 0 gets W~_k = 0 and its covariance moves into S~.
inline Reconstruction rank_one_reconstruct(const std::vector<CMatrix>& w_star, const CMatrix& s_star,
                                           const std::vector<CVector>& steering) {
  if (w_star.size() != steering.size()) throw std::invalid_argument("rank_one_reconstruct: size mismatch");
  const Eigen::Index m = s_star.rows();
  Reconstruction out;
  out.point.s = symmetrized(s_star, "S*");
  out.point.w.resize(w_star.size());
  out.beams.resize(w_star.size());
  CMatrix total_before = out.point.s;
  for (std::size_t k = 0; k < w_star.size(); ++k) {
    const CMatrix wk = symmetrized(w_star[k], "W*_k");
    total_before += wk;
    const CVector& a = steering[k];
    const double q = quad_form(a, wk);
    const double scale = std::max(real_trace(wk), 0.0) * static_cast<double>(m);
    if (!(q > 1e-14 * scale) || q <= 0.0) {
      out.point.w[k] = CMatrix::Zero(m, m);
      out.point.s += wk;
      continue;
    }
    CVector beam = (wk * a) / std::sqrt(q);
    out.point.w[k] = beam * beam.adjoint();
    out.point.s += wk - out.point.w[k];
    out.beams[k] = std::move(beam);
  }
  out.point.s = (out.point.s + out.point.s.adjoint()) * 0.5;

  CMatrix total_after = out.point.s;
  for (std::size_t k = 0; k < w_star.size(); ++k) {
    total_after += out.point.w[k];
    out.check.quad_form_error = std::max(out.check.quad_form_error,
                                         std::abs(quad_form(steering[k], out.point.w[k]) - quad_form(steering[k], w_star[k])));
    if (out.beams[k]) out.check.rank_one = out.check.rank_one && numerical_rank(out.point.w[k]) <= 1;
  }
  out.check.min_sensing_eig = m == 0 ? 0.0 : min_eigenvalue(out.point.s);
  out.check.covariance_error = max_abs(total_after - total_before);
  if (out.check.min_sensing_eig < kSensingPsdFloor * std::max(1.0, real_trace(total_before))) {
    throw NumericalError("rank_one_reconstruct: reconstructed S is not PSD");
  }
  return out;
}

// Sum over slots and GNs of the trace-form rate; valid for any rank.
inline double true_objective(const Scenario& s, const ChannelState& h, const std::vector<CVector>& steering,
                             const BeamformingSolution& sol) {
  double total = 0.0;
  for (int t = 0; t < s.num_slots; ++t) {
    const SlotPoint pt = slot_point(sol, t);
    for (int k = 0; k < s.num_gns; ++k)
      total += true_rate_matrix_form(k, pt, h.power(k, t), steering[static_cast<std::size_t>(k)],
                                     s.noise_power[static_cast<std::size_t>(k)]);
  }
  return total;
}

struct ScaState {
  int iteration = 0;
  BeamformingSolution point;  // expansion point, feasible
  double objective = 0.0;     // true objective at `point`
};

namespace detail {

// Pulls a boundary point strictly inside the beampattern constraint by
// blending with the default start; a no-op when it is already interior.
inline SlotPoint interior_start(const SlotPoint& pt, const SlotPoint& anchor, const SlotContext& c) {
  if (c.threshold <= 0.0) return pt;
  auto gain = [&](const SlotPoint& q) {
    CMatrix total = q.s;
    for (const auto& w : q.w) total += w;
    return quad_form(c.target_steering, total);
  };
  const double g = gain(pt);
  if (g > c.threshold * (1.0 + 1e-9)) return pt;
  if (g < c.threshold * (1.0 - 1e-6)) throw InfeasibleError("beamforming start violates the beampattern threshold");
  const double eps = 1e-6;
  SlotPoint out = pt;
  for (std::size_t k = 0; k < out.w.size(); ++k) out.w[k] = (1.0 - eps) * pt.w[k] + eps * anchor.w[k];
  out.s = (1.0 - eps) * pt.s + eps * anchor.s;
  return out;
}

}  // namespace detail

// One SCA round: solves every slot's concave subproblem around `state`.
// Returns a general-rank solution whose true objective is >= state's.
inline BeamformingSolution solve_sca_subproblem(const ScaState& state, const AntennaPositions& x,
                                                const ChannelState& h, const Scenario& s,
                                                const ScaParams& params = {}) {
  check_threshold_feasible(s);
  const auto steering = steering_vectors(x, s);
  const auto anchor = default_init(s, steering[static_cast<std::size_t>(s.target_index())], params.sensing_enabled);
  BeamformingSolution out = BeamformingSolution::zeros(s.num_slots, s.num_gns, s.num_antennas);
  for (int t = 0; t < s.num_slots; ++t) {
    const SlotContext c = slot_context(s, h, steering, t);
    SlotPoint expansion = slot_point(state.point, t);
    if (!params.sensing_enabled) expansion.s.setZero();
    expansion = detail::interior_start(expansion, slot_point(anchor, t), c);
    const ConicProblem p = build_slot_problem(c, expansion, params);
    SolveResult r;
    try {
      r = solve(p, to_variables(expansion, params.sensing_enabled));
    } catch (const MaxIterationsError& e) {
      r = e.best_so_far();  // still feasible and no worse than the start
    }
    SlotPoint sol = from_variables(r.x, s.num_gns, s.num_antennas, params.sensing_enabled);
    out.w[static_cast<std::size_t>(t)] = std::move(sol.w);
    out.s[static_cast<std::size_t>(t)] = std::move(sol.s);
  }
  return out;
}

// Replaces every slot's covariances with their rank-one reconstruction.
inline BeamformingSolution reconstruct_solution(const BeamformingSolution& sol, const std::vector<CVector>& steering,
                                                int gns) {
  BeamformingSolution out = sol;
  const std::vector<CVector> comm(steering.begin(), steering.begin() + gns);
  for (int t = 0; t < sol.num_slots(); ++t) {
    auto rec = rank_one_reconstruct(sol.w[static_cast<std::size_t>(t)], sol.s[static_cast<std::size_t>(t)], comm);
    out.w[static_cast<std::size_t>(t)] = std::move(rec.point.w);
    out.s[static_cast<std::size_t>(t)] = std::move(rec.point.s);
    out.beams[static_cast<std::size_t>(t)] = std::move(rec.beams);
  }
  return out;
}

struct BeamformingResult {
  BeamformingSolution solution;
  std::vector<double> trace;  // true objective, starting with the init
  int iterations = 0;
};

// SCA ascent from `init` until the objective changes by less than
// params.tol or params.max_iter rounds, then rank-one reconstruction.
inline BeamformingResult run_beamforming(const AntennaPositions& x, const ChannelState& h, const Scenario& s,
                                         const BeamformingSolution& init, const ScaParams& params = {}) {
  const auto steering = steering_vectors(x, s);
  ScaState state{0, init, true_objective(s, h, steering, init)};
  BeamformingResult out;
  out.trace.push_back(state.objective);
  for (int j = 0; j < params.max_iter; ++j) {
    BeamformingSolution next = solve_sca_subproblem(state, x, h, s, params);
    const double obj = true_objective(s, h, steering, next);
    const double change = obj - state.objective;
    if (obj >= state.objective) {
      state.point = std::move(next);
      state.objective = obj;
    }
    state.iteration = j + 1;
    out.trace.push_back(state.objective);
    if (std::abs(change) < params.tol) break;
  }
  out.iterations = state.iteration;
  out.solution = reconstruct_solution(state.point, steering, s.num_gns);
  return out;
}

}  // namespace maisac
