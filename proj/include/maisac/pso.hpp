#pragma once

// Particle swarm search over antenna placements for a frozen beamformer,
// with repair for the spacing and beampattern constraints.

#include "maisac/array_model.hpp"
#include "maisac/rate_model.hpp"

#include <optional>
#include <random>

namespace maisac {

struct PsoParams {
  int swarm_size = 50;
  int max_iter = 100;
  double inertia = 0.9;
  double inertia_decay = 0.99;
  double cognitive = 1.5;
  double social = 1.5;
  double step = 1.0;
  double velocity_clamp = 0.2;  // fraction of L per component
  int repair_retries = 100;
};

inline void validate(const PsoParams& p) {
  auto need = [](bool ok, const char* field) {
    if (!ok) throw ConfigError(field, "out of range");
  };
  need(p.swarm_size >= 1, "pso.swarm_size");
  need(p.max_iter >= 0, "pso.max_iter");
  need(p.inertia > 0.0, "pso.inertia");
  need(p.inertia_decay > 0.0 && p.inertia_decay <= 1.0, "pso.inertia_decay");
  need(p.cognitive > 0.0, "pso.cognitive");
  need(p.social > 0.0, "pso.social");
  need(p.step > 0.0, "pso.step");
  need(p.velocity_clamp > 0.0, "pso.velocity_clamp");
  need(p.repair_retries >= 1, "pso.repair_retries");
}

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_fitness = -std::numeric_limits<double>::infinity();
  double fitness = -std::numeric_limits<double>::infinity();
};

// What the fitness of a placement depends on besides the placement itself.
struct PsoContext {
  const Scenario& scenario;
  const ChannelState& channel;
  const BeamformingSolution& beamforming;
};

// Total rate with steering vectors rebuilt from x and the beamformer held fixed.
inline double fitness(const AntennaPositions& x, const PsoContext& ctx) {
  return total_rate(ctx.channel, x, ctx.beamforming, ctx.scenario);
}

// Smallest target beampattern gain over slots, minus the threshold.
inline double beampattern_margin(const AntennaPositions& x, const PsoContext& ctx) {
  const auto& s = ctx.scenario;
  const CVector a = steering_vector(x, steering_angle_cosine(s, s.target_index()), s.wavelength);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < ctx.beamforming.num_slots(); ++t)
    worst = std::min(worst, quad_form(a, ctx.beamforming.total_covariance(t)));
  return worst - s.beampattern_threshold;
}

inline bool satisfies_beampattern(const AntennaPositions& x, const PsoContext& ctx) {
  return ctx.scenario.beampattern_threshold <= 0.0 || beampattern_margin(x, ctx) >= 0.0;
}

template <class Rng>
std::vector<double> uniform_positions(int m, double aperture, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, aperture);
  std::vector<double> x(static_cast<std::size_t>(m));
  for (auto& v : x) v = u(rng);
  return x;
}

// v <- w v + c r1 (p_best - x) + s r2 (g_best - x); r1, r2 are scalars per
// particle per iteration. Components are clamped to +-vmax.
inline std::vector<double> update_velocity(const Particle& p, const std::vector<double>& global_best, double inertia,
                                           const PsoParams& params, double r1, double r2, double vmax) {
  std::vector<double> v(p.velocity.size());
  for (std::size_t m = 0; m < v.size(); ++m) {
    v[m] = inertia * p.velocity[m] + params.cognitive * r1 * (p.best_position[m] - p.position[m]) +
           params.social * r2 * (global_best[m] - p.position[m]);
    v[m] = std::clamp(v[m], -vmax, vmax);
  }
  return v;
}

// x + step * v, clamped to [0, L]; spacing repair is separate.
inline std::vector<double> update_position(const std::vector<double>& x, const std::vector<double>& v, double step,
                                           double aperture) {
  std::vector<double> out(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) out[m] = std::clamp(x[m] + step * v[m], 0.0, aperture);
  return out;
}

// Spacing repair, then re-draw uniformly until the beampattern threshold
// holds. Throws RepairExhaustedError after params.repair_retries draws.
template <class Rng>
std::vector<double> repair_particle(const std::vector<double>& x, const PsoContext& ctx, const PsoParams& params,
                                    Rng& rng) {
  const auto& s = ctx.scenario;
  AntennaPositions candidate = repair_spacing(x, s.min_spacing, s.aperture);
  if (s.beampattern_threshold <= 0.0 || satisfies_beampattern(candidate, ctx)) return candidate.values();
  for (int attempt = 0; attempt < params.repair_retries; ++attempt) {
    candidate = repair_spacing(uniform_positions(s.num_antennas, s.aperture, rng), s.min_spacing, s.aperture);
    if (satisfies_beampattern(candidate, ctx)) return candidate.values();
  }
  throw RepairExhaustedError("repair_particle: beampattern threshold unreachable for the frozen beamformer");
}

struct PsoTraceRow {
  int iteration;
  double best_fitness;
  double mean_fitness;
};

struct PsoResult {
  AntennaPositions best;
  double best_fitness = 0.0;
  std::vector<PsoTraceRow> trace;  // row 0 is the initial swarm
};

namespace detail {

// A stored best is only replaced on an improvement beyond rounding, so a
// flat landscape keeps the incumbent.
inline bool improves(double candidate, double incumbent) {
  return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
}

}  // namespace detail

// Swarm search. `incumbent`, when given, becomes particle 0 (after repair),
// so the returned fitness is never below the incumbent's.
// Within an iteration every particle moves against the global best from the
// previous iteration; bests are merged after all particles are evaluated.
template <class Rng>
PsoResult run_pso(const PsoContext& ctx, const PsoParams& params, Rng& rng,
                  const std::optional<AntennaPositions>& incumbent = std::nullopt) {
  validate(params);
  const auto& s = ctx.scenario;
  const int m = s.num_antennas;
  const double vmax = params.velocity_clamp * s.aperture;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> vel(-vmax, vmax);

  std::vector<Particle> swarm(static_cast<std::size_t>(params.swarm_size));
  for (int i = 0; i < params.swarm_size; ++i) {
    auto& p = swarm[static_cast<std::size_t>(i)];
    const std::vector<double> start =
        (i == 0 && incumbent) ? incumbent->values() : uniform_positions(m, s.aperture, rng);
    p.position = repair_particle(start, ctx, params, rng);
    p.velocity.resize(static_cast<std::size_t>(m));
    for (auto& v : p.velocity) v = vel(rng);
    p.fitness = fitness(AntennaPositions(p.position), ctx);
    p.best_position = p.position;
    p.best_fitness = p.fitness;
  }

  std::size_t leader = 0;
  for (std::size_t i = 1; i < swarm.size(); ++i)
    if (detail::improves(swarm[i].best_fitness, swarm[leader].best_fitness)) leader = i;
  std::vector<double> global_best = swarm[leader].best_position;
  double global_fitness = swarm[leader].best_fitness;

  PsoResult out;
  auto record = [&](int iter) {
    double mean = 0.0;
    for (const auto& p : swarm) mean += p.fitness;
    out.trace.push_back({iter, global_fitness, mean / static_cast<double>(swarm.size())});
  };
  record(0);

  double inertia = params.inertia;
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    inertia *= params.inertia_decay;
    // Random draws and repairs happen in a fixed order before any fitness work.
    for (auto& p : swarm) {
      const double r1 = unit(rng);
      const double r2 = unit(rng);
      p.velocity = update_velocity(p, global_best, inertia, params, r1, r2, vmax);
      p.position = repair_particle(update_position(p.position, p.velocity, params.step, s.aperture), ctx, params, rng);
    }
    for (auto& p : swarm) p.fitness = fitness(AntennaPositions(p.position), ctx);
    for (auto& p : swarm) {
      if (detail::improves(p.fitness, p.best_fitness)) {
        p.best_fitness = p.fitness;
        p.best_position = p.position;
      }
      if (detail::improves(p.best_fitness, global_fitness)) {
        global_fitness = p.best_fitness;
        global_best = p.best_position;
      }
    }
    record(iter);
  }
  out.best = AntennaPositions(global_best);
  out.best_fitness = global_fitness;
  return out;
}

inline void write_pso_trace_csv(const std::vector<PsoTraceRow>& trace, std::ostream& os) {
  os << "iter,best_fitness,mean_fitness\n";
  os << std::setprecision(17);
  for (const auto& r : trace) os << r.iteration << ',' << r.best_fitness << ',' << r.mean_fitness << '\n';
}

}  // namespace maisac
