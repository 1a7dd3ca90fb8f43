#pragma once

// Alternating optimization of placement and beamforming, the fixed- and
// random-position baselines, and the parameter sweeps built from them.

#include "maisac/beamforming.hpp"
#include "maisac/config.hpp"
#include "maisac/pso.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

namespace maisac {

enum class Scheme { kMA, kFPA, kRPA };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kMA: return "MA";
    case Scheme::kFPA: return "FPA";
    case Scheme::kRPA: return "RPA";
  }
  return "?";
}

inline std::vector<Scheme> parse_schemes(const std::string& text) {
  if (text == "all") return {Scheme::kMA, Scheme::kFPA, Scheme::kRPA};
  if (text == "ma") return {Scheme::kMA};
  if (text == "fpa") return {Scheme::kFPA};
  if (text == "rpa") return {Scheme::kRPA};
  throw ConfigError("--scheme", "expected ma, fpa, rpa or all");
}

// ---------------------------------------------------------------------------
// Seeds

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto p : parts) h = splitmix64(h ^ p);
  return h;
}

enum SeedStream : std::uint64_t { kLayoutStream = 1, kChannelStream = 2, kPositionStream = 3, kAlgorithmStream = 4 };

// One random problem instance: GN layout and channel realization. All
// schemes and grid points of a replicate share it, so comparisons are paired.
struct Instance {
  Scenario scenario;
  ChannelState channel;
  std::uint64_t seed = 0;
};

inline Instance make_instance(const Scenario& base, std::uint64_t seed) {
  Instance inst;
  inst.seed = seed;
  inst.scenario = with_layout_seed(base, mix_seed({seed, kLayoutStream}));
  inst.scenario.rng_seed = seed;
  inst.channel = sample_channel(inst.scenario, mix_seed({seed, kChannelStream}));
  return inst;
}

// ---------------------------------------------------------------------------
// Results

struct AoResult {
  Scheme scheme = Scheme::kMA;
  AntennaPositions positions;
  BeamformingSolution solution;
  std::vector<double> trace;                   // objective, init first
  std::vector<std::vector<double>> gn_rates;   // [slot][gn]
  double total_rate = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::vector<PsoTraceRow> pso_trace;          // last PSO call
  std::vector<double> sca_trace;               // last beamforming call
};

struct ConstraintReport {
  bool positions_ok = false;  // range and spacing
  bool power_ok = false;
  bool beampattern_ok = false;
  bool psd_ok = false;
  double max_power = 0.0;
  double min_target_gain = 0.0;
  bool all() const { return positions_ok && power_ok && beampattern_ok && psd_ok; }
};

inline std::vector<double> target_gains(const AntennaPositions& x, const BeamformingSolution& sol, const Scenario& s) {
  const CVector a = steering_vector(x, steering_angle_cosine(s, s.target_index()), s.wavelength);
  std::vector<double> out;
  for (int t = 0; t < sol.num_slots(); ++t) out.push_back(quad_form(a, sol.total_covariance(t)));
  return out;
}

inline ConstraintReport check_constraints(const AntennaPositions& x, const BeamformingSolution& sol, const Scenario& s) {
  ConstraintReport r;
  r.positions_ok = static_cast<int>(x.size()) == s.num_antennas && is_feasible(x, s.aperture, s.min_spacing);
  r.power_ok = true;
  r.psd_ok = true;
  for (int t = 0; t < sol.num_slots(); ++t) {
    const double p = transmit_power(sol, t);
    r.max_power = std::max(r.max_power, p);
    r.power_ok = r.power_ok && p <= s.max_power * (1.0 + 1e-6);
    const double floor = -1e-9 * std::max(1.0, s.max_power);
    r.psd_ok = r.psd_ok && min_eigenvalue(sol.s[static_cast<std::size_t>(t)]) >= floor;
    for (const auto& w : sol.w[static_cast<std::size_t>(t)]) r.psd_ok = r.psd_ok && min_eigenvalue(w) >= floor;
  }
  const auto gains = target_gains(x, sol, s);
  r.min_target_gain = gains.empty() ? 0.0 : *std::min_element(gains.begin(), gains.end());
  r.beampattern_ok = s.beampattern_threshold <= 0.0 || r.min_target_gain >= s.beampattern_threshold * (1.0 - 1e-9);
  return r;
}

inline double sensing_power(const BeamformingSolution& sol, int t) { return real_trace(sol.s[static_cast<std::size_t>(t)]); }

// ---------------------------------------------------------------------------
// Schemes

struct ExperimentParams {
  PsoParams pso;
  ScaParams sca;
  AoParams ao;

  static ExperimentParams from(const ExperimentConfig& cfg) { return {cfg.pso, cfg.sca, cfg.ao}; }
};

// Uniform positions repaired for range and spacing.
template <class Rng>
AntennaPositions random_feasible_positions(const Scenario& s, Rng& rng) {
  return repair_spacing(uniform_positions(s.num_antennas, s.aperture, rng), s.min_spacing, s.aperture);
}

inline AntennaPositions fixed_positions(const Scenario& s) {
  std::vector<double> x(static_cast<std::size_t>(s.num_antennas));
  for (int m = 0; m < s.num_antennas; ++m) x[static_cast<std::size_t>(m)] = m * s.wavelength / 2.0;
  return AntennaPositions(std::move(x));
}

// The placement random-position runs use; MA also starts from it.
inline AntennaPositions instance_random_positions(const Instance& inst) {
  std::mt19937_64 rng(mix_seed({inst.seed, kPositionStream}));
  return random_feasible_positions(inst.scenario, rng);
}

namespace detail {

inline void finish(AoResult& r, const Instance& inst, std::chrono::steady_clock::time_point start) {
  r.gn_rates = per_gn_rates(inst.channel, r.positions, r.solution, inst.scenario);
  r.total_rate = 0.0;
  for (const auto& slot : r.gn_rates)
    for (double v : slot) r.total_rate += v;
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

inline AoResult beamforming_only(Scheme scheme, const Instance& inst, const AntennaPositions& x,
                                 const ExperimentParams& params) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario& s = inst.scenario;
  const auto steering = steering_vectors(x, s);
  auto init = default_init(s, steering[static_cast<std::size_t>(s.target_index())], params.sca.sensing_enabled);
  auto bf = run_beamforming(x, inst.channel, s, init, params.sca);
  AoResult r;
  r.scheme = scheme;
  r.positions = x;
  r.solution = std::move(bf.solution);
  r.sca_trace = bf.trace;
  r.trace = {bf.trace.front(), true_objective(s, inst.channel, steering, r.solution)};
  r.iterations = 1;
  finish(r, inst, start);
  return r;
}

}  // namespace detail

// Alternates PSO over positions (beamformer frozen) with SCA beamforming
// (positions frozen). The beamformer is initialized before the first PSO
// pass; the starting placement is the instance's random feasible draw.
// Stops after params.ao.max_iter passes or when a pass gains < params.ao.tol.
inline AoResult run_ao(const Instance& inst, const ExperimentParams& params, std::uint64_t algorithm_seed) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario& s = inst.scenario;
  std::mt19937_64 rng(algorithm_seed);
  AntennaPositions x = instance_random_positions(inst);
  const CVector target0 = steering_vector(x, steering_angle_cosine(s, s.target_index()), s.wavelength);
  BeamformingSolution bf = default_init(s, target0, params.sca.sensing_enabled);

  AoResult r;
  r.scheme = Scheme::kMA;
  double objective = total_rate(inst.channel, x, bf, s);
  r.trace.push_back(objective);
  for (int i = 0; i < params.ao.max_iter; ++i) {
    const PsoContext ctx{s, inst.channel, bf};
    PsoResult pso = run_pso(ctx, params.pso, rng, x);
    x = pso.best;
    r.pso_trace = std::move(pso.trace);
    BeamformingResult next = run_beamforming(x, inst.channel, s, bf, params.sca);
    bf = std::move(next.solution);
    r.sca_trace = std::move(next.trace);
    const double updated = total_rate(inst.channel, x, bf, s);
    r.trace.push_back(updated);
    r.iterations = i + 1;
    const double gain = updated - objective;
    objective = updated;
    if (gain < params.ao.tol) break;
  }
  r.positions = x;
  r.solution = std::move(bf);
  detail::finish(r, inst, start);
  return r;
}

// Uniform half-wavelength array, beamforming only.
inline AoResult run_fpa(const Instance& inst, const ExperimentParams& params) {
  return detail::beamforming_only(Scheme::kFPA, inst, fixed_positions(inst.scenario), params);
}

// Random feasible placement, beamforming only.
inline AoResult run_rpa(const Instance& inst, const ExperimentParams& params) {
  return detail::beamforming_only(Scheme::kRPA, inst, instance_random_positions(inst), params);
}

inline AoResult run_scheme(Scheme scheme, const Instance& inst, const ExperimentParams& params, std::uint64_t grid_index = 0) {
  switch (scheme) {
    case Scheme::kMA:
      return run_ao(inst, params, mix_seed({inst.seed, kAlgorithmStream, static_cast<std::uint64_t>(scheme), grid_index}));
    case Scheme::kFPA: return run_fpa(inst, params);
    case Scheme::kRPA: return run_rpa(inst, params);
  }
  throw std::logic_error("unknown scheme");
}

// ---------------------------------------------------------------------------
// Beampattern

struct BeampatternSample {
  double theta;  // rad
  double gain;   // W, averaged over slots
};

// a(theta)^H (sum W + S) a(theta) averaged over slots, theta evenly spaced on [0, pi/2].
inline std::vector<BeampatternSample> beampattern_scan(const AntennaPositions& x, const BeamformingSolution& sol,
                                                       const Scenario& s, int points) {
  std::vector<BeampatternSample> out;
  if (points < 1) return out;
  std::vector<CMatrix> totals;
  for (int t = 0; t < sol.num_slots(); ++t) totals.push_back(sol.total_covariance(t));
  for (int i = 0; i < points; ++i) {
    const double theta = points == 1 ? 0.0 : (kPi / 2.0) * i / (points - 1);
    const CVector a = steering_vector(x, std::cos(theta), s.wavelength);
    double g = 0.0;
    for (const auto& tot : totals) g += std::max(0.0, quad_form(a, tot));
    out.push_back({theta, totals.empty() ? 0.0 : g / static_cast<double>(totals.size())});
  }
  return out;
}

inline std::vector<BeampatternSample> beampattern_scan(const AoResult& r, const Scenario& s, int points) {
  return beampattern_scan(r.positions, r.solution, s, points);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  Scheme scheme;
  double grid_param;
  std::uint64_t seed;
  double total_rate;
  double beampattern;  // min over slots of the target gain
  double power;        // max over slots of the transmit power
  int iterations;
  double wall_ms;
};

struct SweepOptions {
  std::vector<Scheme> schemes{Scheme::kMA, Scheme::kFPA, Scheme::kRPA};
  int seeds = 10;
  std::uint64_t base_seed = 1;
  int threads = 1;
  bool record_timings = false;
};

inline SweepRow make_row(const AoResult& r, const Instance& inst, double grid_param, bool record_timings) {
  const ConstraintReport c = check_constraints(r.positions, r.solution, inst.scenario);
  if (!c.all()) {
    throw NumericalError(std::string("constraint check failed for ") + scheme_name(r.scheme) + " seed " +
                         std::to_string(inst.seed));
  }
  return {r.scheme, grid_param, inst.seed, r.total_rate, c.min_target_gain, c.max_power, r.iterations,
          record_timings ? r.wall_ms : 0.0};
}

// Runs cells[i]() for every i on `threads` workers; results land by index.
inline void run_cells(std::size_t count, int threads, const std::function<void(std::size_t)>& cell) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) cell(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          cell(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Generic sweep: `configure(base, value)` produces the scenario at one grid
// point. Row order is scheme, grid point, replicate regardless of threading.
inline std::vector<SweepRow> sweep(const Scenario& base, const ExperimentParams& params, const std::vector<double>& grid,
                                   const SweepOptions& opt,
                                   const std::function<Scenario(const Scenario&, double)>& configure) {
  const std::size_t schemes = opt.schemes.size();
  const std::size_t points = grid.size();
  const std::size_t reps = static_cast<std::size_t>(std::max(opt.seeds, 0));
  std::vector<SweepRow> rows(schemes * points * reps);
  run_cells(rows.size(), opt.threads, [&](std::size_t cell) {
    const std::size_t rep = cell % reps;
    const std::size_t g = (cell / reps) % points;
    const std::size_t sc = cell / (reps * points);
    const Scenario s = configure(base, grid[g]);
    const Instance inst = make_instance(s, opt.base_seed + rep);
    const AoResult r = run_scheme(opt.schemes[sc], inst, params, g);
    rows[cell] = make_row(r, inst, grid[g], opt.record_timings);
  });
  return rows;
}

inline std::vector<SweepRow> sweep_power(const Scenario& base, const ExperimentParams& params,
                                         const std::vector<double>& powers_w, const SweepOptions& opt) {
  for (std::size_t i = 0; i < powers_w.size(); ++i) {
    if (!(powers_w[i] > 0.0)) throw ConfigError("--powers", "powers must be positive");
    if (i > 0 && powers_w[i] <= powers_w[i - 1]) throw ConfigError("--powers", "powers must be ascending");
  }
  return sweep(base, params, powers_w, opt, [](const Scenario& s, double p) {
    Scenario out = s;
    out.max_power = p;
    return out;
  });
}

inline std::vector<SweepRow> sweep_antennas(const Scenario& base, const ExperimentParams& params,
                                            const std::vector<int>& counts, const SweepOptions& opt) {
  std::vector<double> grid;
  for (int m : counts) {
    Scenario probe = base;
    probe.num_antennas = m;
    validate(probe);  // aperture feasibility per grid point
    grid.push_back(m);
  }
  return sweep(base, params, grid, opt, [](const Scenario& s, double m) {
    Scenario out = s;
    out.num_antennas = static_cast<int>(m);
    return out;
  });
}

// ---------------------------------------------------------------------------
// CSV

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "scheme,grid_param,seed,total_rate_bps_hz,beampattern_w,power_w,iters,wall_ms\n";
  os << std::setprecision(12);
  for (const auto& r : rows) {
    os << scheme_name(r.scheme) << ',' << r.grid_param << ',' << r.seed << ',' << r.total_rate << ','
       << r.beampattern << ',' << r.power << ',' << r.iterations << ',' << r.wall_ms << '\n';
  }
}

inline void write_beampattern_csv(const std::vector<BeampatternSample>& scan, std::ostream& os) {
  os << "theta_rad,gain_w\n";
  os << std::setprecision(12);
  for (const auto& b : scan) os << b.theta << ',' << b.gain << '\n';
}

inline void write_trace_csv(const std::vector<double>& trace, std::ostream& os) {
  os << "iter,objective\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) os << i << ',' << trace[i] << '\n';
}

}  // namespace maisac
