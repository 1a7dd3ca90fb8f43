// maisac: command-line front end for the movable-antenna ISAC optimizer.

#include "maisac/maisac.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace maisac;

namespace {

enum ExitCode { kOk = 0, kCheckFailed = 1, kConfig = 2, kInfeasible = 3, kNumerical = 4, kIo = 5 };

struct Common {
  std::string scenario;
  std::uint64_t seed = 1;
  int seeds = 10;
  std::string scheme = "all";
  std::string out = ".";
  int threads = 1;
  bool record_timings = false;
};

ExperimentConfig load(const Common& c) {
  return c.scenario.empty() ? parse_config("{}") : load_config(c.scenario);
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot write " + path.string());
  return os;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

void add_common(CLI::App* app, Common& c, const std::string& default_scheme) {
  c.scheme = default_scheme;
  app->add_option("--scenario", c.scenario, "JSON scenario file (defaults built in)")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "instance seed (first replicate for sweeps)")->capture_default_str();
  app->add_option("--seeds", c.seeds, "replicates per grid point")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--scheme", c.scheme, "ma, fpa, rpa or all")->capture_default_str();
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads for independent cells")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_flag("--record-timings", c.record_timings, "write measured wall_ms instead of 0");
}

int cmd_run(const Common& c, bool pso_trace, bool sca_trace, bool dump_channel) {
  const ExperimentConfig cfg = load(c);
  const ExperimentParams params = ExperimentParams::from(cfg);
  const Instance inst = make_instance(cfg.scenario, c.seed);
  std::vector<SweepRow> rows;
  for (Scheme scheme : parse_schemes(c.scheme)) {
    const AoResult r = run_scheme(scheme, inst, params);
    rows.push_back(make_row(r, inst, inst.scenario.max_power, c.record_timings));
    const std::string tag = lower(scheme_name(scheme));
    {
      auto os = open_out(c, "trace_" + tag + ".csv");
      write_trace_csv(r.trace, os);
    }
    if (pso_trace && scheme == Scheme::kMA) {
      auto os = open_out(c, "pso_trace.csv");
      write_pso_trace_csv(r.pso_trace, os);
    }
    if (sca_trace) {
      auto os = open_out(c, "sca_trace_" + tag + ".csv");
      write_trace_csv(r.sca_trace, os);
    }
    std::cout << scheme_name(scheme) << ": total rate " << r.total_rate << " bit/s/Hz after " << r.iterations
              << " pass(es)\n";
  }
  if (dump_channel) {
    auto os = open_out(c, "channel.csv");
    dump_channel_csv(inst.channel, os);
  }
  auto os = open_out(c, "run.csv");
  write_sweep_csv(rows, os);
  return kOk;
}

SweepOptions sweep_options(const Common& c) {
  SweepOptions o;
  o.schemes = parse_schemes(c.scheme);
  o.seeds = c.seeds;
  o.base_seed = c.seed;
  o.threads = c.threads;
  o.record_timings = c.record_timings;
  return o;
}

int cmd_sweep_power(const Common& c, const std::vector<double>& powers) {
  const ExperimentConfig cfg = load(c);
  const auto rows = sweep_power(cfg.scenario, ExperimentParams::from(cfg), powers, sweep_options(c));
  auto os = open_out(c, "sweep_power.csv");
  write_sweep_csv(rows, os);
  std::cout << rows.size() << " rows written\n";
  return kOk;
}

int cmd_sweep_antennas(const Common& c, const std::vector<int>& counts) {
  const ExperimentConfig cfg = load(c);
  const auto rows = sweep_antennas(cfg.scenario, ExperimentParams::from(cfg), counts, sweep_options(c));
  auto os = open_out(c, "sweep_antennas.csv");
  write_sweep_csv(rows, os);
  std::cout << rows.size() << " rows written\n";
  return kOk;
}

int cmd_beampattern(const Common& c, int points, const std::optional<double>& threshold_dbm) {
  ExperimentConfig cfg = load(c);
  if (threshold_dbm) cfg.scenario.beampattern_threshold = dbm_to_watts(*threshold_dbm);
  validate(cfg.scenario);
  const ExperimentParams params = ExperimentParams::from(cfg);
  const Instance inst = make_instance(cfg.scenario, c.seed);
  for (Scheme scheme : parse_schemes(c.scheme)) {
    const AoResult r = run_scheme(scheme, inst, params);
    const ConstraintReport check = check_constraints(r.positions, r.solution, inst.scenario);
    if (!check.all()) throw NumericalError("final solution fails the constraint check");
    auto os = open_out(c, "beampattern_" + lower(scheme_name(scheme)) + ".csv");
    write_beampattern_csv(beampattern_scan(r, inst.scenario, points), os);
    double sensing = 0.0;
    for (int t = 0; t < r.solution.num_slots(); ++t) sensing += sensing_power(r.solution, t);
    std::cout << scheme_name(scheme) << ": target gain " << check.min_target_gain << " W (threshold "
              << inst.scenario.beampattern_threshold << " W), mean tr(S) " << sensing / r.solution.num_slots()
              << " W\n";
  }
  return kOk;
}

int cmd_validate(const Common& c) {
  bool ok = true;
  for (const auto& r : run_validation(c.seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-antenna ISAC sum-rate optimizer"};
  app.require_subcommand(1);

  Common run_opts, power_opts, antenna_opts, pattern_opts, validate_opts;
  bool pso_trace = false, sca_trace = false, dump_channel = false;
  std::vector<double> powers{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<int> antennas{4, 6, 8, 10};
  int points = 181;
  std::optional<double> threshold_dbm;

  auto* run = app.add_subcommand("run", "single solve of one instance");
  add_common(run, run_opts, "ma");
  run->add_flag("--pso-trace", pso_trace, "write the last PSO call's convergence trace");
  run->add_flag("--sca-trace", sca_trace, "write the last SCA call's objective trace");
  run->add_flag("--dump-channel", dump_channel, "write the sampled channel powers");

  auto* power = app.add_subcommand("sweep-power", "rate versus transmit power");
  add_common(power, power_opts, "all");
  power->add_option("--powers", powers, "transmit powers in W, ascending")->delimiter(',')->capture_default_str();

  auto* ant = app.add_subcommand("sweep-antennas", "rate versus number of antennas");
  add_common(ant, antenna_opts, "all");
  ant->add_option("--antennas", antennas, "antenna counts")->delimiter(',')->capture_default_str();

  auto* pattern = app.add_subcommand("beampattern", "gain versus angle for one solved instance");
  add_common(pattern, pattern_opts, "ma");
  pattern->add_option("--points", points, "angles on [0, pi/2]")->capture_default_str()->check(CLI::PositiveNumber);
  pattern->add_option("--threshold-dbm", threshold_dbm, "override the beampattern threshold");

  auto* check = app.add_subcommand("validate", "run the numerical self-checks");
  add_common(check, validate_opts, "all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_opts, pso_trace, sca_trace, dump_channel);
    if (*power) return cmd_sweep_power(power_opts, powers);
    if (*ant) return cmd_sweep_antennas(antenna_opts, antennas);
    if (*pattern) return cmd_beampattern(pattern_opts, points, threshold_dbm);
    if (*check) return cmd_validate(validate_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const RepairExhaustedError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
