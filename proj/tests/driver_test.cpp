#include "support.hpp"

#include <chrono>

namespace maisac {
namespace {

Scenario base_scenario(int gns, int m, int slots) {
  Scenario s = parse_config("{}").scenario;
  s.num_gns = gns;
  s.num_antennas = m;
  s.num_slots = slots;
  s.noise_power.assign(static_cast<std::size_t>(gns), 1e-14);
  s.gn_positions = random_gn_positions(gns + 1, s.area, 1);
  validate(s);
  return s;
}

ExperimentParams quick_params() {
  ExperimentParams p;
  p.pso.swarm_size = 10;
  p.pso.max_iter = 10;
  p.ao.max_iter = 3;
  return p;
}

TEST(FixedPositions, HalfWavelengthGrid) {
  const Scenario s = base_scenario(2, 4, 1);
  const AntennaPositions x = fixed_positions(s);
  ASSERT_EQ(x.size(), 4u);
  for (std::size_t m = 0; m < 4; ++m) EXPECT_NEAR(x[m], 0.05 * static_cast<double>(m), 1e-15);
  EXPECT_TRUE(is_feasible(x, s.aperture, s.min_spacing));
}

TEST(MakeInstance, DeterministicAndSeedDependent) {
  const Scenario s = base_scenario(3, 4, 2);
  const Instance a = make_instance(s, 7);
  const Instance b = make_instance(s, 7);
  const Instance c = make_instance(s, 8);
  EXPECT_EQ(a.scenario, b.scenario);
  EXPECT_EQ(a.channel, b.channel);
  EXPECT_NE(a.channel, c.channel);
  EXPECT_NE(a.scenario.gn_positions, c.scenario.gn_positions);
}

TEST(Schemes, SingleUserWithoutSensingIgnoresPlacement) {
  Scenario s = base_scenario(1, 4, 2);
  s.beampattern_threshold = 0.0;
  const Instance inst = make_instance(s, 3);
  ExperimentParams params = quick_params();
  params.sca.max_iter = 50;
  params.sca.tol = 1e-9;
  const double fpa = run_scheme(Scheme::kFPA, inst, params).total_rate;
  const double ma = run_scheme(Scheme::kMA, inst, params).total_rate;
  EXPECT_NEAR(fpa, ma, 1e-3 * ma);
}

TEST(Schemes, SingleAntennaSchemesCoincide) {
  const Instance inst = make_instance(base_scenario(3, 1, 2), 4);
  const ExperimentParams params = quick_params();
  const double fpa = run_scheme(Scheme::kFPA, inst, params).total_rate;
  const double rpa = run_scheme(Scheme::kRPA, inst, params).total_rate;
  const double ma = run_scheme(Scheme::kMA, inst, params).total_rate;
  EXPECT_NEAR(fpa, rpa, 1e-9);
  EXPECT_NEAR(ma, fpa, 1e-3 * fpa);
}

TEST(Schemes, DeterministicPerSeed) {
  const Instance inst = make_instance(base_scenario(3, 4, 2), 5);
  const ExperimentParams params = quick_params();
  for (Scheme scheme : {Scheme::kMA, Scheme::kFPA, Scheme::kRPA}) {
    const AoResult a = run_scheme(scheme, inst, params);
    const AoResult b = run_scheme(scheme, inst, params);
    EXPECT_EQ(a.total_rate, b.total_rate) << scheme_name(scheme);
    EXPECT_EQ(a.positions, b.positions) << scheme_name(scheme);
  }
}

TEST(Schemes, SmokeRunIsFeasibleAndOrdered) {
  const auto start = std::chrono::steady_clock::now();
  const Instance inst = make_instance(base_scenario(3, 4, 2), 6);
  const ExperimentParams params;
  const AoResult ma = run_scheme(Scheme::kMA, inst, params);
  const AoResult rpa = run_scheme(Scheme::kRPA, inst, params);
  const AoResult fpa = run_scheme(Scheme::kFPA, inst, params);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 60.0);
  for (const AoResult* r : {&ma, &rpa, &fpa}) {
    EXPECT_TRUE(check_constraints(r->positions, r->solution, inst.scenario).all()) << scheme_name(r->scheme);
    EXPECT_GT(r->total_rate, 0.0);
    EXPECT_TRUE(std::isfinite(r->total_rate));
  }
  EXPECT_GE(ma.total_rate, rpa.total_rate - 1e-6);
  for (std::size_t i = 1; i < ma.trace.size(); ++i) EXPECT_GE(ma.trace[i], ma.trace[i - 1] - 1e-6);
}

TEST(Sweep, RowOrderShapeAndThreadInvariance) {
  SweepOptions opt;
  opt.seeds = 2;
  const Scenario s = base_scenario(2, 3, 1);
  const auto rows = sweep_power(s, quick_params(), {0.5, 1.0}, opt);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0].scheme, Scheme::kMA);
  EXPECT_EQ(rows[11].scheme, Scheme::kRPA);
  EXPECT_DOUBLE_EQ(rows[2].grid_param, 1.0);
  EXPECT_EQ(rows[1].seed, 2u);
  for (const auto& r : rows) {
    EXPECT_LE(r.power, r.grid_param * (1.0 + 1e-6));
    EXPECT_EQ(r.wall_ms, 0.0);
  }

  opt.threads = 2;
  const auto threaded = sweep_power(s, quick_params(), {0.5, 1.0}, opt);
  std::ostringstream a, b;
  write_sweep_csv(rows, a);
  write_sweep_csv(threaded, b);
  const std::string text = a.str();
  EXPECT_EQ(text, b.str());
  EXPECT_EQ(text.substr(0, text.find('\n')), "scheme,grid_param,seed,total_rate_bps_hz,beampattern_w,power_w,iters,wall_ms");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 13);
}

TEST(Sweep, RejectsBadGrids) {
  const Scenario s = base_scenario(2, 3, 1);
  EXPECT_THROW(sweep_power(s, quick_params(), {1.0, 0.5}, {}), ConfigError);
  EXPECT_THROW(sweep_power(s, quick_params(), {0.0}, {}), ConfigError);
  EXPECT_THROW(sweep_antennas(s, quick_params(), {4, 40}, {}), ConfigError);
}

TEST(BeampatternScan, ZeroSolutionIsFlatZero) {
  const Scenario s = base_scenario(2, 3, 2);
  const auto scan = beampattern_scan(fixed_positions(s), BeamformingSolution::zeros(2, 2, 3), s, 181);
  ASSERT_EQ(scan.size(), 181u);
  EXPECT_DOUBLE_EQ(scan.front().theta, 0.0);
  EXPECT_NEAR(scan.back().theta, kPi / 2.0, 1e-15);
  for (const auto& b : scan) EXPECT_EQ(b.gain, 0.0);
}

TEST(BeampatternScan, MatchedBeamPeaksAtItsAngle) {
  const Scenario s = base_scenario(1, 6, 1);
  const AntennaPositions x = fixed_positions(s);
  auto sol = BeamformingSolution::zeros(1, 1, 6);
  const CVector a = steering_vector(x, std::cos(kPi / 4.0), s.wavelength);
  sol.s[0] = a * a.adjoint() / 6.0;
  const auto scan = beampattern_scan(x, sol, s, 91);
  const auto peak = std::max_element(scan.begin(), scan.end(), [](auto& l, auto& r) { return l.gain < r.gain; });
  EXPECT_NEAR(peak->theta, kPi / 4.0, 1e-12);
  EXPECT_NEAR(peak->gain, 6.0, 1e-12);
}

TEST(ParseSchemes, Names) {
  EXPECT_EQ(parse_schemes("all").size(), 3u);
  EXPECT_EQ(parse_schemes("fpa"), std::vector<Scheme>{Scheme::kFPA});
  EXPECT_THROW(parse_schemes("best"), ConfigError);
}

}  // namespace
}  // namespace maisac
