#include "support.hpp"

namespace maisac {
namespace {

struct PsoFixture {
  Scenario s;
  ChannelState h;
  BeamformingSolution bf;
};

// Random rank-one beams so that fitness depends on the placement.
PsoFixture fixture(int gns, int m, double threshold, std::uint64_t seed) {
  std::vector<Vec2> gn{{40.0, -30.0}, {-60.0, 20.0}, {10.0, 90.0}};
  gn.resize(static_cast<std::size_t>(gns));
  gn.push_back({80.0, 80.0});
  PsoFixture f{test::hand_scenario(gns, m, 1, gn), {}, {}};
  f.s.aperture = 1.0;
  f.s.min_spacing = 0.05;
  f.s.beampattern_threshold = threshold;
  validate(f.s);
  f.h = sample_channel(f.s, seed);
  std::mt19937_64 rng(seed);
  f.bf = BeamformingSolution::zeros(1, gns, m);
  for (auto& w : f.bf.w[0]) w = detail::random_psd(m, 1, 0.8 / gns, rng);
  f.bf.s[0] = detail::random_psd(m, 1, 0.2, rng);
  return f;
}

TEST(UpdateVelocity, HandComputedAndClamped) {
  Particle p;
  p.position = {0.0, 0.0};
  p.velocity = {0.1, 0.0};
  p.best_position = {1.0, 1.0};
  PsoParams params;
  const auto v = update_velocity(p, {2.0, 0.0}, 0.9, params, 0.5, 0.2, 1.0);
  EXPECT_NEAR(v[0], 1.0, 1e-15);  // 0.09 + 0.75 + 0.6 clamped
  EXPECT_NEAR(v[1], 0.75, 1e-15);
  const auto neg = update_velocity(p, {-5.0, 0.0}, 0.9, params, 0.0, 1.0, 1.0);
  EXPECT_NEAR(neg[0], -1.0, 1e-15);
}

TEST(UpdatePosition, StepAndClamp) {
  const auto x = update_position({1.0, 2.0}, {0.5, -0.5}, 1.0, 3.0);
  EXPECT_DOUBLE_EQ(x[0], 1.5);
  EXPECT_DOUBLE_EQ(x[1], 1.5);
  const auto clamped = update_position({0.1, 0.9}, {-0.5, 0.5}, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(clamped[0], 0.0);
  EXPECT_DOUBLE_EQ(clamped[1], 1.0);
}

TEST(RepairParticle, RestoresSpacing) {
  const PsoFixture f = fixture(2, 3, 0.0, 1);
  const PsoContext ctx{f.s, f.h, f.bf};
  std::mt19937_64 rng(1);
  const auto x = repair_particle({0.2, 0.21, 0.22}, ctx, PsoParams{}, rng);
  EXPECT_TRUE(is_feasible(x, f.s.aperture, f.s.min_spacing));
}

TEST(RepairParticle, UnreachableThresholdExhausts) {
  const PsoFixture f = fixture(2, 3, 10.0, 1);
  const PsoContext ctx{f.s, f.h, f.bf};
  std::mt19937_64 rng(1);
  PsoParams params;
  params.repair_retries = 5;
  EXPECT_THROW(repair_particle({0.1, 0.5, 0.9}, ctx, params, rng), RepairExhaustedError);
}

TEST(RepairParticle, RedrawsUntilThresholdHolds) {
  PsoFixture f = fixture(2, 4, 0.0, 2);
  const PsoContext ctx{f.s, f.h, f.bf};
  f.s.beampattern_threshold = 0.5 * beampattern_margin(AntennaPositions({0.0, 0.3, 0.6, 0.9}), ctx);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = repair_particle(uniform_positions(4, 1.0, rng), ctx, PsoParams{}, rng);
    EXPECT_TRUE(is_feasible(x, 1.0, 0.05));
    EXPECT_TRUE(satisfies_beampattern(AntennaPositions(x), ctx));
  }
}

TEST(RunPso, ZeroIterationsKeepsBestInitialParticle) {
  const PsoFixture f = fixture(2, 3, 0.0, 4);
  const PsoContext ctx{f.s, f.h, f.bf};
  PsoParams params;
  params.max_iter = 0;
  std::mt19937_64 rng(4);
  const PsoResult r = run_pso(ctx, params, rng);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_DOUBLE_EQ(r.best_fitness, r.trace[0].best_fitness);
  EXPECT_DOUBLE_EQ(fitness(r.best, ctx), r.best_fitness);
}

TEST(RunPso, BestFitnessTraceNonDecreasing) {
  const PsoFixture f = fixture(3, 4, 0.0, 5);
  const PsoContext ctx{f.s, f.h, f.bf};
  std::mt19937_64 rng(5);
  const PsoResult r = run_pso(ctx, PsoParams{}, rng);
  ASSERT_EQ(r.trace.size(), 101u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i].best_fitness, r.trace[i - 1].best_fitness);
  for (const auto& row : r.trace) EXPECT_LE(row.mean_fitness, row.best_fitness + 1e-12);
  EXPECT_TRUE(is_feasible(r.best, f.s.aperture, f.s.min_spacing));
}

TEST(RunPso, NeverBelowIncumbent) {
  const PsoFixture f = fixture(3, 4, 0.0, 6);
  const PsoContext ctx{f.s, f.h, f.bf};
  PsoParams params;
  params.swarm_size = 5;
  params.max_iter = 3;
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const AntennaPositions incumbent = repair_spacing(uniform_positions(4, 1.0, rng), 0.05, 1.0);
    const PsoResult r = run_pso(ctx, params, rng, incumbent);
    EXPECT_GE(r.best_fitness, fitness(incumbent, ctx));
  }
}

TEST(RunPso, DeterministicPerSeed) {
  const PsoFixture f = fixture(2, 3, 0.0, 7);
  const PsoContext ctx{f.s, f.h, f.bf};
  std::mt19937_64 a(9), b(9);
  const PsoResult ra = run_pso(ctx, PsoParams{}, a);
  const PsoResult rb = run_pso(ctx, PsoParams{}, b);
  EXPECT_EQ(ra.best, rb.best);
  EXPECT_EQ(ra.best_fitness, rb.best_fitness);
}

TEST(Fitness, SingleAntennaIsPlacementInvariant) {
  const PsoFixture f = fixture(2, 1, 0.0, 8);
  const PsoContext ctx{f.s, f.h, f.bf};
  const double ref = fitness(AntennaPositions({0.0}), ctx);
  for (double x : {0.1, 0.37, 0.5, 1.0}) EXPECT_NEAR(fitness(AntennaPositions({x}), ctx), ref, 1e-12);
}

TEST(RunPso, TwoAntennasMatchGridSearch) {
  const PsoFixture f = fixture(2, 2, 0.0, 10);
  const PsoContext ctx{f.s, f.h, f.bf};
  double grid_best = -1.0;
  const int steps = 400;
  for (int i = 0; i <= steps; ++i)
    for (int j = i; j <= steps; ++j) {
      const double x0 = static_cast<double>(i) / steps;
      const double x1 = static_cast<double>(j) / steps;
      if (x1 - x0 < 0.05) continue;
      grid_best = std::max(grid_best, fitness(AntennaPositions({x0, x1}), ctx));
    }
  std::mt19937_64 rng(10);
  const PsoResult r = run_pso(ctx, PsoParams{}, rng);
  EXPECT_GE(r.best_fitness, grid_best - 1e-3 * grid_best);
}

TEST(WritePsoTrace, Header) {
  std::ostringstream os;
  write_pso_trace_csv({{0, 1.0, 0.5}}, os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "iter,best_fitness,mean_fitness");
}

}  // namespace
}  // namespace maisac
