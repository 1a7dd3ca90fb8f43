#include "support.hpp"

namespace maisac {
namespace {

using test::cx;

constexpr double kNoise = 1e-14;

SlotPoint rate_slot() {
  SlotPoint pt;
  pt.w = {test::outer(test::vec({cx(0.3, 0.1), cx(-0.2, 0.4)})), test::outer(test::vec({cx(0.1, -0.3), cx(0.5, 0.2)}))};
  pt.s = CMatrix(2, 2);
  pt.s << cx(0.05, 0), cx(0.01, 0.02), cx(0.01, -0.02), cx(0.04, 0);
  return pt;
}

Scenario small_scenario(int gns, int m, int slots, double threshold) {
  std::vector<Vec2> gn{{40.0, -30.0}, {-60.0, 20.0}, {10.0, 90.0}, {-35.0, -70.0}};
  gn.resize(static_cast<std::size_t>(gns));
  gn.push_back({80.0, 80.0});
  Scenario s = test::hand_scenario(gns, m, slots, gn);
  s.beampattern_threshold = threshold;
  validate(s);
  return s;
}

TEST(Linearization, MatchesFrozenReference) {
  const CVector a = steering_vector(AntennaPositions({0.0, 0.13}), 0.3, 0.1);
  const CMatrix lin = linearization(0, rate_slot(), 2e-10, a, kNoise);
  CMatrix want(2, 2);
  want << cx(2.1491792772025242, 0), cx(-1.6559710941838437, -1.3699384295596384),
      cx(-1.6559710941838437, 1.3699384295596384), cx(2.1491792772025242, 0);
  EXPECT_TRUE(test::near_matrix(lin, want, 1e-12));
}

TEST(TrueRate, MatrixFormMatchesRateModel) {
  const AntennaPositions x({0.0, 0.13});
  const std::vector<CVector> a{steering_vector(x, 0.3, 0.1), steering_vector(x, -0.55, 0.1)};
  const SlotPoint pt = rate_slot();
  const double want[2] = {std::log2(1.0 + 0.75870184355132464), std::log2(1.0 + 1.1548891964143115)};
  const double power[2] = {2e-10, 5e-11};
  for (int k = 0; k < 2; ++k)
    EXPECT_NEAR(true_rate_matrix_form(k, pt, power[k], a[static_cast<std::size_t>(k)], kNoise), want[k], 1e-12);
}

TEST(LowerBound, TightAtExpansionPoint) {
  const CVector a = steering_vector(AntennaPositions({0.0, 0.13}), 0.3, 0.1);
  const SlotPoint pt = rate_slot();
  EXPECT_NEAR(lower_bound_rate(0, pt, pt, 2e-10, a, kNoise), true_rate_matrix_form(0, pt, 2e-10, a, kNoise), 1e-13);
}

TEST(LowerBound, RandomizedMinorant) {
  const CheckResult r = check_lower_bound(300, 3, 41);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Reconstruction, MatchesFrozenReference) {
  const CVector a = steering_vector(AntennaPositions({0.0, 0.13}), 0.3, 0.1);
  const Reconstruction rec = rank_one_reconstruct({CMatrix::Identity(2, 2)}, CMatrix::Zero(2, 2), {a});
  CMatrix want(2, 2);
  want << cx(0.5, 0), cx(-0.38525662138789452, -0.31871199487434487), cx(-0.38525662138789452, 0.31871199487434487),
      cx(0.5, 0);
  EXPECT_TRUE(test::near_matrix(rec.point.w[0], want, 1e-12));
  EXPECT_TRUE(test::near_matrix(rec.point.s, CMatrix::Identity(2, 2) - want, 1e-12));
  const RVector eig = hermitian_eig(rec.point.s).values;
  EXPECT_NEAR(eig(0), 0.0, 1e-12);
  EXPECT_NEAR(eig(1), 1.0, 1e-12);
  ASSERT_TRUE(rec.beams[0].has_value());
}

TEST(Reconstruction, RandomizedProperties) {
  const CheckResult r = check_reconstruction(200, 42);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Reconstruction, ZeroCovarianceMovesToSensing) {
  std::mt19937_64 rng(43);
  const CVector a = detail::random_steering(3, 0.1, rng);
  const CMatrix w1 = detail::random_psd(3, 2, 0.4, rng);
  const Reconstruction rec = rank_one_reconstruct({CMatrix::Zero(3, 3), w1}, CMatrix::Zero(3, 3), {a, a});
  EXPECT_FALSE(rec.beams[0].has_value());
  EXPECT_TRUE(test::near_matrix(rec.point.w[0], CMatrix::Zero(3, 3), 0.0));
  EXPECT_LE(rec.check.covariance_error, 1e-12);
}

TEST(Threshold, UnreachableThresholdIsInfeasible) {
  Scenario s = small_scenario(2, 4, 1, 4.0 * 1.0 + 0.1);
  EXPECT_THROW(check_threshold_feasible(s), InfeasibleError);
  s.beampattern_threshold = 3.9;
  EXPECT_NO_THROW(check_threshold_feasible(s));
}

TEST(DefaultInit, FeasibleForAnyReachableThreshold) {
  for (double threshold : {0.0, 1e-5, 0.5, 1.0, 3.0, 5.9}) {
    const Scenario s = small_scenario(3, 6, 2, threshold);
    const AntennaPositions x({0.0, 0.1, 0.2, 0.4, 0.7, 1.0});
    const auto a = steering_vectors(x, s);
    const BeamformingSolution init = default_init(s, a[static_cast<std::size_t>(s.target_index())]);
    const ConstraintReport check = check_constraints(x, init, s);
    EXPECT_TRUE(check.power_ok && check.psd_ok && check.beampattern_ok) << "threshold " << threshold;
    EXPECT_NEAR(transmit_power(init, 0), s.max_power, 1e-12);
  }
}

TEST(RunBeamforming, ZeroIterationsReturnsReconstructedInit) {
  const Scenario s = small_scenario(2, 3, 2, 1e-5);
  const ChannelState h = sample_channel(s, 1);
  const AntennaPositions x({0.0, 0.3, 0.6});
  const auto a = steering_vectors(x, s);
  const BeamformingSolution init = default_init(s, a[static_cast<std::size_t>(s.target_index())]);
  ScaParams params;
  params.max_iter = 0;
  const BeamformingResult r = run_beamforming(x, h, s, init, params);
  EXPECT_EQ(r.iterations, 0);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_NEAR(total_rate(h, x, r.solution, s), r.trace[0], 1e-9);
}

TEST(RunBeamforming, ObjectiveNeverDecreases) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Scenario s = small_scenario(3, 4, 2, 1e-5);
    const ChannelState h = sample_channel(s, seed);
    const AntennaPositions x({0.05, 0.3, 0.62, 0.9});
    const auto a = steering_vectors(x, s);
    const BeamformingResult r =
        run_beamforming(x, h, s, default_init(s, a[static_cast<std::size_t>(s.target_index())]));
    for (std::size_t j = 1; j < r.trace.size(); ++j) EXPECT_GE(r.trace[j], r.trace[j - 1] - 1e-9);
    EXPECT_GT(r.trace.back(), r.trace.front());
    const ConstraintReport check = check_constraints(x, r.solution, s);
    EXPECT_TRUE(check.power_ok && check.psd_ok && check.beampattern_ok);
    EXPECT_NEAR(total_rate(h, x, r.solution, s), r.trace.back(), 1e-6);
  }
}

TEST(RunBeamforming, SingleUserReachesMatchedFilterRate) {
  Scenario s = small_scenario(1, 4, 2, 0.0);
  s.rician_factor = kPureLosRicianFactor;
  const ChannelState h = sample_channel(s, 1);
  const AntennaPositions x({0.0, 0.25, 0.5, 0.75});
  const auto a = steering_vectors(x, s);
  ScaParams params;
  params.max_iter = 50;
  params.tol = 1e-9;
  const BeamformingResult r = run_beamforming(x, h, s, default_init(s, a[1]), params);
  double want = 0.0;
  for (int t = 0; t < s.num_slots; ++t) want += std::log2(1.0 + h.power(0, t) * s.max_power * 4 / s.noise_power[0]);
  EXPECT_NEAR(total_rate(h, x, r.solution, s), want, 1e-3);
  ASSERT_TRUE(r.solution.beams[0][0].has_value());
}

}  // namespace
}  // namespace maisac
