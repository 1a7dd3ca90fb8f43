#include "support.hpp"

namespace maisac {
namespace {

Scenario two_node_scenario(int slots, double kappa) {
  Scenario s = test::hand_scenario(1, 2, slots, {{30.0, 40.0}, {0.0, 120.0}});
  s.rician_factor = kappa;
  validate(s);
  return s;
}

TEST(LargeScaleGain, Values) {
  EXPECT_DOUBLE_EQ(large_scale_gain(1e-6, 1.0), 1e-6);
  EXPECT_NEAR(large_scale_gain(1e-6, 50.0), 4e-10, 1e-24);
  EXPECT_NEAR(large_scale_gain(1e-6, 70.711), 1.9999817917657713e-10, 1e-24);
  EXPECT_THROW(large_scale_gain(1e-6, 0.0), std::invalid_argument);
  EXPECT_THROW(large_scale_gain(1e-6, -3.0), std::invalid_argument);
}

TEST(LargeScaleGain, InverseSquare) {
  for (double d : {1.0, 7.5, 50.0, 300.0})
    EXPECT_NEAR(large_scale_gain(1e-6, 2.0 * d) / large_scale_gain(1e-6, d), 0.25, 1e-15);
}

TEST(SampleChannel, PureLineOfSight) {
  const Scenario s = two_node_scenario(4, kPureLosRicianFactor);
  const ChannelState h = sample_channel(s, 3);
  for (int k = 0; k < s.num_nodes(); ++k) {
    const double want = large_scale_gain(s.ref_gain, distance(s, k));
    for (int t = 0; t < s.num_slots; ++t) {
      EXPECT_NEAR(h.power(k, t), want, 1e-12 * want);
      EXPECT_NEAR(h.h(k, t).imag(), 0.0, 1e-20);
    }
  }
}

TEST(SampleChannel, RayleighMeanPower) {
  const Scenario s = two_node_scenario(100000, 0.0);
  const ChannelState h = sample_channel(s, 11);
  for (int k = 0; k < s.num_nodes(); ++k) {
    double mean = 0.0;
    for (int t = 0; t < s.num_slots; ++t) mean += h.power(k, t);
    mean /= s.num_slots;
    const double want = large_scale_gain(s.ref_gain, distance(s, k));
    EXPECT_NEAR(mean, want, 0.02 * want);
  }
}

TEST(SampleChannel, RicianMeanPowerIsLargeScaleGain) {
  const Scenario s = two_node_scenario(100000, 10.0);
  const ChannelState h = sample_channel(s, 12);
  double mean = 0.0;
  for (int t = 0; t < s.num_slots; ++t) mean += h.power(0, t);
  mean /= s.num_slots;
  const double want = large_scale_gain(s.ref_gain, distance(s, 0));
  EXPECT_NEAR(mean, want, 0.01 * want);
}

TEST(SampleChannel, DeterministicPerSeed) {
  const Scenario s = two_node_scenario(8, 10.0);
  EXPECT_EQ(sample_channel(s, 5), sample_channel(s, 5));
  EXPECT_NE(sample_channel(s, 5), sample_channel(s, 6));
}

TEST(SampleChannel, BlockFadingRepeatsAcrossSlots) {
  Scenario s = two_node_scenario(6, 1.0);
  s.fading = FadingMode::kBlock;
  const ChannelState h = sample_channel(s, 7);
  for (int k = 0; k < s.num_nodes(); ++k)
    for (int t = 1; t < s.num_slots; ++t) EXPECT_EQ(h.h(k, t), h.h(k, 0));
  s.fading = FadingMode::kPerSlot;
  const ChannelState g = sample_channel(s, 7);
  EXPECT_NE(g.h(0, 1), g.h(0, 0));
}

TEST(SampleChannel, Shape) {
  const Scenario s = test::hand_scenario(3, 2, 5, {{1, 2}, {3, 4}, {5, 6}, {7, 8}});
  const ChannelState h = sample_channel(s, 1);
  EXPECT_EQ(h.num_nodes, 4);
  EXPECT_EQ(h.num_slots, 5);
  EXPECT_EQ(h.gains.size(), 20u);
}

TEST(DumpChannel, CsvRows) {
  const Scenario s = two_node_scenario(3, 10.0);
  const ChannelState h = sample_channel(s, 1);
  std::ostringstream os;
  dump_channel_csv(h, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "node,slot,power");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

}  // namespace
}  // namespace maisac
