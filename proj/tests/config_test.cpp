#include "support.hpp"

#include <filesystem>

namespace maisac {
namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Config, ShippedDefaultsConvertUnits) {
  const ExperimentConfig cfg = load_config(std::string(MAISAC_CONFIG_DIR) + "/default.json");
  const Scenario& s = cfg.scenario;
  EXPECT_EQ(s.num_gns, 5);
  EXPECT_EQ(s.num_antennas, 6);
  EXPECT_EQ(s.num_slots, 10);
  ASSERT_EQ(s.noise_power.size(), 5u);
  for (double n : s.noise_power) EXPECT_NEAR(n, 1e-14, 1e-26);
  EXPECT_NEAR(s.ref_gain, 1e-6, 1e-18);
  EXPECT_NEAR(s.rician_factor, 10.0, 1e-12);
  EXPECT_NEAR(s.beampattern_threshold, 1e-5, 1e-17);
  EXPECT_NEAR(s.aperture, 1.0, 1e-12);
  EXPECT_NEAR(s.min_spacing, 0.05, 1e-14);
  EXPECT_EQ(s.gn_positions.size(), 6u);
  EXPECT_DOUBLE_EQ(s.ulap_position[0], 250.0);
  EXPECT_EQ(cfg.pso.swarm_size, 50);
  EXPECT_EQ(cfg.ao.max_iter, 10);
}

TEST(Config, EveryShippedFileLoads) {
  for (const auto& entry : std::filesystem::directory_iterator(MAISAC_CONFIG_DIR))
    if (entry.path().extension() == ".json") EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
}

TEST(Config, EmptyObjectGivesDefaults) {
  const ExperimentConfig cfg = parse_config("{}");
  EXPECT_EQ(cfg.scenario.num_gns, 5);
  EXPECT_NEAR(cfg.scenario.noise_power[0], 1e-14, 1e-26);
  EXPECT_DOUBLE_EQ(cfg.scenario.max_power, 1.0);
}

TEST(Config, DegenerateSizesAreValid) {
  EXPECT_NO_THROW(parse_config(R"({"num_gns": 1, "num_antennas": 1, "num_slots": 1})"));
}

TEST(Config, RejectsBadInput) {
  EXPECT_EQ(field_of(R"({"num_antennas": 30})"), "geometry.aperture");
  EXPECT_EQ(field_of(R"({"num_gns": 0})"), "num_gns");
  EXPECT_EQ(field_of(R"({"power": {"max_power_w": -1}})"), "power.max_power");
  EXPECT_EQ(field_of(R"({"colour": 1})"), "colour");
  EXPECT_EQ(field_of(R"({"pso": {"swarm": 3}})"), "pso.swarm");
  EXPECT_EQ(field_of(R"({"power": {"max_power_w": 1, "max_power_dbm": 30}})"), "power.max_power_dbm");
  EXPECT_EQ(field_of(R"({"channel": {"fading": "slow"}})"), "channel.fading");
  EXPECT_EQ(field_of(R"({"num_slots": "ten"})"), "num_slots");
  EXPECT_EQ(field_of("{"), "");
  EXPECT_EQ(field_of(R"({"pso": {"max_iter": -1}})"), "pso.max_iter");
}

TEST(Config, NoiseAcceptsListOrScalar) {
  const auto list = parse_config(R"({"num_gns": 2, "power": {"noise_power_w": [1e-13, 2e-13]}})");
  EXPECT_DOUBLE_EQ(list.scenario.noise_power[1], 2e-13);
  const auto scalar = parse_config(R"({"num_gns": 3, "power": {"noise_power_dbm": -100}})");
  ASSERT_EQ(scalar.scenario.noise_power.size(), 3u);
  EXPECT_NEAR(scalar.scenario.noise_power[2], 1e-13, 1e-25);
  EXPECT_EQ(field_of(R"({"num_gns": 3, "power": {"noise_power_w": [1e-13]}})"), "power.noise_power");
}

TEST(Config, RoundTripIsExact) {
  const ExperimentConfig cfg = parse_config(R"({"num_gns": 3, "num_antennas": 4, "channel": {"fading": "block"},
                                               "geometry": {"array_axis_azimuth_deg": 30}})");
  const std::string text = serialize(cfg);
  const ExperimentConfig back = parse_config(text);
  EXPECT_EQ(back.scenario, cfg.scenario);
  EXPECT_EQ(serialize(back), text);
}

TEST(Config, LayoutFollowsSeed) {
  const auto a = parse_config(R"({"rng_seed": 4})");
  const auto b = parse_config(R"({"rng_seed": 4})");
  const auto c = parse_config(R"({"rng_seed": 5})");
  EXPECT_EQ(a.scenario.gn_positions, b.scenario.gn_positions);
  EXPECT_NE(a.scenario.gn_positions, c.scenario.gn_positions);
}

}  // namespace
}  // namespace maisac
