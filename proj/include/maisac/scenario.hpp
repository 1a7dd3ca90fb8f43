#pragma once

// Experiment geometry and physical constants. All quantities are linear SI;
// dB/dBm conversion happens only in config.hpp.

#include "maisac/core.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace maisac {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

enum class GnPlacement { kExplicit, kUniform };
enum class FadingMode { kPerSlot, kBlock };

struct Scenario {
  int num_gns = 5;  // communication GNs; index num_gns is the sensing target
  int num_antennas = 6;
  int num_slots = 10;
  double interval_seconds = 10.0;

  double wavelength = 0.1;
  double aperture = 1.0;     // L
  double min_spacing = 0.05; // d_min

  double max_power = 1.0;           // W
  std::vector<double> noise_power;  // W, one per communication GN
  double ref_gain = 1e-6;           // h0 at 1 m, linear
  double rician_factor = 10.0;      // linear
  FadingMode fading = FadingMode::kPerSlot;

  double altitude = 50.0;
  GnPlacement placement = GnPlacement::kUniform;
  Vec2 area = {500.0, 500.0};
  std::vector<Vec2> gn_positions;  // num_gns + 1 entries, target last
  Vec3 ulap_position = {250.0, 250.0, 50.0};
  Vec3 array_axis = {1.0, 0.0, 0.0};  // unit vector

  double beampattern_threshold = 1e-5;  // W
  std::uint64_t rng_seed = 1;

  double slot_duration() const { return interval_seconds / num_slots; }
  int target_index() const { return num_gns; }  // zero-based
  int num_nodes() const { return num_gns + 1; }

  bool operator==(const Scenario&) const = default;
};

// Throws ConfigError naming the first violated field.
inline void validate(const Scenario& s) {
  auto need = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  need(s.num_gns >= 1, "num_gns", "must be >= 1");
  need(s.num_antennas >= 1, "num_antennas", "must be >= 1");
  need(s.num_slots >= 1, "num_slots", "must be >= 1");
  need(s.interval_seconds > 0.0, "interval_s", "must be positive");
  need(s.wavelength > 0.0, "geometry.wavelength_m", "must be positive");
  need(s.aperture > 0.0, "geometry.aperture", "must be positive");
  need(s.min_spacing > 0.0, "geometry.min_spacing", "must be positive");
  need((s.num_antennas - 1) * s.min_spacing <= s.aperture * (1.0 + 1e-12), "geometry.aperture",
       "infeasible aperture: (M-1)*d_min exceeds L");
  need(s.max_power > 0.0, "power.max_power", "must be positive");
  need(static_cast<int>(s.noise_power.size()) == s.num_gns, "power.noise_power",
       "needs one entry per communication GN");
  for (double n : s.noise_power) need(n > 0.0, "power.noise_power", "must be positive");
  need(s.ref_gain > 0.0, "power.ref_gain", "must be positive");
  need(s.rician_factor >= 0.0, "channel.rician_factor", "must be >= 0");
  need(s.altitude > 0.0, "geometry.altitude_m", "must be positive");
  need(s.ulap_position[2] == s.altitude, "geometry.ulap_position_m", "height must equal altitude");
  need(static_cast<int>(s.gn_positions.size()) == s.num_gns + 1, "geometry.gn_positions_m",
       "needs num_gns + 1 entries (target last)");
  const double axis_norm = std::hypot(s.array_axis[0], s.array_axis[1], s.array_axis[2]);
  need(std::abs(axis_norm - 1.0) < 1e-9, "geometry.array_axis", "must be a unit vector");
  need(s.beampattern_threshold >= 0.0, "sensing.beampattern_threshold", "must be >= 0");
}

// Uniform GN placement over [0, area_x] x [0, area_y].
inline std::vector<Vec2> random_gn_positions(int count, const Vec2& area, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, area[0]);
  std::uniform_real_distribution<double> uy(0.0, area[1]);
  std::vector<Vec2> out(static_cast<std::size_t>(count));
  for (auto& p : out) {
    p[0] = ux(rng);
    p[1] = uy(rng);
  }
  return out;
}

// Copy of `s` with GNs re-drawn from `seed` when placement is uniform;
// explicit layouts are returned unchanged.
inline Scenario with_layout_seed(Scenario s, std::uint64_t seed) {
  if (s.placement == GnPlacement::kUniform) {
    s.gn_positions = random_gn_positions(s.num_gns + 1, s.area, seed);
  }
  return s;
}

inline void check_node(const Scenario& s, int k) {
  if (k < 0 || k > s.num_gns) throw std::out_of_range("GN index out of range");
}

inline Vec3 line_of_sight(const Scenario& s, int k) {
  check_node(s, k);
  const auto& g = s.gn_positions[static_cast<std::size_t>(k)];
  return {g[0] - s.ulap_position[0], g[1] - s.ulap_position[1], -s.ulap_position[2]};
}

// Euclidean ULAP-to-GN distance; k is zero-based, k == num_gns is the target.
inline double distance(const Scenario& s, int k) {
  const Vec3 d = line_of_sight(s, k);
  return std::hypot(d[0], d[1], d[2]);
}

// Projection of the unit line-of-sight direction onto the array axis.
inline double steering_angle_cosine(const Scenario& s, int k) {
  const Vec3 d = line_of_sight(s, k);
  const double proj = d[0] * s.array_axis[0] + d[1] * s.array_axis[1] + d[2] * s.array_axis[2];
  return std::clamp(proj / distance(s, k), -1.0, 1.0);
}

inline std::vector<double> steering_cosines(const Scenario& s) {
  std::vector<double> out(static_cast<std::size_t>(s.num_nodes()));
  for (int k = 0; k < s.num_nodes(); ++k) out[static_cast<std::size_t>(k)] = steering_angle_cosine(s, k);
  return out;
}

// Unit vector from azimuth (from +x toward +y) and elevation above ground, in degrees.
inline Vec3 axis_from_angles(double azimuth_deg, double elevation_deg) {
  const double az = azimuth_deg * kPi / 180.0;
  const double el = elevation_deg * kPi / 180.0;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

}  // namespace maisac
