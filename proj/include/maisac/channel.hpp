#pragma once

// Rician air-to-ground scalar channel, one complex gain per (GN, slot).

#include "maisac/scenario.hpp"

#include <fstream>
#include <iomanip>
#include <random>

namespace maisac {

// Rician factors at or above this are treated as pure line of sight.
inline constexpr double kPureLosRicianFactor = 1e12;

struct ChannelState {
  int num_nodes = 0;
  int num_slots = 0;
  std::vector<Complex> gains;  // row-major [node][slot]

  Complex h(int k, int t) const { return gains[static_cast<std::size_t>(k * num_slots + t)]; }
  double power(int k, int t) const { return std::norm(h(k, t)); }

  bool operator==(const ChannelState&) const = default;
};

// h0 / d^2.
inline double large_scale_gain(double ref_gain, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("large_scale_gain: distance must be positive");
  return ref_gain / (d * d);
}

// Unit-variance circularly symmetric complex Gaussian.
template <class Rng>
Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re * std::sqrt(0.5), im * std::sqrt(0.5)};
}

// Draws h_k(t) for every node (the target included) and slot. Under block
// fading one draw per node is reused for all slots.
template <class Rng>
ChannelState sample_channel(const Scenario& s, Rng& rng) {
  ChannelState out{s.num_nodes(), s.num_slots, {}};
  out.gains.resize(static_cast<std::size_t>(s.num_nodes() * s.num_slots));
  const double kappa = s.rician_factor;
  const bool pure_los = kappa >= kPureLosRicianFactor;
  const double los = pure_los ? 1.0 : std::sqrt(kappa / (kappa + 1.0));
  const double nlos = pure_los ? 0.0 : std::sqrt(1.0 / (kappa + 1.0));
  for (int k = 0; k < s.num_nodes(); ++k) {
    const double amplitude = std::sqrt(large_scale_gain(s.ref_gain, distance(s, k)));
    Complex block{};
    for (int t = 0; t < s.num_slots; ++t) {
      Complex g{};
      if (!pure_los) {
        if (s.fading == FadingMode::kPerSlot || t == 0) block = complex_gaussian(rng);
        g = block;
      }
      out.gains[static_cast<std::size_t>(k * s.num_slots + t)] = amplitude * (los + nlos * g);
    }
  }
  return out;
}

inline ChannelState sample_channel(const Scenario& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_channel(s, rng);
}

// CSV of |h_k(t)|^2: node,slot,power.
inline void dump_channel_csv(const ChannelState& h, std::ostream& os) {
  os << "node,slot,power\n";
  os << std::setprecision(17);
  for (int k = 0; k < h.num_nodes; ++k)
    for (int t = 0; t < h.num_slots; ++t) os << k + 1 << ',' << t + 1 << ',' << h.power(k, t) << '\n';
}

}  // namespace maisac
