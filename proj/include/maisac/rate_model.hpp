#pragma once

// Transmit power, SINR, achievable rate and the sum-rate objective.

#include "maisac/array_model.hpp"
#include "maisac/channel.hpp"
#include "maisac/scenario.hpp"

#include <optional>

namespace maisac {

struct BeamformingSolution {
  std::vector<std::vector<CMatrix>> w;                // [slot][gn] information covariances W_k(t)
  std::vector<CMatrix> s;                             // [slot] sensing covariance S(t)
  std::vector<std::vector<std::optional<CVector>>> beams;  // [slot][gn] w_k(t) when W_k(t) is rank one

  int num_slots() const { return static_cast<int>(s.size()); }
  int num_gns() const { return w.empty() ? 0 : static_cast<int>(w.front().size()); }
  int dim() const { return s.empty() ? 0 : static_cast<int>(s.front().rows()); }

  static BeamformingSolution zeros(int slots, int gns, int m) {
    BeamformingSolution out;
    out.w.assign(static_cast<std::size_t>(slots), std::vector<CMatrix>(static_cast<std::size_t>(gns), CMatrix::Zero(m, m)));
    out.s.assign(static_cast<std::size_t>(slots), CMatrix::Zero(m, m));
    out.beams.assign(static_cast<std::size_t>(slots), std::vector<std::optional<CVector>>(static_cast<std::size_t>(gns)));
    return out;
  }

  // sum_k W_k(t) + S(t)
  CMatrix total_covariance(int t) const {
    CMatrix total = s[static_cast<std::size_t>(t)];
    for (const auto& wk : w[static_cast<std::size_t>(t)]) total += wk;
    return total;
  }
};

// sum_k tr(W_k(t)) + tr(S(t))
inline double transmit_power(const BeamformingSolution& sol, int t) {
  double p = real_trace(sol.s[static_cast<std::size_t>(t)]);
  for (const auto& wk : sol.w[static_cast<std::size_t>(t)]) p += real_trace(wk);
  return p;
}

// Quadratic forms a_k^H X a_k seen by one GN in one slot.
struct LinkTerms {
  double signal = 0.0;        // a^H W_k a
  double interference = 0.0;  // sum_{l != k} a^H W_l a
  double sensing = 0.0;       // a^H S a
};

inline LinkTerms link_terms(int k, int t, const CVector& a_k, const BeamformingSolution& sol) {
  if (k < 0 || k >= sol.num_gns()) throw std::out_of_range("GN index out of range");
  if (t < 0 || t >= sol.num_slots()) throw std::out_of_range("slot index out of range");
  LinkTerms out;
  const auto& ws = sol.w[static_cast<std::size_t>(t)];
  for (int l = 0; l < static_cast<int>(ws.size()); ++l) {
    const double q = quad_form(a_k, ws[static_cast<std::size_t>(l)]);
    (l == k ? out.signal : out.interference) += q;
  }
  out.sensing = quad_form(a_k, sol.s[static_cast<std::size_t>(t)]);
  return out;
}

// |h|^2 a^H W_k a / (|h|^2 (sum_{l!=k} a^H W_l a + a^H S a) + sigma^2)
inline double sinr(int k, int t, const ChannelState& h, const CVector& a_k, const BeamformingSolution& sol,
                   double noise_power) {
  const LinkTerms q = link_terms(k, t, a_k, sol);
  const double g = h.power(k, t);
  return std::max(0.0, g * q.signal) / (g * std::max(0.0, q.interference + q.sensing) + noise_power);
}

inline double rate_from_sinr(double gamma) { return std::log2(1.0 + gamma); }

inline double rate(int k, int t, const ChannelState& h, const CVector& a_k, const BeamformingSolution& sol,
                   double noise_power) {
  return rate_from_sinr(sinr(k, t, h, a_k, sol, noise_power));
}

// Steering vectors of all nodes (target last) for one placement.
inline std::vector<CVector> steering_vectors(const AntennaPositions& x, const Scenario& s) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(s.num_nodes()));
  for (int k = 0; k < s.num_nodes(); ++k) out.push_back(steering_vector(x, steering_angle_cosine(s, k), s.wavelength));
  return out;
}

// r_k(t) for every slot and GN, [slot][gn].
inline std::vector<std::vector<double>> per_gn_rates(const ChannelState& h, const AntennaPositions& x,
                                                     const BeamformingSolution& sol, const Scenario& s) {
  const auto a = steering_vectors(x, s);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(s.num_slots),
                                       std::vector<double>(static_cast<std::size_t>(s.num_gns)));
  for (int t = 0; t < s.num_slots; ++t)
    for (int k = 0; k < s.num_gns; ++k)
      out[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] =
          rate(k, t, h, a[static_cast<std::size_t>(k)], sol, s.noise_power[static_cast<std::size_t>(k)]);
  return out;
}

// sum_t sum_k r_k(t)
inline double total_rate(const ChannelState& h, const AntennaPositions& x, const BeamformingSolution& sol,
                         const Scenario& s) {
  double total = 0.0;
  for (const auto& slot : per_gn_rates(h, x, sol, s))
    for (double r : slot) total += r;
  return total;
}

}  // namespace maisac
