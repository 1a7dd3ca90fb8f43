#pragma once

#include "maisac/maisac.hpp"

#include <gtest/gtest.h>

#include <random>

namespace maisac::test {

inline Complex cx(double re, double im) { return {re, im}; }

inline CVector vec(std::initializer_list<Complex> v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const auto& z : v) out[i++] = z;
  return out;
}

inline CMatrix outer(const CVector& v) { return v * v.adjoint(); }

// Small explicit scenario: ULAP above the origin, GNs given by hand.
inline Scenario hand_scenario(int gns, int m, int slots, std::vector<Vec2> positions) {
  Scenario s;
  s.num_gns = gns;
  s.num_antennas = m;
  s.num_slots = slots;
  s.placement = GnPlacement::kExplicit;
  s.gn_positions = std::move(positions);
  s.noise_power.assign(static_cast<std::size_t>(gns), 1e-14);
  s.aperture = 10.0 * s.wavelength;
  s.min_spacing = s.wavelength / 2.0;
  validate(s);
  return s;
}

inline ::testing::AssertionResult near_matrix(const CMatrix& a, const CMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return ::testing::AssertionFailure() << "shape mismatch";
  const double err = max_abs(a - b);
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "max entry error " << err << " > " << tol;
}

}  // namespace maisac::test
