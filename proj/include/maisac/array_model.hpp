#pragma once

// Linear movable-antenna array: steering vectors, placement constraints and
// transmit beampattern gain.

#include "maisac/core.hpp"
#include "maisac/linalg.hpp"

#include <algorithm>
#include <utility>

namespace maisac {

// Antenna coordinates along the array axis, stored ascending.
class AntennaPositions {
 public:
  AntennaPositions() = default;
  explicit AntennaPositions(std::vector<double> x) : x_(std::move(x)) { std::sort(x_.begin(), x_.end()); }

  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t m) const { return x_[m]; }
  const std::vector<double>& values() const { return x_; }

  bool operator==(const AntennaPositions&) const = default;

 private:
  std::vector<double> x_;
};

// Entry m is exp(j 2 pi / lambda * x_m * cos_theta).
inline CVector steering_vector(const AntennaPositions& x, double cos_theta, double wavelength) {
  CVector a(static_cast<Eigen::Index>(x.size()));
  const double k = 2.0 * kPi / wavelength * cos_theta;
  for (std::size_t m = 0; m < x.size(); ++m) a(static_cast<Eigen::Index>(m)) = std::polar(1.0, k * x[m]);
  return a;
}

// Range [0, L] and pairwise spacing >= d_min, with a relative slack of 1e-12
// so that repaired vectors built by repeated addition still pass.
inline bool is_feasible(const std::vector<double>& x, double aperture, double min_spacing) {
  const double slack = 1e-12 * std::max(aperture, min_spacing);
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted)
    if (v < -slack || v > aperture + slack) return false;
  for (std::size_t m = 1; m < sorted.size(); ++m)
    if (sorted[m] - sorted[m - 1] < min_spacing - slack) return false;
  return true;
}

inline bool is_feasible(const AntennaPositions& x, double aperture, double min_spacing) {
  return is_feasible(x.values(), aperture, min_spacing);
}

// Feasible input is returned as is. Otherwise sort, then sweep left to right enforcing x[m+1] >= x[m] + d_min. If the
// sweep overflows L the whole vector shifts down by the overflow; when that
// would cross zero, antennas are packed back from the right edge instead.
inline AntennaPositions repair_spacing(std::vector<double> x, double min_spacing, double aperture) {
  if (x.empty()) return AntennaPositions{};
  const double n = static_cast<double>(x.size());
  if ((n - 1.0) * min_spacing > aperture * (1.0 + 1e-12)) {
    throw RepairExhaustedError("repair_spacing: (M-1)*d_min exceeds aperture");
  }
  if (is_feasible(x, aperture, min_spacing)) return AntennaPositions(std::move(x));
  std::sort(x.begin(), x.end());
  x.front() = std::clamp(x.front(), 0.0, aperture);
  for (std::size_t m = 1; m < x.size(); ++m) x[m] = std::max(x[m], x[m - 1] + min_spacing);
  if (x.back() > aperture) {
    const double overflow = x.back() - aperture;
    if (x.front() - overflow >= 0.0) {
      for (double& v : x) v -= overflow;
      x.back() = std::min(x.back(), aperture);
      return AntennaPositions(std::move(x));
    }
    // Uniform shift would leave [0, L]; push back from the right edge instead.
    x.back() = aperture;
    for (std::size_t m = x.size() - 1; m-- > 0;) x[m] = std::min(x[m], x[m + 1] - min_spacing);
    if (x.front() < 0.0) x.front() = 0.0;  // only rounding can get here
  }
  return AntennaPositions(std::move(x));
}

inline AntennaPositions repair_spacing(const AntennaPositions& x, double min_spacing, double aperture) {
  return repair_spacing(x.values(), min_spacing, aperture);
}

// a^H (sum_k W_k + S) a for the target steering vector; real, >= 0 for PSD inputs.
inline double beampattern_gain(const CVector& target_steering, const std::vector<CMatrix>& w_set,
                               const CMatrix& s) {
  const auto m = target_steering.size();
  auto check = [m](const CMatrix& a, const char* what) {
    if (a.rows() != m || a.cols() != m) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    if (!is_hermitian(a)) throw NumericalError(std::string(what) + " is not Hermitian within tolerance");
  };
  check(s, "S");
  CMatrix total = s;
  for (const auto& w : w_set) {
    check(w, "W_k");
    total += w;
  }
  return std::max(0.0, quad_form(target_steering, total));
}

inline double beampattern_gain(const AntennaPositions& x, const std::vector<CMatrix>& w_set, const CMatrix& s,
                               double cos_target, double wavelength) {
  return beampattern_gain(steering_vector(x, cos_target, wavelength), w_set, s);
}

struct SensingBeam {
  double power;  // eigenvalue, W
  CVector beam;  // unit norm
};

// Eigenpairs of S above kRankTol * lambda_max, strongest first.
inline std::vector<SensingBeam> extract_sensing_beams(const CMatrix& s) {
  const auto eig = hermitian_eig(s);
  std::vector<SensingBeam> beams;
  const Eigen::Index n = eig.values.size();
  if (n == 0) return beams;
  const double top = eig.values(n - 1);
  if (top <= 0.0) return beams;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (eig.values(i) <= kRankTol * top) break;
    beams.push_back({eig.values(i), eig.vectors.col(i)});
  }
  return beams;
}

}  // namespace maisac
