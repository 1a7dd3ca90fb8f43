#pragma once

// Shared numeric types, error hierarchy and small Hermitian-matrix helpers.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace maisac {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

// Relative asymmetry accepted before a matrix is rejected as non-Hermitian.
inline constexpr double kHermitianTol = 1e-9;
// Eigenvalues at or below this fraction of the largest one count as zero.
inline constexpr double kRankTol = 1e-8;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// The beampattern threshold cannot be met under the power budget.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Constraint repair gave up after its retry cap.
class RepairExhaustedError : public Error {
 public:
  using Error::Error;
};

// Non-Hermitian input, PSD violation, non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Unit conversions

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// ---------------------------------------------------------------------------
// Hermitian helpers

inline double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const CMatrix& a, double tol = kHermitianTol) {
  if (a.rows() != a.cols()) return false;
  const double asym = max_abs(a - a.adjoint());
  return asym <= tol * std::max(1.0, max_abs(a));
}

// Validates near-Hermitian input and returns (A + A^H) / 2.
inline CMatrix symmetrized(const CMatrix& a, const char* what = "matrix") {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(what) + " is not square");
  }
  if (!is_hermitian(a)) {
    throw NumericalError(std::string(what) + " is not Hermitian within tolerance");
  }
  CMatrix out = (a + a.adjoint()) * 0.5;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) = out(i, i).real();
  return out;
}

// Re tr(A B) for Hermitian A, B; equals the real Frobenius inner product.
inline double trace_inner(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.transpose().array()).sum().real();
}

// Re(v^H X v).
inline double quad_form(const CVector& v, const CMatrix& x) { return v.dot(x * v).real(); }

inline double real_trace(const CMatrix& a) { return a.trace().real(); }

}  // namespace maisac
