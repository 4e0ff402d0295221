#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fdbeam {

using cd = std::complex<double>;

template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using CVec = CVector<double>;
using CMat = CMatrix<double>;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A subproblem or design whose constraints cannot be met.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent file/config input.
class FormatError : public Error {
 public:
  using Error::Error;
};

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Power-quantity dB conversions.
inline double db_to_pow(double db) { return std::pow(10.0, db / 10.0); }
inline double pow_to_db(double p) { return 10.0 * std::log10(p); }

}  // namespace fdbeam
