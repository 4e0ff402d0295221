#pragma once

#include <cmath>
#include <vector>

#include "fdbeam/types.hpp"

namespace fdbeam {

// Steering direction in radians. Azimuth in [-pi, pi], elevation in [-pi/2, pi/2].
struct Direction {
  double azimuth = 0.0;
  double elevation = 0.0;

  bool operator==(const Direction&) const = default;
};

// Uniform planar array in the y-z plane, broadside +x. Lengths are in carrier wavelengths.
struct ArrayGeometry {
  int rows = 8;
  int cols = 8;
  double spacing = 0.5;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();

  int size() const { return rows * cols; }
  void validate() const;

  bool operator==(const ArrayGeometry& o) const {
    return rows == o.rows && cols == o.cols && spacing == o.spacing && origin == o.origin;
  }
};

// Rectangular az/el region sampled on a regular lattice; all angles in radians.
struct DirectionGrid {
  double az_start = 0.0, az_stop = 0.0, az_step = 0.0;
  double el_start = 0.0, el_stop = 0.0, el_step = 0.0;

  // -60..60 deg azimuth and -30..30 deg elevation, 15 deg pitch (45 directions).
  static DirectionGrid default_region();
};

struct SteeringMatrix {
  CMat entries;  // N x M
  std::vector<Direction> directions;
};

// Element positions relative to the array centroid (origin excluded), element index
// n = col * rows + row.
std::vector<Eigen::Vector3d> element_positions(const ArrayGeometry& geometry);

// Same as element_positions but shifted by geometry.origin.
std::vector<Eigen::Vector3d> absolute_positions(const ArrayGeometry& geometry);

inline Eigen::Vector3d unit_vector(const Direction& dir) {
  const double ce = std::cos(dir.elevation);
  return {ce * std::cos(dir.azimuth), ce * std::sin(dir.azimuth), std::sin(dir.elevation)};
}

// a(dir)[n] = exp(j 2 pi <p_n, u(dir)>), so ||a||^2 = N.
template <typename Scalar = double>
CVector<Scalar> array_response(const ArrayGeometry& geometry, const Direction& dir) {
  const auto positions = element_positions(geometry);
  const Eigen::Vector3d u = unit_vector(dir);
  CVector<Scalar> a(static_cast<Eigen::Index>(positions.size()));
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const Scalar phase = static_cast<Scalar>(2.0 * kPi * positions[n].dot(u));
    a[static_cast<Eigen::Index>(n)] = std::polar(Scalar(1), phase);
  }
  return a;
}

// Lattice enumeration, elevation-major then azimuth ascending. Throws Error when a step
// does not tile its range.
std::vector<Direction> coverage_grid(const DirectionGrid& grid);

// n_az x n_el uniform grid spanning the same extents, endpoints inclusive.
std::vector<Direction> dense_eval_grid(const DirectionGrid& grid, int n_az, int n_el);

SteeringMatrix steering_matrix(const ArrayGeometry& geometry, const std::vector<Direction>& directions);

}  // namespace fdbeam
