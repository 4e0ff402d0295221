#include "fdbeam/geometry.hpp"

#include <string>

namespace fdbeam {

void ArrayGeometry::validate() const {
  if (rows < 1 || cols < 1) throw Error("array geometry needs rows >= 1 and cols >= 1");
  if (!(spacing > 0.0)) throw Error("array element spacing must be positive");
}

DirectionGrid DirectionGrid::default_region() {
  DirectionGrid g;
  g.az_start = deg2rad(-60.0);
  g.az_stop = deg2rad(60.0);
  g.az_step = deg2rad(15.0);
  g.el_start = deg2rad(-30.0);
  g.el_stop = deg2rad(30.0);
  g.el_step = deg2rad(15.0);
  return g;
}

std::vector<Eigen::Vector3d> element_positions(const ArrayGeometry& geometry) {
  geometry.validate();
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<std::size_t>(geometry.size()));
  const double cy = 0.5 * (geometry.cols - 1);
  const double cz = 0.5 * (geometry.rows - 1);
  for (int col = 0; col < geometry.cols; ++col) {
    for (int row = 0; row < geometry.rows; ++row) {
      out.emplace_back(0.0, geometry.spacing * (col - cy), geometry.spacing * (row - cz));
    }
  }
  return out;
}

std::vector<Eigen::Vector3d> absolute_positions(const ArrayGeometry& geometry) {
  auto out = element_positions(geometry);
  for (auto& p : out) p += geometry.origin;
  return out;
}

namespace {

// Number of lattice points in [start, stop] with the given step; exact tiling required.
int lattice_count(double start, double stop, double step, const char* axis) {
  if (stop < start) throw Error(std::string(axis) + " grid: stop precedes start");
  const double span = stop - start;
  if (span == 0.0) return 1;
  if (!(step > 0.0)) throw Error(std::string(axis) + " grid: step must be positive");
  const double ratio = span / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(std::string(axis) + " grid: step does not evenly tile the range");
  }
  return static_cast<int>(rounded) + 1;
}

}  // namespace

std::vector<Direction> coverage_grid(const DirectionGrid& grid) {
  const int n_az = lattice_count(grid.az_start, grid.az_stop, grid.az_step, "azimuth");
  const int n_el = lattice_count(grid.el_start, grid.el_stop, grid.el_step, "elevation");
  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(n_az * n_el));
  for (int e = 0; e < n_el; ++e) {
    for (int a = 0; a < n_az; ++a) {
      out.push_back({grid.az_start + a * grid.az_step, grid.el_start + e * grid.el_step});
    }
  }
  return out;
}

std::vector<Direction> dense_eval_grid(const DirectionGrid& grid, int n_az, int n_el) {
  if (n_az < 2 || n_el < 2) throw Error("dense grid needs at least 2 points per axis");
  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(n_az * n_el));
  for (int e = 0; e < n_el; ++e) {
    const double el = grid.el_start + (grid.el_stop - grid.el_start) * e / (n_el - 1);
    for (int a = 0; a < n_az; ++a) {
      const double az = grid.az_start + (grid.az_stop - grid.az_start) * a / (n_az - 1);
      out.push_back({az, el});
    }
  }
  return out;
}

SteeringMatrix steering_matrix(const ArrayGeometry& geometry, const std::vector<Direction>& directions) {
  SteeringMatrix out;
  out.entries.resize(geometry.size(), static_cast<Eigen::Index>(directions.size()));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    out.entries.col(static_cast<Eigen::Index>(i)) = array_response(geometry, directions[i]);
  }
  out.directions = directions;
  return out;
}

}  // namespace fdbeam
