#pragma once

#include <Eigen/Core>

#include "ncl/plucker.hpp"

namespace ncl {

struct PixelCoord {
  double i = 0.0;  // row, increases with elevation
  double j = 0.0;  // column, increases with azimuth
};

// Non-central circular panorama. Optical centers lie on a circle of radius rc in
// the z=0 plane; each column is a central vertical slice taken from the center at
// that column's azimuth. rc = 0 degenerates to a central equirectangular camera.
struct CameraModel {
  double rc = 1.0;
  int rows = 512;
  int cols = 1024;
  double phi_min = -1.5707963267948966;   // elevation range mapped over rows
  double phi_max = 1.5707963267948966;
  double varphi_min = -3.141592653589793; // azimuth range mapped over cols
  double varphi_max = 3.141592653589793;

  static CameraModel default_panorama() { return CameraModel{}; }

  // Azimuth spans the full turn (cyclic column adjacency).
  bool full_turn() const;

  // Continuous pixel<->angle maps; pixel centers sit at half-integer coordinates.
  double azimuth_of_col(double j) const;
  double col_of_azimuth(double azimuth) const;
  double elevation_of_row(double i) const;
  double row_of_elevation(double elevation) const;
  double col_center_azimuth(int j) const { return azimuth_of_col(j + 0.5); }

  // Optical center for a viewing azimuth.
  Eigen::Vector3d center_for_azimuth(double azimuth) const;

  // Homogeneous point (w may be 0 for a direction) to continuous pixel coordinates.
  // Throws InsideCircle when the point's planar radius does not clear w*rc, and
  // OutOfView when either angle misses the field of view.
  PixelCoord project_point(const Eigen::Vector4d& p) const;

  // Pixel to projecting ray in Plucker coordinates, unit direction. The moment's
  // z component is always zero: every ray crosses the revolution axis.
  // Throws OutOfBounds for coordinates outside [0,rows]x[0,cols].
  PluckerRay backproject_pixel(const PixelCoord& px) const;
};

bool operator==(const CameraModel& a, const CameraModel& b);

}  // namespace ncl
