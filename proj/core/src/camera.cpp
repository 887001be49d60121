#include "ncl/camera.hpp"

#include <cmath>

#include "ncl/error.hpp"

namespace ncl {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

bool CameraModel::full_turn() const {
  return std::abs((varphi_max - varphi_min) - kTwoPi) < 1e-9;
}

double CameraModel::azimuth_of_col(double j) const {
  return varphi_min + j * (varphi_max - varphi_min) / cols;
}

double CameraModel::col_of_azimuth(double azimuth) const {
  return cols * (azimuth - varphi_min) / (varphi_max - varphi_min);
}

double CameraModel::elevation_of_row(double i) const {
  return phi_min + i * (phi_max - phi_min) / rows;
}

double CameraModel::row_of_elevation(double elevation) const {
  return rows * (elevation - phi_min) / (phi_max - phi_min);
}

Eigen::Vector3d CameraModel::center_for_azimuth(double azimuth) const {
  return {rc * std::cos(azimuth), rc * std::sin(azimuth), 0.0};
}

PixelCoord CameraModel::project_point(const Eigen::Vector4d& p_in) const {
  Eigen::Vector4d p = p_in;
  if (p.w() < 0.0) p = -p;  // canonical homogeneous sign
  const double r = std::hypot(p.x(), p.y());
  const double planar = r - p.w() * rc;
  if (planar <= 0.0)
    fail(Err::InsideCircle, "point does not clear the optical-center circle");

  double azimuth = std::atan2(p.y(), p.x());
  const double elevation = std::atan2(p.z(), planar);

  // atan2 lands in (-pi, pi]; shift by full turns into the configured window.
  if (azimuth < varphi_min) azimuth += kTwoPi;
  if (azimuth >= varphi_max && azimuth - kTwoPi >= varphi_min) azimuth -= kTwoPi;
  const bool az_ok = full_turn() ? (azimuth >= varphi_min && azimuth < varphi_max)
                                 : (azimuth >= varphi_min && azimuth <= varphi_max);
  if (!az_ok) fail(Err::OutOfView, "azimuth outside field of view");
  if (elevation < phi_min || elevation > phi_max)
    fail(Err::OutOfView, "elevation outside field of view");

  return {row_of_elevation(elevation), col_of_azimuth(azimuth)};
}

PluckerRay CameraModel::backproject_pixel(const PixelCoord& px) const {
  if (px.i < 0.0 || px.i > rows || px.j < 0.0 || px.j > cols)
    fail(Err::OutOfBounds, "pixel outside the image");
  const double azimuth = azimuth_of_col(px.j);
  const double elevation = elevation_of_row(px.i);
  const double cph = std::cos(elevation), sph = std::sin(elevation);
  const double cv = std::cos(azimuth), sv = std::sin(azimuth);
  PluckerRay ray;
  ray.dir = {cph * cv, cph * sv, sph};
  ray.mom = {rc * sph * sv, -rc * sph * cv, 0.0};
  return ray;
}

bool operator==(const CameraModel& a, const CameraModel& b) {
  return a.rc == b.rc && a.rows == b.rows && a.cols == b.cols && a.phi_min == b.phi_min &&
         a.phi_max == b.phi_max && a.varphi_min == b.varphi_min && a.varphi_max == b.varphi_max;
}

}  // namespace ncl
