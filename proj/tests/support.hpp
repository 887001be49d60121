#pragma once

// Shared fixtures: exact ray construction from closed-form wall geometry, a few
// canonical rooms, temp directories, and a popen wrapper for driving the CLI.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "ncl/camera.hpp"
#include "ncl/layout.hpp"

namespace testutil {

// Rectangle [xmin,xmax] x [ymin,ymax], CCW, camera at the origin.
inline ncl::Layout rect_room(double xmin, double xmax, double ymin, double ymax,
                             double h_c, double h_f) {
  return ncl::layout_from_corners(
      {{xmax, ymin}, {xmax, ymax}, {xmin, ymax}, {xmin, ymin}}, h_c, h_f);
}

inline ncl::Layout square_room(double s, double h_c, double h_f) {
  return rect_room(-s, s, -s, s, h_c, h_f);
}

// Six-wall L-shape where every wall stays visible from the origin: a square
// with a rectangular bite at the (+x,+y) corner.
inline ncl::Layout l_room(double h_c, double h_f) {
  return ncl::layout_from_corners(
      {{3.0, -3.0}, {3.0, 1.0}, {1.0, 1.0}, {1.0, 3.0}, {-3.0, 3.0}, {-3.0, -3.0}},
      h_c, h_f);
}

// Step room whose y=1 wall (x in [2,4]) is fully hidden behind the x=2 wall.
inline ncl::Layout step_room(double h_c, double h_f) {
  return ncl::layout_from_corners(
      {{2.0, -2.0}, {2.0, 1.0}, {4.0, 1.0}, {4.0, 3.0}, {-2.0, 3.0}, {-2.0, -2.0}},
      h_c, h_f);
}

// Mirrored double step: hides y=1 twice, once on each side of the room.
inline ncl::Layout double_step_room(double h_c, double h_f) {
  return ncl::layout_from_corners({{2.0, -2.0},
                                   {2.0, 1.0},
                                   {4.0, 1.0},
                                   {4.0, 3.0},
                                   {-4.0, 3.0},
                                   {-4.0, 1.0},
                                   {-2.0, 1.0},
                                   {-2.0, -2.0}},
                                  h_c, h_f);
}

// Exact projecting rays for the vertical plane { x . n(u) = d }: each azimuth's
// planar radial is intersected with the plane, lifted to both heights, and
// pushed through the camera forward + backward maps (no quantization anywhere).
inline ncl::RaySet rays_for_wall(const ncl::CameraModel& cam, const Eigen::Vector2d& u,
                                 double d, double h_c, double h_f,
                                 const std::vector<double>& azimuths) {
  ncl::RaySet rs;
  const Eigen::Vector2d n = ncl::wall_normal(ncl::Wall{u, d, false});
  for (double az : azimuths) {
    const Eigen::Vector2d v(std::cos(az), std::sin(az));
    const double s = d / n.dot(v);
    const Eigen::Vector2d q = s * v;
    rs.ceiling.push_back(
        cam.backproject_pixel(cam.project_point({q.x(), q.y(), h_c, 1.0})));
    rs.floor.push_back(
        cam.backproject_pixel(cam.project_point({q.x(), q.y(), h_f, 1.0})));
  }
  return rs;
}

// Evenly spaced azimuths in the open interval (lo, hi).
inline std::vector<double> az_span(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(lo + (hi - lo) * (i + 1) / (count + 1));
  return out;
}

// True iff the homogeneous point p lies on the line (containment residual of
// the Plucker pair).
inline double line_point_gap(const ncl::PluckerLine& l, const Eigen::Vector3d& p) {
  return (l.dir.cross(p) + l.mom).norm() / l.dir.norm();  // mom = p x dir
}

inline double ray_point_gap(const ncl::PluckerRay& r, const Eigen::Vector3d& p) {
  return (r.dir.cross(p) + r.mom).norm();
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "ncl_test_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Path of the CLI under test, empty when the binary was not built.
inline std::string cli_path() {
  const char* exe = std::getenv("NCL_CLI");
  return exe ? std::string(exe) : std::string();
}

// Runs `env_prefix <cli> args`, capturing stdout+stderr. Returns the exit code,
// or -1 when the binary is unavailable / the process did not exit normally.
inline int run_cli(const std::string& args, std::string* output = nullptr,
                   const std::string& env_prefix = {}) {
  const std::string exe = cli_path();
  if (exe.empty()) return -1;
  std::string cmd = env_prefix + " \"" + exe + "\" " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  const int rc = pclose(p);
  if (output) *output = out;
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -1;
}

}  // namespace testutil
