#pragma once

#include <Eigen/Core>
#include <vector>

#include "ncl/plucker.hpp"

namespace ncl {

enum class World { manhattan, atlanta };

// Vertical wall plane in the camera frame: { x : x . e2(u) = d }, where
// e2(u) = (-u_y, u_x) and u is the wall's horizontal direction. Canonical form
// keeps d >= 0, flipping u as needed, so e2 points from the camera toward the
// plane. `occluded` marks walls never observed directly (inserted from context).
struct Wall {
  Eigen::Vector2d u{1.0, 0.0};
  double d = 0.0;
  bool occluded = false;
};

inline Eigen::Vector2d wall_normal(const Wall& w) { return {-w.u.y(), w.u.x()}; }

// Ceiling/floor wall-line in Plucker coordinates at height h.
PluckerLine wall_line(const Wall& w, double h);

// Room layout in the camera frame (camera at the origin). corners are the floor
// plan polygon, counter-clockwise; walls[k] spans corners[k] -> corners[k+1]
// (cyclic), so corners[k] is the meet of walls[k-1] and walls[k]. h_c > 0 > h_f
// in practice; h_c > h_f is the structural invariant.
struct Layout {
  std::vector<Wall> walls;
  std::vector<Eigen::Vector2d> corners;
  double h_c = 1.0;
  double h_f = -1.0;
};

// 3-D corners, index-paired: ceiling[k] and floor[k] share (x, y).
struct CornerSet {
  std::vector<Eigen::Vector3d> ceiling;
  std::vector<Eigen::Vector3d> floor;
};

CornerSet corner_set(const Layout& l);

// Builds walls (canonical form) from a CCW corner polygon.
Layout layout_from_corners(std::vector<Eigen::Vector2d> corners, double h_c, double h_f);

// Structural checks: matching counts, CCW simple polygon, every wall plane
// passing through its two endpoint corners, h_c > h_f.
bool layout_is_valid(const Layout& l, std::string* why = nullptr);

double polygon_signed_area(const std::vector<Eigen::Vector2d>& poly);
bool polygon_is_simple(const std::vector<Eigen::Vector2d>& poly);
bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly);
double distance_to_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b);

// Ceiling/floor projecting rays observed for one wall.
struct RaySet {
  std::vector<PluckerRay> ceiling;
  std::vector<PluckerRay> floor;
};

// Single-wall solver output; u is unit, v = h_c u and w = h_f u are parallel to u
// within 1e-8 by construction, d >= 0. rms is the side-constraint residual over
// the input rays.
struct WallSolution {
  Eigen::Vector2d u{1.0, 0.0};
  double d = 0.0;
  double h_c = 0.0;
  double h_f = 0.0;
  double rms = 0.0;
};

}  // namespace ncl
