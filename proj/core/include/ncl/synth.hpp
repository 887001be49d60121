#pragma once

#include <cstdint>

#include "ncl/boundary.hpp"
#include "ncl/camera.hpp"
#include "ncl/layout.hpp"

namespace ncl {

// Random room recipe. Manhattan rooms are rectangles with rectangular notches
// carved from convex corners (wall count 4, 6, 8, ...); Atlanta rooms
// additionally clip corners with straight oblique cuts (one extra wall per
// clip). All rooms are generated in the camera frame: camera at the origin,
// placed with `max(rc+0.1, 0.3)` clearance and every wall segment within
// [min_wall_dist, max_wall_dist].
struct LayoutSpec {
  World world = World::manhattan;
  std::uint64_t seed = 0;
  int min_walls = 4;
  int max_walls = 14;
  double min_side = 3.0;
  double max_side = 8.5;
  double min_edge = 0.6;        // shortest wall segment the generator may emit
  double hc_min = 0.8, hc_max = 2.2;
  double hf_min = -2.2, hf_max = -0.8;
  double clip_prob = 0.6;       // per-corner clip chance (Atlanta only)
  double clip_frac_min = 0.15;  // clip length as a fraction of the adjacent edge
  double clip_frac_max = 0.35;
  double rc = 1.0;
  double min_wall_dist = 1.0;
  double max_wall_dist = 8.0;
  int max_attempts = 1000;      // RejectionOverflow beyond this
};

Layout generate_layout(const LayoutSpec& spec);

// Analytic visibility of the projection, for harness filtering and oracles.
struct VisibilityReport {
  std::vector<int> wall_of_col;       // nearest wall per column
  std::vector<double> radius_of_col;  // planar distance of the hit
  std::vector<int> corner_cols;       // sorted, unique visible-corner columns
  std::vector<int> visible_cols_per_wall;
};

// Projects a layout into per-column boundaries: each column's center azimuth is
// cast as a planar radial ray, the nearest wall segment gives the radius, and
// the ceiling/floor rows follow from the non-central elevation map. Corner
// scores decay as 0.96^d with d the cyclic column distance to the nearest
// visible corner column (depth discontinuities count: the occluder's visible
// corner is a corner event). Throws CameraOutsideRoom when the origin is not
// strictly inside the polygon with rc clearance.
BoundaryMap project_layout(const Layout& layout, const CameraModel& cam,
                           VisibilityReport* report = nullptr);

// Per-column Gaussian noise plus optional spike outliers, deterministic in seed.
// Exactly floor(spike_rate * cols) distinct columns receive +-spike_mag_px on
// both boundaries (independent signs). Ordering (ceiling above floor, 1 px
// margin) and the [0, image_rows] range are restored afterwards.
struct NoiseSpec {
  double sigma_px = 0.5;
  double spike_rate = 0.0;
  double spike_mag_px = 30.0;
  std::uint64_t seed = 0;
};

BoundaryMap add_noise(const BoundaryMap& bm, const NoiseSpec& noise, int image_rows);

}  // namespace ncl
