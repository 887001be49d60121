#pragma once

#include <Eigen/Core>
#include <vector>

#include "ncl/layout.hpp"

namespace ncl {

// Internals of a single-wall fit, for callers that want to inspect the root
// structure: the two null-space basis vectors, the (alpha, beta) roots of each
// parallelism quadric, and the mixing coefficients of the returned wall. On
// exact data the two root sets agree pairwise; under noise they drift apart.
struct ExtractDiagnostics {
  Eigen::VectorXd basis0, basis1;               // smallest right singular vectors, dim 7
  std::vector<Eigen::Vector2d> ceiling_roots;   // roots of cross2(u, v) = 0
  std::vector<Eigen::Vector2d> floor_roots;     // roots of cross2(u, w) = 0
  Eigen::Vector2d lambda{0.0, 0.0};             // coefficients of the selected root
};

// Fits one vertical wall to >= 3 ceiling and >= 3 floor rays. Builds the stacked
// side-constraint system on (u, v, w, d) with v = h_c u, w = h_f u substituted,
// takes the two smallest right singular vectors and intersects the span with the
// parallelism quadrics cross2(u,v) = 0, cross2(u,w) = 0. Root selection: h_c > h_f,
// then smaller side-constraint RMS. Throws RankDeficient / ComplexRoots /
// NoValidRoot.
WallSolution extract_wall(const RaySet& rays, ExtractDiagnostics* diag = nullptr);

// Every root of the single-wall system with h_c > h_f, ordered by ascending
// side-constraint RMS; extract_wall returns the front. A narrow ray bundle
// under noise can rank a near-degenerate root (a line grazing the bundle's
// origins, with centimetre heights) ahead of the actual wall, so callers with
// reprojection information should rescore the whole set. Throws like
// extract_wall.
std::vector<WallSolution> extract_wall_candidates(const RaySet& rays);

// Joint Manhattan solve: one shared axis direction for all walls, label 0 along
// the axis and label 1 perpendicular. d values are signed relative to the shared
// frame; walls() flips each wall's direction so d >= 0.
struct ManhattanSolution {
  Eigen::Vector2d axis_u{1.0, 0.0};  // unit
  double h_c = 0.0;
  double h_f = 0.0;
  std::vector<double> d;  // signed, one per wall
  std::vector<int> labels;
  double rms = 0.0;

  std::vector<Wall> walls() const;
};

ManhattanSolution solve_manhattan(const std::vector<RaySet>& walls,
                                  const std::vector<int>& labels);

// Joint Atlanta solve with known per-wall directions: rotates each wall's rays
// into the wall frame, solves the homogeneous system on (1, h_c, h_f, d_1..d_N)
// and de-homogenizes by the first component. Heights are shared across walls.
// Throws RankDeficient / DehomogenizationFailure.
struct AtlantaSolution {
  double h_c = 0.0;
  double h_f = 0.0;
  std::vector<Wall> walls_out;  // directions flipped so d >= 0
  double rms = 0.0;
};

AtlantaSolution solve_atlanta(const std::vector<RaySet>& walls,
                              const std::vector<Eigen::Vector2d>& directions);

}  // namespace ncl
