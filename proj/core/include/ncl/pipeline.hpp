#pragma once

#include <cstdint>
#include <vector>

#include "ncl/boundary.hpp"
#include "ncl/camera.hpp"
#include "ncl/layout.hpp"
#include "ncl/solvers.hpp"

namespace ncl {

// RANSAC controls for per-segment wall fitting. sample_size counts columns;
// each sampled column contributes one ceiling and one floor ray.
struct RansacConfig {
  double confidence = 0.9999;       // target probability of one clean sample
  double outlier_rate = 0.2;
  int sample_size = 3;              // >= 3 (extract_wall minimum)
  double inlier_threshold_px = 1.5;
  double min_inlier_ratio = 0.5;
  double min_room_height = 0.5;  // h_c - h_f below this is vetoed as a hypothesis
  std::uint64_t seed = 0;
};

// log(1-P)/log(1-(1-eps)^k), unrounded; callers take the ceiling. Accepts any
// sample size >= 1 (the pipeline itself insists on >= 3); returns 0 when
// eps == 0. Throws DegenerateConfig when (1-eps)^k underflows to zero.
double required_hypotheses(double confidence, double outlier_rate, int sample_size);
inline double required_hypotheses(const RansacConfig& c) {
  return required_hypotheses(c.confidence, c.outlier_rate, c.sample_size);
}

// Cyclic column interval [begin, begin+count), indices modulo the column count.
struct Segment {
  int begin = 0;
  int count = 0;
};

// Corner columns: local maxima (radius-4 window) of the 5-column box-smoothed
// corner score above 0.5, thinned by non-maximum suppression in score order
// (ties broken toward the smaller column). Sorted ascending.
std::vector<int> detect_corner_columns(const BoundaryMap& bm, bool cyclic = true);

// One interval per visible wall. Cyclic mode returns the intervals between
// consecutive corner columns and needs >= 3 of them (TooFewCorners below
// that); windowed mode adds the image edges as bounds and needs >= 1.
std::vector<Segment> segment_walls(const BoundaryMap& bm, bool cyclic = true);

struct FittedWall {
  WallSolution sol;
  Segment seg;
  std::vector<int> inlier_cols;  // absolute column indices, in segment order
  double inlier_ratio = 0.0;     // inliers over the trimmed segment support
};

// Per-segment RANSAC around extract_wall: ceil(required_hypotheses) draws of
// sample_size columns, inliers scored by both boundary-row residuals being
// under inlier_threshold_px, best hypothesis by (inliers, then residual RMS,
// then draw index) refit on its inliers. The first and last column of a
// segment are corner-adjacent and ambiguous by construction, so they are
// excluded from the support. Deterministic for a fixed seed regardless of
// thread count (per-segment child generators, index-ordered results).
// Throws NoConsensus when the best ratio falls under min_inlier_ratio, and
// propagates the segment's last extract_wall error if no draw succeeds.
std::vector<FittedWall> ransac_fit_walls(const BoundaryMap& bm,
                                         const std::vector<Segment>& segments,
                                         const CameraModel& cam,
                                         const RansacConfig& cfg);

struct DirectionClustering {
  double axis_azimuth = 0.0;  // radians in (-pi/4, pi/4], circular mean of 4*theta
  std::vector<int> labels;    // 0 = along the axis, 1 = perpendicular; ties to 0
};

DirectionClustering cluster_directions(const std::vector<Eigen::Vector2d>& directions);

// Occlusion handling emits the corner ring directly. corners[k] meets walls
// k-1 and k; walls[k] spans corners[k] -> corners[k+1] (the Layout layout).
// corner_tie_azimuth[k] is the azimuth of the radial plane corner k must stay
// on during the final adjustment (NaN = unconstrained: visible corners are
// pinned by reprojection alone). wall_source maps each output wall to its
// input index, -1 for inserted (occluded) walls.
struct OcclusionPlan {
  std::vector<Eigen::Vector2d> corners;
  std::vector<double> corner_tie_azimuth;
  std::vector<bool> wall_occluded;
  std::vector<int> wall_source;
};

// Manhattan: consecutive same-label walls hide a perpendicular wall. The
// inserted wall passes through the nearer wall's intersection with the corner
// radial (that point is the apparent corner, tied to the radial); the hidden
// corner is its intersection with the farther wall. Alternation holds on
// output. corner_azimuth[i] belongs to the adjacency walls i -> i+1.
OcclusionPlan handle_occlusions_manhattan(const std::vector<Wall>& walls,
                                          const std::vector<int>& labels,
                                          const std::vector<double>& corner_azimuth);

// Atlanta: each adjacency compares the two walls' ceiling-line closest points
// to the corner's projecting ray. Beyond gap_threshold a vertical wall is
// inserted in the corner's radial plane (it contains the projecting rays by
// construction; both new corners are tied to the radial); otherwise the
// corner merges to the midpoint of the two closest points.
OcclusionPlan handle_occlusions_atlanta(const std::vector<Wall>& walls,
                                        const std::vector<PluckerRay>& corner_rays,
                                        const std::vector<double>& corner_azimuth,
                                        double h_c, double gap_threshold);

struct AdjustConfig {
  double corner_penalty = 10.0;  // weight on tied corners' out-of-plane offset
  int max_iterations = 100;
  double rel_tol = 1e-10;
};

struct AdjustReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;  // false = iteration budget hit before rel_tol
};

// Damped least-squares polish of the assembled layout: parameters are one
// shared rotation in Manhattan mode (per-wall rotations in Atlanta mode),
// per-wall distances and the two heights. Residuals are the per-column
// boundary-row reprojection errors over each wall's support columns plus
// corner_penalty times each tied corner's distance to its radial plane.
// Corners are rebuilt as consecutive plane intersections every evaluation.
// Steps are accepted only on strict cost decrease, so noiseless input is a
// fixed point. Returns the input unchanged (converged=false) if the adjusted
// polygon stops being valid.
Layout final_adjustment(const Layout& initial, World world,
                        const std::vector<std::vector<int>>& wall_cols,
                        const std::vector<double>& corner_tie_azimuth,
                        const BoundaryMap& bm, const CameraModel& cam,
                        const AdjustConfig& cfg = {}, AdjustReport* report = nullptr);

struct RecoverConfig {
  RansacConfig ransac;
  double gap_threshold_m = 0.05;  // Atlanta corner split threshold
  AdjustConfig adjust;
  bool run_adjustment = true;
};

struct RecoverStats {
  double segment_ms = 0.0;
  double ransac_ms = 0.0;
  double solve_ms = 0.0;
  double occlusion_ms = 0.0;
  double adjust_ms = 0.0;
  std::vector<double> inlier_ratio;  // per visible wall
  AdjustReport adjust;
};

// Full boundary-map -> metric layout pipeline: segment_walls ->
// ransac_fit_walls -> joint solve (Manhattan: cluster_directions +
// solve_manhattan; Atlanta: solve_atlanta on the RANSAC directions) ->
// occlusion handling -> final_adjustment. Consumes only pixel arrays and the
// camera (whose circle radius carries the metric scale); errors are rethrown
// with the failing stage prepended to the message.
Layout recover_layout(const BoundaryMap& bm, const CameraModel& cam, World world,
                      const RecoverConfig& cfg = {}, RecoverStats* stats = nullptr);

}  // namespace ncl
