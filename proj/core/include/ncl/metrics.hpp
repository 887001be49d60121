#pragma once

#include <Eigen/Core>
#include <vector>

#include "ncl/layout.hpp"

namespace ncl {

// Angle between line directions, orientation-free, in degrees.
double direction_error_deg(const PluckerLine& a, const PluckerLine& b);

// Absolute difference of line depths (moment norm at unit direction), meters.
double depth_error_m(const PluckerLine& a, const PluckerLine& b);

// Mean distance from each ground-truth corner to its nearest predicted corner
// (ceiling and floor sets matched separately). count_mismatch flags differing
// corner counts; the mean is still reported over the ground-truth corners.
struct CornerError {
  double mean_m = 0.0;
  bool count_mismatch = false;
};
CornerError corner_error(const CornerSet& pred, const CornerSet& gt);

// corner_error as a percentage of the ground-truth 3-D bounding box diagonal.
double corner_error_normalized_pct(const CornerSet& pred, const CornerSet& gt);

// Scanline-rasterized polygon IoU; exact x-intervals at cell-center rows.
double polygon_iou(const std::vector<Eigen::Vector2d>& a,
                   const std::vector<Eigen::Vector2d>& b, double cell = 0.01);

// 2-D floor plan IoU times the height overlap ratio.
double iou3d(const Layout& a, const Layout& b, double cell = 0.01);

// Relative error of the recovered room height h_c - h_f, percent.
double scale_error_pct(const Layout& pred, const Layout& gt);

// Field names double as the eval.json / CSV schema.
struct EvalReport {
  double ce_m = 0.0;        // mean corner error, meters
  double cen_pct = 0.0;     // ce_m over the gt bounding-box diagonal, percent
  bool corner_count_mismatch = false;
  double iou2d_pct = 0.0;
  double iou3d_pct = 0.0;
  double dir_err_deg = 0.0;   // mean over gt walls, nearest predicted ceiling line
  double depth_err_m = 0.0;
  double scale_err_pct = 0.0;
  int wall_count_pred = 0;
  int wall_count_gt = 0;
};

EvalReport evaluate(const Layout& pred, const Layout& gt, double cell = 0.01);

}  // namespace ncl
