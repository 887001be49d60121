#include "ncl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncl/error.hpp"

namespace ncl {

namespace {
constexpr double kRadToDeg = 57.29577951308232087679815481411;
}

double direction_error_deg(const PluckerLine& a, const PluckerLine& b) {
  const double c = std::abs(a.dir.normalized().dot(b.dir.normalized()));
  return std::acos(std::clamp(c, 0.0, 1.0)) * kRadToDeg;
}

double depth_error_m(const PluckerLine& a, const PluckerLine& b) {
  return std::abs(a.depth() - b.depth());
}

namespace {

double nearest_sum(const std::vector<Eigen::Vector3d>& gt,
                   const std::vector<Eigen::Vector3d>& pred) {
  double sum = 0.0;
  for (const auto& g : gt) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pred) best = std::min(best, (g - p).norm());
    sum += best;
  }
  return sum;
}

}  // namespace

CornerError corner_error(const CornerSet& pred, const CornerSet& gt) {
  if (gt.ceiling.empty() || pred.ceiling.empty())
    fail(Err::EmptyCornerSet, "corner error needs non-empty corner sets");
  CornerError e;
  e.count_mismatch =
      pred.ceiling.size() != gt.ceiling.size() || pred.floor.size() != gt.floor.size();
  const double total = nearest_sum(gt.ceiling, pred.ceiling) + nearest_sum(gt.floor, pred.floor);
  e.mean_m = total / static_cast<double>(gt.ceiling.size() + gt.floor.size());
  return e;
}

double corner_error_normalized_pct(const CornerSet& pred, const CornerSet& gt) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const auto* set : {&gt.ceiling, &gt.floor}) {
    for (const auto& p : *set) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  const double diag = (hi - lo).norm();
  if (diag <= 0.0) fail(Err::DegenerateConfig, "degenerate ground-truth bounding box");
  return 100.0 * corner_error(pred, gt).mean_m / diag;
}

namespace {

// x-positions where the polygon boundary crosses the horizontal line y;
// half-open vertex convention matches point_in_polygon, so counts are even.
std::vector<double> scanline_crossings(const std::vector<Eigen::Vector2d>& poly, double y) {
  std::vector<double> xs;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > y) != (b.y() > y))
      xs.push_back(a.x() + (y - a.y()) / (b.y() - a.y()) * (b.x() - a.x()));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

double intervals_length(const std::vector<double>& xs) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) len += xs[i + 1] - xs[i];
  return len;
}

double intervals_overlap(const std::vector<double>& a, const std::vector<double>& b) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); i += 2)
    for (std::size_t j = 0; j + 1 < b.size(); j += 2) {
      const double lo = std::max(a[i], b[j]);
      const double hi = std::min(a[i + 1], b[j + 1]);
      if (hi > lo) len += hi - lo;
    }
  return len;
}

}  // namespace

double polygon_iou(const std::vector<Eigen::Vector2d>& a,
                   const std::vector<Eigen::Vector2d>& b, double cell) {
  if (cell <= 0.0) fail(Err::DegenerateConfig, "IoU cell size must be positive");
  if (a.size() < 3 || b.size() < 3)
    fail(Err::DegeneratePolygon, "polygon IoU needs two non-degenerate polygons");
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto* poly : {&a, &b}) {
    for (const auto& p : *poly) {
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
  }
  double area_a = 0.0, area_b = 0.0, inter = 0.0;
  const int rows = static_cast<int>(std::ceil((ymax - ymin) / cell));
  for (int k = 0; k < rows; ++k) {
    const double y = ymin + (k + 0.5) * cell;
    const auto xa = scanline_crossings(a, y);
    const auto xb = scanline_crossings(b, y);
    area_a += intervals_length(xa) * cell;
    area_b += intervals_length(xb) * cell;
    inter += intervals_overlap(xa, xb) * cell;
  }
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double iou3d(const Layout& a, const Layout& b, double cell) {
  const double overlap = std::min(a.h_c, b.h_c) - std::max(a.h_f, b.h_f);
  if (overlap <= 0.0) return 0.0;
  const double span = std::max(a.h_c, b.h_c) - std::min(a.h_f, b.h_f);
  return polygon_iou(a.corners, b.corners, cell) * overlap / span;
}

double scale_error_pct(const Layout& pred, const Layout& gt) {
  const double g = gt.h_c - gt.h_f;
  if (g <= 0.0) fail(Err::DegenerateConfig, "ground truth has no height");
  return 100.0 * std::abs((pred.h_c - pred.h_f) / g - 1.0);
}

EvalReport evaluate(const Layout& pred, const Layout& gt, double cell) {
  EvalReport r;
  r.wall_count_pred = static_cast<int>(pred.walls.size());
  r.wall_count_gt = static_cast<int>(gt.walls.size());
  const CornerSet cp = corner_set(pred), cg = corner_set(gt);
  const CornerError ce = corner_error(cp, cg);
  r.ce_m = ce.mean_m;
  r.corner_count_mismatch = ce.count_mismatch;
  r.cen_pct = corner_error_normalized_pct(cp, cg);
  r.iou2d_pct = 100.0 * polygon_iou(pred.corners, gt.corners, cell);
  r.iou3d_pct = 100.0 * iou3d(pred, gt, cell);
  r.scale_err_pct = scale_error_pct(pred, gt);

  // Per-line errors over gt walls, matched to the nearest predicted ceiling
  // line by a combined angle+depth score (wall order is not assumed shared).
  double dir_sum = 0.0, depth_sum = 0.0;
  for (const auto& gw : gt.walls) {
    const PluckerLine gl = wall_line(gw, gt.h_c);
    double best = std::numeric_limits<double>::infinity();
    double bd = 0.0, bz = 0.0;
    for (const auto& pw : pred.walls) {
      const PluckerLine pl = wall_line(pw, pred.h_c);
      const double dir = direction_error_deg(pl, gl);
      const double dep = depth_error_m(pl, gl);
      const double score = dir / kRadToDeg + dep;
      if (score < best) {
        best = score;
        bd = dir;
        bz = dep;
      }
    }
    dir_sum += bd;
    depth_sum += bz;
  }
  r.dir_err_deg = dir_sum / static_cast<double>(gt.walls.size());
  r.depth_err_m = depth_sum / static_cast<double>(gt.walls.size());
  return r;
}

}  // namespace ncl
