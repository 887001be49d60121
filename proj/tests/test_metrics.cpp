#include "ncl/metrics.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "ncl/error.hpp"
#include "support.hpp"

using ncl::CornerSet;
using ncl::Err;
using ncl::Error;
using ncl::Layout;
using ncl::PluckerLine;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

std::vector<Eigen::Vector2d> unit_square(double dx = 0.0, double dy = 0.0) {
  return {{dx, dy}, {1 + dx, dy}, {1 + dx, 1 + dy}, {dx, 1 + dy}};
}

std::vector<Eigen::Vector2d> rotated(const std::vector<Eigen::Vector2d>& poly, double ang) {
  const Eigen::Rotation2D<double> r(ang);
  std::vector<Eigen::Vector2d> out;
  for (const auto& p : poly) out.push_back(r * p);
  return out;
}

CornerSet shifted(CornerSet cs, double dx) {
  for (auto& p : cs.ceiling) p.x() += dx;
  for (auto& p : cs.floor) p.x() += dx;
  return cs;
}

}  // namespace

TEST_CASE("direction error is the orientation free angle between lines") {
  const PluckerLine x{{1, 0, 0}, {0, 0, 0}};
  const PluckerLine y{{0, 1, 0}, {0, 0, 0}};
  const double r = kPi / 180.0;
  const PluckerLine tilted{{std::cos(r), std::sin(r), 0}, {0, 0, 0}};
  const PluckerLine flipped{{-1, 0, 0}, {0, 0, 0}};
  CHECK(ncl::direction_error_deg(x, x) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ncl::direction_error_deg(x, y) == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(ncl::direction_error_deg(x, tilted) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ncl::direction_error_deg(x, flipped) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("depth error compares line depths and ignores homogeneous scale") {
  const PluckerLine at_origin{{1, 0, 0}, {0, 0, 0}};
  const PluckerLine off = ncl::line_through_points({0, 1, 0}, {1, 1, 0});
  PluckerLine off_scaled = off;
  off_scaled.dir *= 5.0;
  off_scaled.mom *= 5.0;
  CHECK(ncl::depth_error_m(at_origin, at_origin) == doctest::Approx(0.0));
  CHECK(ncl::depth_error_m(at_origin, off) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ncl::depth_error_m(at_origin, off_scaled) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("corner error measures nearest corner distance per ground truth corner") {
  const Layout room = testutil::square_room(2.0, 1.5, -1.2);
  const CornerSet gt = ncl::corner_set(room);
  const auto same = ncl::corner_error(gt, gt);
  CHECK(same.mean_m == doctest::Approx(0.0));
  CHECK(!same.count_mismatch);

  const auto moved = ncl::corner_error(shifted(gt, 0.5), gt);
  CHECK(moved.mean_m == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(!moved.count_mismatch);

  CornerSet extra = gt;  // spurious far-away prediction changes only the flag
  extra.ceiling.push_back({50.0, 50.0, 1.5});
  extra.floor.push_back({50.0, 50.0, -1.2});
  const auto spurious = ncl::corner_error(extra, gt);
  CHECK(spurious.mean_m == doctest::Approx(0.0));
  CHECK(spurious.count_mismatch);

  try {
    ncl::corner_error(CornerSet{}, gt);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == Err::EmptyCornerSet);
  }
}

TEST_CASE("normalized corner error divides by the ground truth bbox diagonal") {
  const Layout room = testutil::square_room(2.0, 1.5, -1.2);
  const CornerSet gt = ncl::corner_set(room);
  const double diag = std::sqrt(4.0 * 4.0 + 4.0 * 4.0 + 2.7 * 2.7);
  CHECK(ncl::corner_error_normalized_pct(shifted(gt, 0.5), gt) ==
        doctest::Approx(100.0 * 0.5 / diag).epsilon(1e-9));
}

// The raw iou functions return a fraction; evaluate() scales to percent.
TEST_CASE("polygon iou matches closed forms on axis aligned squares") {
  CHECK(ncl::polygon_iou(unit_square(), unit_square()) == doctest::Approx(1.0).epsilon(1e-4));
  const double off = ncl::polygon_iou(unit_square(), unit_square(0.5));
  CHECK(std::abs(off - 1.0 / 3.0) < 0.002);
  CHECK(ncl::polygon_iou(unit_square(), unit_square(3.0)) == doctest::Approx(0.0));
}

TEST_CASE("polygon iou is stable under rotation and grid refinement") {
  const double base = ncl::polygon_iou(unit_square(), unit_square(0.5));
  const double turned =
      ncl::polygon_iou(rotated(unit_square(), 0.5), rotated(unit_square(0.5), 0.5));
  CHECK(std::abs(turned - base) < 0.005);
  const double fine = ncl::polygon_iou(unit_square(), unit_square(0.5), 0.005);
  CHECK(std::abs(fine - base) < 0.002);
}

TEST_CASE("polygon iou rejects degenerate inputs") {
  try {
    ncl::polygon_iou(unit_square(), unit_square(), 0.0);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DegenerateConfig);
  }
  try {
    ncl::polygon_iou({{0, 0}, {1, 0}}, unit_square());
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DegeneratePolygon);
  }
}

TEST_CASE("3d iou scales the floor plan overlap by the height overlap") {
  const Layout a = testutil::square_room(2.0, 1.0, -1.0);
  Layout b = a;
  CHECK(ncl::iou3d(a, b) == doctest::Approx(1.0).epsilon(1e-4));
  b.h_c = 2.0;  // overlap 2 of span 3
  CHECK(ncl::iou3d(a, b) == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  b.h_c = -0.5;
  b.h_f = -2.0;
  Layout c = a;
  c.h_c = 2.0;
  c.h_f = 1.0;  // disjoint height intervals
  CHECK(ncl::iou3d(c, b) == doctest::Approx(0.0));
}

TEST_CASE("scale error tracks the room height ratio") {
  const Layout gt = testutil::square_room(2.0, 1.5, -1.2);
  Layout pred = gt;
  CHECK(ncl::scale_error_pct(pred, gt) == doctest::Approx(0.0));
  pred.h_c = 1.5 * 1.1;
  pred.h_f = -1.2 * 1.1;
  CHECK(ncl::scale_error_pct(pred, gt) == doctest::Approx(10.0).epsilon(1e-9));
  Layout flat = gt;
  flat.h_f = flat.h_c;
  try {
    ncl::scale_error_pct(pred, flat);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DegenerateConfig);
  }
}

TEST_CASE("evaluating a layout against itself is perfect") {
  const Layout gt = testutil::l_room(1.3, -1.6);
  const auto r = ncl::evaluate(gt, gt);
  CHECK(r.ce_m == doctest::Approx(0.0));
  CHECK(r.cen_pct == doctest::Approx(0.0));
  CHECK(!r.corner_count_mismatch);
  CHECK(r.iou2d_pct > 99.9);
  CHECK(r.iou3d_pct > 99.9);
  CHECK(r.dir_err_deg == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.depth_err_m == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.scale_err_pct == doctest::Approx(0.0));
  CHECK(r.wall_count_pred == 6);
  CHECK(r.wall_count_gt == 6);
}

TEST_CASE("evaluate flags wall and corner count differences") {
  const Layout gt = testutil::square_room(2.0, 1.5, -1.2);
  const Layout pred = testutil::l_room(1.5, -1.2);
  const auto r = ncl::evaluate(pred, gt);
  CHECK(r.wall_count_pred == 6);
  CHECK(r.wall_count_gt == 4);
  CHECK(r.corner_count_mismatch);
}
