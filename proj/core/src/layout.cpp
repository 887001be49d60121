#include "ncl/layout.hpp"

#include <cmath>
#include <string>

#include "ncl/error.hpp"

namespace ncl {

PluckerLine wall_line(const Wall& w, double h) {
  // Point on the line: d*e2 + h*e3; direction (u, 0).
  const Eigen::Vector2d e2 = wall_normal(w);
  PluckerLine l;
  l.dir = {w.u.x(), w.u.y(), 0.0};
  l.mom = {-h * w.u.y(), h * w.u.x(), -w.d};  // (d*e2 + h*e3) x dir
  return l;
}

CornerSet corner_set(const Layout& l) {
  CornerSet cs;
  cs.ceiling.reserve(l.corners.size());
  cs.floor.reserve(l.corners.size());
  for (const auto& c : l.corners) {
    cs.ceiling.emplace_back(c.x(), c.y(), l.h_c);
    cs.floor.emplace_back(c.x(), c.y(), l.h_f);
  }
  return cs;
}

Layout layout_from_corners(std::vector<Eigen::Vector2d> corners, double h_c, double h_f) {
  if (corners.size() < 3) fail(Err::DegenerateConfig, "polygon needs at least 3 corners");
  Layout l;
  l.h_c = h_c;
  l.h_f = h_f;
  l.corners = std::move(corners);
  const std::size_t n = l.corners.size();
  l.walls.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector2d a = l.corners[k];
    const Eigen::Vector2d b = l.corners[(k + 1) % n];
    Eigen::Vector2d t = b - a;
    const double len = t.norm();
    if (len < 1e-12) fail(Err::DegenerateConfig, "zero-length wall");
    t /= len;
    Wall w;
    w.u = -t;  // e2(u) is then the right normal of the travel direction
    w.d = a.dot(wall_normal(w));
    if (w.d < 0.0) {
      w.u = -w.u;
      w.d = -w.d;
    }
    l.walls[k] = w;
  }
  return l;
}

double polygon_signed_area(const std::vector<Eigen::Vector2d>& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

namespace {

bool segments_properly_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  const auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u.x() * v.y() - u.y() * v.x();
  };
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

bool polygon_is_simple(const std::vector<Eigen::Vector2d>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (shared endpoint).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_properly_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double distance_to_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-24) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool layout_is_valid(const Layout& l, std::string* why) {
  const auto bad = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  const std::size_t n = l.walls.size();
  if (n < 3) return bad("fewer than 3 walls");
  if (l.corners.size() != n) return bad("corner/wall count mismatch");
  if (!(l.h_c > l.h_f)) return bad("h_c must exceed h_f");
  if (polygon_signed_area(l.corners) <= 0.0) return bad("corners are not counter-clockwise");
  if (!polygon_is_simple(l.corners)) return bad("polygon self-intersects");
  for (std::size_t k = 0; k < n; ++k) {
    const Wall& w = l.walls[k];
    if (std::abs(w.u.norm() - 1.0) > 1e-9) return bad("wall direction not unit");
    if (w.d < 0.0) return bad("negative wall distance");
    const Eigen::Vector2d e2 = wall_normal(w);
    const double scale = 1.0 + std::abs(w.d);
    if (std::abs(l.corners[k].dot(e2) - w.d) > 1e-6 * scale ||
        std::abs(l.corners[(k + 1) % n].dot(e2) - w.d) > 1e-6 * scale)
      return bad("wall plane misses its endpoint corners");
  }
  return true;
}

}  // namespace ncl
