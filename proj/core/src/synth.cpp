#include "ncl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncl/error.hpp"
#include "ncl/rng.hpp"

namespace ncl {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

struct Poly {
  std::vector<Eigen::Vector2d> v;  // CCW

  Eigen::Vector2d& at(int k) {
    const int n = static_cast<int>(v.size());
    return v[static_cast<std::size_t>(((k % n) + n) % n)];
  }
  double edge_len(int k) { return (at(k + 1) - at(k)).norm(); }
};

// Carves a rectangular notch at a convex corner: corner k is replaced by three
// corners, adding two walls and keeping the polygon rectilinear.
bool carve_notch(Poly& p, int k, Rng& rng, double min_edge) {
  const Eigen::Vector2d prev = p.at(k - 1), cur = p.at(k), next = p.at(k + 1);
  const Eigen::Vector2d tin = (cur - prev).normalized();
  const Eigen::Vector2d tout = (next - cur).normalized();
  if (cross2(tin, tout) <= 0.5) return false;  // convex 90-degree corners only
  const double lin = (cur - prev).norm(), lout = (next - cur).norm();
  if (lin < 2.0 * min_edge + 1e-9 || lout < 2.0 * min_edge + 1e-9) return false;
  const double a = rng.uniform(min_edge, lin - min_edge);
  const double b = rng.uniform(min_edge, lout - min_edge);
  const Eigen::Vector2d v1 = cur - a * tin;
  const Eigen::Vector2d v2 = v1 + b * tout;
  const Eigen::Vector2d v3 = cur + b * tout;
  std::vector<Eigen::Vector2d> out;
  const int n = static_cast<int>(p.v.size());
  for (int i = 0; i < n; ++i) {
    if (i == ((k % n) + n) % n) {
      out.push_back(v1);
      out.push_back(v2);
      out.push_back(v3);
    } else {
      out.push_back(p.at(i));
    }
  }
  p.v = std::move(out);
  return true;
}

// Replaces corner k with a straight oblique cut (one extra wall).
bool clip_corner(Poly& p, int k, Rng& rng, double min_edge, double fmin, double fmax) {
  const Eigen::Vector2d prev = p.at(k - 1), cur = p.at(k), next = p.at(k + 1);
  const double lin = (cur - prev).norm(), lout = (next - cur).norm();
  const Eigen::Vector2d tin = (cur - prev) / lin;
  const Eigen::Vector2d tout = (next - cur) / lout;
  const double a = rng.uniform(fmin, fmax) * lin;
  const double b = rng.uniform(fmin, fmax) * lout;
  if (a < min_edge || b < min_edge) return false;
  if (lin - a < min_edge || lout - b < min_edge) return false;
  const Eigen::Vector2d c1 = cur - a * tin;
  const Eigen::Vector2d c2 = cur + b * tout;
  if ((c2 - c1).norm() < min_edge) return false;
  std::vector<Eigen::Vector2d> out;
  const int n = static_cast<int>(p.v.size());
  for (int i = 0; i < n; ++i) {
    if (i == ((k % n) + n) % n) {
      out.push_back(c1);
      out.push_back(c2);
    } else {
      out.push_back(p.at(i));
    }
  }
  p.v = std::move(out);
  return true;
}

double wrap_into(double azimuth, const CameraModel& cam) {
  if (azimuth < cam.varphi_min) azimuth += kTwoPi;
  if (azimuth >= cam.varphi_max && azimuth - kTwoPi >= cam.varphi_min) azimuth -= kTwoPi;
  return azimuth;
}

}  // namespace

Layout generate_layout(const LayoutSpec& spec) {
  if (spec.min_walls < 4 || spec.max_walls < spec.min_walls)
    fail(Err::DegenerateConfig, "wall count range must satisfy 4 <= min <= max");
  if (spec.max_side < spec.min_side || !(spec.min_side > 0.0) ||
      spec.hc_max < spec.hc_min || spec.hf_max < spec.hf_min || !(spec.hc_min > 0.0) ||
      !(spec.hf_max < 0.0))
    fail(Err::DegenerateConfig, "layout spec ranges are inconsistent");
  Rng rng(spec.seed);
  const double clearance =
      std::max({spec.rc + 0.1, 0.3, spec.min_wall_dist});

  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    Poly poly;
    const double w = rng.uniform(spec.min_side, spec.max_side);
    const double h = rng.uniform(spec.min_side, spec.max_side);
    poly.v = {{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}};

    // Even Manhattan wall budget. An Atlanta base leaves headroom for one
    // extra wall per expected corner clip (the clip walk still hard-caps the
    // final count at max_walls).
    int hi_even = spec.max_walls - (spec.max_walls % 2);
    if (spec.world == World::atlanta)
      while (hi_even > 4 &&
             hi_even + static_cast<int>(std::ceil(spec.clip_prob * hi_even)) >
                 spec.max_walls)
        hi_even -= 2;
    const int lo_even = std::max(4, spec.min_walls + (spec.min_walls % 2));
    hi_even = std::max(hi_even, lo_even);
    const int target = lo_even >= hi_even
                           ? lo_even
                           : lo_even + 2 * rng.uniform_int(0, (hi_even - lo_even) / 2);
    bool ok = true;
    for (int notch = 0; notch < (target - 4) / 2 && ok; ++notch) {
      bool carved = false;
      for (int tries = 0; tries < 20 && !carved; ++tries) {
        const int k = rng.uniform_int(0, static_cast<int>(poly.v.size()) - 1);
        carved = carve_notch(poly, k, rng, spec.min_edge);
      }
      ok = carved && polygon_is_simple(poly.v);
    }
    if (!ok) continue;

    if (spec.world == World::atlanta) {
      int k = 0;
      while (k < static_cast<int>(poly.v.size()) &&
             static_cast<int>(poly.v.size()) < spec.max_walls) {
        if (rng.bernoulli(spec.clip_prob) &&
            clip_corner(poly, k, rng, spec.min_edge, spec.clip_frac_min, spec.clip_frac_max)) {
          k += 2;
        } else {
          k += 1;
        }
      }
      if (!polygon_is_simple(poly.v)) continue;
    }
    if (static_cast<int>(poly.v.size()) < spec.min_walls ||
        static_cast<int>(poly.v.size()) > spec.max_walls)
      continue;
    if (polygon_signed_area(poly.v) <= 0.0) continue;

    // Camera placement by rejection inside the polygon.
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& c : poly.v) {
      xmin = std::min(xmin, c.x());
      xmax = std::max(xmax, c.x());
      ymin = std::min(ymin, c.y());
      ymax = std::max(ymax, c.y());
    }
    const int n = static_cast<int>(poly.v.size());
    for (int place = 0; place < 50; ++place) {
      const Eigen::Vector2d p(rng.uniform(xmin, xmax), rng.uniform(ymin, ymax));
      if (!point_in_polygon(p, poly.v)) continue;
      bool fits = true;
      for (int e = 0; e < n && fits; ++e) {
        const double dist =
            distance_to_segment(p, poly.v[static_cast<std::size_t>(e)],
                                poly.v[static_cast<std::size_t>((e + 1) % n)]);
        fits = dist >= clearance && dist <= spec.max_wall_dist;
      }
      if (!fits) continue;

      std::vector<Eigen::Vector2d> corners = poly.v;
      for (auto& c : corners) c -= p;
      const double hc = rng.uniform(spec.hc_min, spec.hc_max);
      const double hf = rng.uniform(spec.hf_min, spec.hf_max);
      Layout l = layout_from_corners(std::move(corners), hc, hf);
      std::string why;
      if (!layout_is_valid(l, &why)) break;  // next attempt
      return l;
    }
  }
  fail(Err::RejectionOverflow, "no valid room after the attempt budget");
}

BoundaryMap project_layout(const Layout& layout, const CameraModel& cam,
                           VisibilityReport* report) {
  const std::size_t n = layout.corners.size();
  if (!point_in_polygon({0.0, 0.0}, layout.corners))
    fail(Err::CameraOutsideRoom, "camera origin outside the floor polygon");
  for (std::size_t e = 0; e < n; ++e)
    if (distance_to_segment({0.0, 0.0}, layout.corners[e], layout.corners[(e + 1) % n]) <=
        cam.rc)
      fail(Err::CameraOutsideRoom, "wall inside the optical-center circle");

  BoundaryMap bm;
  bm.ceiling_row.resize(static_cast<std::size_t>(cam.cols));
  bm.floor_row.resize(static_cast<std::size_t>(cam.cols));
  bm.corner_score.assign(static_cast<std::size_t>(cam.cols), 0.0);
  VisibilityReport local;
  VisibilityReport& rep = report ? *report : local;
  rep.wall_of_col.assign(static_cast<std::size_t>(cam.cols), -1);
  rep.radius_of_col.assign(static_cast<std::size_t>(cam.cols), 0.0);
  rep.corner_cols.clear();
  rep.visible_cols_per_wall.assign(n, 0);

  // Planar radial cast against every wall segment; the room is small enough
  // that brute force beats any acceleration structure.
  const auto cast = [&](double azimuth, int* wall, double* radius) {
    const Eigen::Vector2d dir(std::cos(azimuth), std::sin(azimuth));
    double best = std::numeric_limits<double>::infinity();
    int hit = -1;
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::Vector2d a = layout.corners[k];
      const Eigen::Vector2d e = layout.corners[(k + 1) % n] - a;
      const double denom = cross2(e, dir);
      if (std::abs(denom) < 1e-14) continue;
      const double s = cross2(a, dir) / -denom;
      if (s < -1e-9 || s > 1.0 + 1e-9) continue;
      const double r = (a + s * e).dot(dir);
      if (r > cam.rc + 1e-12 && r < best) {
        best = r;
        hit = static_cast<int>(k);
      }
    }
    *wall = hit;
    *radius = best;
  };

  for (int j = 0; j < cam.cols; ++j) {
    const double az = cam.col_center_azimuth(j);
    int wall = -1;
    double r = 0.0;
    cast(az, &wall, &r);
    if (wall < 0) fail(Err::CameraOutsideRoom, "radial ray escapes the polygon");
    bm.ceiling_row[static_cast<std::size_t>(j)] =
        cam.row_of_elevation(std::atan2(layout.h_c, r - cam.rc));
    bm.floor_row[static_cast<std::size_t>(j)] =
        cam.row_of_elevation(std::atan2(layout.h_f, r - cam.rc));
    rep.wall_of_col[static_cast<std::size_t>(j)] = wall;
    rep.radius_of_col[static_cast<std::size_t>(j)] = r;
    rep.visible_cols_per_wall[static_cast<std::size_t>(wall)]++;
  }

  // Visible polygon corners are the corner events; a depth discontinuity's
  // apparent corner shares the occluder corner's column, so no separate event
  // is needed for the far side.
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector2d c = layout.corners[k];
    const double rc_corner = c.norm();
    const double az = wrap_into(std::atan2(c.y(), c.x()), cam);
    int wall = -1;
    double r = 0.0;
    cast(az, &wall, &r);
    if (wall < 0 || r < rc_corner - 1e-6 * (1.0 + rc_corner)) continue;  // hidden corner
    const double col_cont = cam.col_of_azimuth(az);
    if (!cam.full_turn() && (col_cont < 0.0 || col_cont >= cam.cols)) continue;
    const int col =
        ((static_cast<int>(std::llround(col_cont - 0.5)) % cam.cols) + cam.cols) % cam.cols;
    rep.corner_cols.push_back(col);
  }
  std::sort(rep.corner_cols.begin(), rep.corner_cols.end());
  rep.corner_cols.erase(std::unique(rep.corner_cols.begin(), rep.corner_cols.end()),
                        rep.corner_cols.end());

  for (int j = 0; j < cam.cols; ++j) {
    int dmin = cam.cols;
    for (int c : rep.corner_cols) {
      int d = std::abs(j - c);
      if (cam.full_turn()) d = std::min(d, cam.cols - d);
      dmin = std::min(dmin, d);
    }
    if (dmin < cam.cols)
      bm.corner_score[static_cast<std::size_t>(j)] = std::pow(0.96, dmin);
  }
  return bm;
}

BoundaryMap add_noise(const BoundaryMap& bm, const NoiseSpec& noise, int image_rows) {
  if (!bm.consistent()) fail(Err::BadInput, "inconsistent boundary map");
  Rng rng(noise.seed);
  BoundaryMap out = bm;
  const int n = bm.cols();
  if (noise.sigma_px > 0.0) {
    for (int j = 0; j < n; ++j) {
      out.ceiling_row[static_cast<std::size_t>(j)] += rng.normal(0.0, noise.sigma_px);
      out.floor_row[static_cast<std::size_t>(j)] += rng.normal(0.0, noise.sigma_px);
    }
  }
  if (noise.spike_rate > 0.0) {
    const int k = static_cast<int>(noise.spike_rate * n);
    std::vector<int> cols(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) cols[static_cast<std::size_t>(j)] = j;
    rng.shuffle(cols);
    for (int i = 0; i < k; ++i) {
      const int j = cols[static_cast<std::size_t>(i)];
      out.ceiling_row[static_cast<std::size_t>(j)] +=
          (rng.bernoulli(0.5) ? 1.0 : -1.0) * noise.spike_mag_px;
      out.floor_row[static_cast<std::size_t>(j)] +=
          (rng.bernoulli(0.5) ? 1.0 : -1.0) * noise.spike_mag_px;
    }
  }
  for (int j = 0; j < n; ++j) {
    double& c = out.ceiling_row[static_cast<std::size_t>(j)];
    double& f = out.floor_row[static_cast<std::size_t>(j)];
    if (c < f + 1.0) {  // rows grow with elevation; keep ceiling >= floor + 1 px
      const double mid = 0.5 * (c + f);
      c = mid + 0.5;
      f = mid - 0.5;
    }
    f = std::clamp(f, 0.0, static_cast<double>(image_rows) - 1.0);
    c = std::clamp(c, f + 1.0, static_cast<double>(image_rows));
  }
  return out;
}

}  // namespace ncl
