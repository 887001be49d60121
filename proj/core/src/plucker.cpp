#include "ncl/plucker.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ncl/error.hpp"

namespace ncl {

PluckerLine line_through_points(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  PluckerLine l;
  l.dir = b - a;
  if (l.dir.norm() < 1e-14) fail(Err::DegenerateConfig, "coincident points define no line");
  l.mom = a.cross(l.dir);
  return l;
}

double side(const Eigen::Vector3d& dir_a, const Eigen::Vector3d& mom_a,
            const Eigen::Vector3d& dir_b, const Eigen::Vector3d& mom_b) {
  return dir_a.dot(mom_b) + mom_a.dot(dir_b);
}

double side(const PluckerRay& a, const PluckerRay& b) { return side(a.dir, a.mom, b.dir, b.mom); }
double side(const PluckerLine& l, const PluckerRay& r) { return side(l.dir, l.mom, r.dir, r.mom); }
double side(const PluckerLine& a, const PluckerLine& b) { return side(a.dir, a.mom, b.dir, b.mom); }

std::vector<Eigen::Vector2d> solve_homogeneous_quadratic(double a, double b, double c,
                                                         double scale, bool* identically_zero) {
  if (identically_zero) *identically_zero = false;
  const double mag = std::max({std::abs(a), std::abs(b), std::abs(c)});
  std::vector<Eigen::Vector2d> roots;
  if (mag < 1e-14 * std::max(scale, 1e-300)) {
    if (identically_zero) *identically_zero = true;
    return roots;
  }
  // Parameterize by the larger squared coefficient so the leading term is sound.
  const bool by_t0 = std::abs(a) >= std::abs(c);
  const double lead = by_t0 ? a : c;
  const double tail = by_t0 ? c : a;
  if (std::abs(lead) < 1e-12 * mag) {
    // Degenerate to linear: b*t0*t1 + tail*t1^2 = 0 (or symmetric counterpart).
    roots.push_back(by_t0 ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0));
    if (std::abs(b) > 1e-12 * mag)
      roots.push_back(by_t0 ? Eigen::Vector2d(-tail / b, 1.0) : Eigen::Vector2d(1.0, -tail / b));
    return roots;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    if (-disc <= 1e-12 * (b * b + 4.0 * std::abs(a * c))) disc = 0.0;  // near-double root
    else return roots;
  }
  const double sq = std::sqrt(disc);
  // Citardauq pairing avoids cancellation in the small root.
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double t1 = q / lead;
  double t2 = (std::abs(q) > 0.0) ? tail / q : 0.0;
  if (disc == 0.0) t2 = t1;
  for (double t : {t1, t2}) {
    const Eigen::Vector2d r = by_t0 ? Eigen::Vector2d(t, 1.0) : Eigen::Vector2d(1.0, t);
    roots.push_back(r.normalized());
  }
  if (roots.size() == 2 && (roots[0] - roots[1]).norm() < 1e-12 &&
      (roots[0] + roots[1]).norm() > 1e-12)
    roots.pop_back();
  return roots;
}

std::vector<PluckerLine> line_from_four_rays(const PluckerRay r[4]) {
  // Row i dotted with (l, lbar) is side(ray_i, L).
  Eigen::Matrix<double, 4, 6> m;
  for (int i = 0; i < 4; ++i) {
    m.block<1, 3>(i, 0) = r[i].mom.transpose();
    m.block<1, 3>(i, 3) = r[i].dir.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 6>> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(3) < 1e-8 * s(0))
    fail(Err::DegenerateRays, "four rays do not give independent constraints");

  const Eigen::Matrix<double, 6, 1> b0 = svd.matrixV().col(4);
  const Eigen::Matrix<double, 6, 1> b1 = svd.matrixV().col(5);
  const auto quad = [](const Eigen::Matrix<double, 6, 1>& w) {
    return w.head<3>().dot(w.tail<3>());
  };
  const auto polar = [](const Eigen::Matrix<double, 6, 1>& x, const Eigen::Matrix<double, 6, 1>& y) {
    return x.head<3>().dot(y.tail<3>()) + x.tail<3>().dot(y.head<3>());
  };
  bool flat = false;
  const auto roots = solve_homogeneous_quadratic(quad(b0), polar(b0, b1), quad(b1), 1.0, &flat);
  if (flat) fail(Err::DegenerateRays, "null space lies inside the Plucker quadric");
  if (roots.empty()) fail(Err::NoRealSolution, "quadric intersection is complex");

  std::vector<PluckerLine> lines;
  for (const auto& ab : roots) {
    const Eigen::Matrix<double, 6, 1> w = ab(0) * b0 + ab(1) * b1;
    const double n = w.head<3>().norm();
    if (n < 1e-10 * w.norm()) continue;  // line at infinity, not a spatial line
    lines.push_back(PluckerLine{w.head<3>() / n, w.tail<3>() / n});
  }
  if (lines.empty()) fail(Err::NoRealSolution, "no spatial line in the quadric intersection");
  return lines;
}

Eigen::Vector3d closest_point_on_line_to_ray(const PluckerLine& line, const PluckerRay& ray,
                                             double* gap) {
  const Eigen::Vector3d d1 = line.dir.normalized();
  const Eigen::Vector3d p1 = line.closest_to_origin();
  const Eigen::Vector3d& d2 = ray.dir;
  const Eigen::Vector3d p2 = d2.cross(ray.mom);  // |dir|=1 for rays
  const double b = d1.dot(d2);
  const double denom = 1.0 - b * b;  // = |d1 x d2|^2 for unit directions
  if (denom < 1e-12) fail(Err::ParallelLines, "closest point undefined for parallel lines");
  const Eigen::Vector3d w = p1 - p2;
  const double d = d1.dot(w), e = d2.dot(w);
  const double t1 = (b * e - d) / denom;
  const Eigen::Vector3d q1 = p1 + t1 * d1;
  if (gap) {
    const double t2 = (e - b * d) / denom;
    *gap = (q1 - (p2 + t2 * d2)).norm();
  }
  return q1;
}

Eigen::Vector3d intersect_coplanar_lines(const PluckerLine& a, const PluckerLine& b) {
  const PluckerLine an = a.normalized(), bn = b.normalized();
  const double s = side(an, bn);
  if (std::abs(s) / (1.0 + std::max(an.depth(), bn.depth())) > 1e-6)
    fail(Err::NotCoplanar, "lines are skew");
  const double denom = 1.0 - std::pow(an.dir.dot(bn.dir), 2);
  if (denom < 1e-12) fail(Err::ParallelLines, "parallel lines do not intersect");
  double gap = 0.0;
  const Eigen::Vector3d qa = closest_point_on_line_to_ray(an, PluckerRay{bn.dir, bn.mom}, &gap);
  const Eigen::Vector3d qb = closest_point_on_line_to_ray(bn, PluckerRay{an.dir, an.mom});
  return 0.5 * (qa + qb);
}

}  // namespace ncl
