#pragma once

#include <Eigen/Core>
#include <vector>

namespace ncl {

// Oriented projecting ray: unit direction plus moment about the origin.
// Invariants: |dir| = 1, dir . mom = 0.
struct PluckerRay {
  Eigen::Vector3d dir;
  Eigen::Vector3d mom;
};

// Projective line: (dir, mom) up to common scale, dir . mom = 0, |dir| > 0.
struct PluckerLine {
  Eigen::Vector3d dir;
  Eigen::Vector3d mom;

  // Distance of the line to the origin.
  double depth() const { return mom.norm() / dir.norm(); }
  // Point on the line closest to the origin.
  Eigen::Vector3d closest_to_origin() const { return dir.cross(mom) / dir.squaredNorm(); }
  PluckerLine normalized() const {
    const double n = dir.norm();
    return {dir / n, mom / n};
  }
};

PluckerLine line_through_points(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// Reciprocal product; zero iff the two lines are coplanar (meet or are parallel).
double side(const Eigen::Vector3d& dir_a, const Eigen::Vector3d& mom_a,
            const Eigen::Vector3d& dir_b, const Eigen::Vector3d& mom_b);
double side(const PluckerRay& a, const PluckerRay& b);
double side(const PluckerLine& l, const PluckerRay& r);
double side(const PluckerLine& a, const PluckerLine& b);

// Homogeneous quadratic a*t0^2 + b*t0*t1 + c*t1^2 = 0; returns 0..2 projective
// roots (t0, t1). Parameterizes by the larger of |a|, |c| for stability; a small
// negative discriminant (relative to the coefficient scale) is clamped to zero.
// identically_zero is set when all coefficients vanish relative to `scale`
// (every point of the pencil is a root); no roots are returned in that case.
std::vector<Eigen::Vector2d> solve_homogeneous_quadratic(double a, double b, double c,
                                                         double scale,
                                                         bool* identically_zero = nullptr);

// Recovers the lines meeting four rays: the 4x6 side-constraint system must have
// rank 4 (else DegenerateRays), its 2-D null space is intersected with the Plucker
// quadric, giving up to two lines. For rays of the circular non-central camera one
// solution is always the revolution axis, since every such ray crosses it; the
// caller disambiguates. NoRealSolution if the quadric intersection is complex.
std::vector<PluckerLine> line_from_four_rays(const PluckerRay r[4]);

// Point on `line` closest to `ray` (as infinite lines). gap, when non-null,
// receives the distance between the closest-point pair. ParallelLines when the
// directions are parallel within tolerance.
Eigen::Vector3d closest_point_on_line_to_ray(const PluckerLine& line, const PluckerRay& ray,
                                             double* gap = nullptr);

// Intersection point of two coplanar, non-parallel lines. NotCoplanar when the
// normalized reciprocal product exceeds tolerance, ParallelLines for parallel input.
Eigen::Vector3d intersect_coplanar_lines(const PluckerLine& a, const PluckerLine& b);

}  // namespace ncl
