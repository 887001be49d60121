#include "ncl/solvers.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "ncl/error.hpp"

namespace ncl {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Shared machinery for extract_wall and solve_manhattan. The unknown vector is
// (u_x, u_y, v_x, v_y, w_x, w_y, d_1..d_N); v = h_c u and w = h_f u hold only on
// the parallelism quadrics, which the null space is intersected with. A candidate
// is accepted if h_c > h_f; among acceptable candidates the smaller row RMS wins.
struct WallSystem {
  Eigen::MatrixXd a;  // row-normalized
  int n_walls = 0;

  int cols() const { return 6 + n_walls; }

  struct Candidate {
    Eigen::VectorXd w;
    Eigen::Vector2d ab{0.0, 0.0};  // null-space mixing coefficients
    double rms = 0.0;
  };

  // Ceiling rows couple (u, v, d_i); floor rows couple (u, w, d_i). label 1 walls
  // use the perpendicular direction, which swaps the coupling pattern:
  //   label 0 ceiling: [ m1, m2,  x2, -x1,  0, 0, ..., -x3 at d_i ]
  //   label 1 ceiling: [ m2, -m1, -x1, -x2, 0, 0, ..., -x3 at d_i ]
  void add_ray(int wall, int label, bool is_ceiling, const PluckerRay& r) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(cols());
    const int vbase = is_ceiling ? 2 : 4;
    if (label == 0) {
      row(0) = r.mom.x();
      row(1) = r.mom.y();
      row(vbase) = r.dir.y();
      row(vbase + 1) = -r.dir.x();
    } else {
      row(0) = r.mom.y();
      row(1) = -r.mom.x();
      row(vbase) = -r.dir.x();
      row(vbase + 1) = -r.dir.y();
    }
    row(6 + wall) = -r.dir.z();
    const double n = row.norm();
    if (n > 0.0) row /= n;
    rows_.push_back(row);
  }

  void finalize() {
    a.resize(static_cast<int>(rows_.size()), cols());
    for (int i = 0; i < a.rows(); ++i) a.row(i) = rows_[static_cast<std::size_t>(i)];
  }

  struct NullSpace {
    Eigen::VectorXd w0, w1;
    std::vector<Eigen::Vector2d> ceiling_roots, floor_roots;
  };

  std::vector<Candidate> solve(NullSpace* ns = nullptr) const {
    const int k = cols();
    if (a.rows() < k - 1)
      fail(Err::RankDeficient, "not enough rays for the wall system");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    // Rank must reach k-2: a genuine solution leaves at most a 2-D null space.
    if (s(k - 3) < 1e-8 * s(0))
      fail(Err::RankDeficient, "wall system rank below " + std::to_string(k - 2));
    const Eigen::VectorXd w0 = svd.matrixV().col(k - 2);
    const Eigen::VectorXd w1 = svd.matrixV().col(k - 1);

    const auto quad_coeffs = [&](int base) {
      const Eigen::Vector2d u0 = w0.segment<2>(0), p0 = w0.segment<2>(base);
      const Eigen::Vector2d u1 = w1.segment<2>(0), p1 = w1.segment<2>(base);
      return Eigen::Vector3d(cross2(u0, p0), cross2(u0, p1) + cross2(u1, p0), cross2(u1, p1));
    };
    const Eigen::Vector3d qv = quad_coeffs(2);
    const Eigen::Vector3d qw = quad_coeffs(4);

    // Pool roots of both quadrics; with redundant rays only the true root is
    // shared (the null space is 1-D and the junk roots differ), so candidates
    // are filtered by the actual row residual rather than by root pairing.
    bool flat_v = false, flat_w = false;
    auto roots_v = solve_homogeneous_quadratic(qv(0), qv(1), qv(2), 1.0, &flat_v);
    auto roots_w = solve_homogeneous_quadratic(qw(0), qw(1), qw(2), 1.0, &flat_w);
    if (ns) {
      ns->w0 = w0;
      ns->w1 = w1;
      ns->ceiling_roots = roots_v;
      ns->floor_roots = roots_w;
    }
    auto roots = std::move(roots_v);
    roots.insert(roots.end(), roots_w.begin(), roots_w.end());
    if (flat_v && flat_w)
      fail(Err::RankDeficient, "parallelism quadrics vanish on the null space");
    if (roots.empty()) fail(Err::ComplexRoots, "both selection quadratics have complex roots");

    std::vector<Candidate> out;
    for (const auto& ab : roots) {
      Eigen::VectorXd w = ab(0) * w0 + ab(1) * w1;
      const double un = w.segment<2>(0).norm();
      if (un < 1e-10 * w.norm()) continue;
      w /= un;
      // A root zeroes its own quadric only; violation of the other one (roots
      // stop pairing under noise) surfaces in the row residual instead.
      Candidate c;
      c.w = w;
      c.ab = ab;
      c.rms = std::sqrt((a * w).squaredNorm() / static_cast<double>(a.rows()));
      // Deduplicate sign-flipped and repeated roots.
      bool dup = false;
      for (const auto& prev : out)
        if ((prev.w - w).norm() < 1e-9 || (prev.w + w).norm() < 1e-9) dup = true;
      if (!dup) out.push_back(std::move(c));
    }
    if (out.empty()) fail(Err::NoValidRoot, "no root yields a spatial wall");
    return out;
  }

 private:
  std::vector<Eigen::RowVectorXd> rows_;
};

}  // namespace

namespace {

// Shared body of extract_wall / extract_wall_candidates: solve the one-wall
// system, keep the h_c > h_f roots sorted by RMS, and optionally report the
// null-space internals of the front root.
std::vector<WallSolution> wall_roots(const RaySet& rays, ExtractDiagnostics* diag) {
  if (rays.ceiling.size() < 3 || rays.floor.size() < 3)
    fail(Err::RankDeficient, "need at least 3 ceiling and 3 floor rays");
  WallSystem sys;
  sys.n_walls = 1;
  for (const auto& r : rays.ceiling) sys.add_ray(0, 0, true, r);
  for (const auto& r : rays.floor) sys.add_ray(0, 0, false, r);
  sys.finalize();

  WallSystem::NullSpace ns;
  const auto candidates = sys.solve(diag ? &ns : nullptr);
  std::vector<WallSolution> out;
  std::vector<Eigen::Vector2d> out_ab;
  for (const auto& c : candidates) {
    Eigen::VectorXd w = c.w;
    if (w(6) < 0.0) w = -w;  // d >= 0; heights are sign-invariant under the flip
    const Eigen::Vector2d u = w.segment<2>(0);
    const double hc = u.dot(w.segment<2>(2));
    const double hf = u.dot(w.segment<2>(4));
    if (!(hc > hf)) continue;
    WallSolution s;
    s.u = u;
    s.d = w(6);
    s.h_c = hc;
    s.h_f = hf;
    s.rms = c.rms;
    // Insertion sort by RMS keeps the list small-to-large without <algorithm>.
    std::size_t at = out.size();
    while (at > 0 && out[at - 1].rms > s.rms) --at;
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), s);
    out_ab.insert(out_ab.begin() + static_cast<std::ptrdiff_t>(at), c.ab);
  }
  if (out.empty()) fail(Err::NoValidRoot, "no root satisfies h_c > h_f");
  if (diag) {
    diag->basis0 = ns.w0;
    diag->basis1 = ns.w1;
    diag->ceiling_roots = ns.ceiling_roots;
    diag->floor_roots = ns.floor_roots;
    diag->lambda = out_ab.front();
  }
  return out;
}

}  // namespace

WallSolution extract_wall(const RaySet& rays, ExtractDiagnostics* diag) {
  return wall_roots(rays, diag).front();
}

std::vector<WallSolution> extract_wall_candidates(const RaySet& rays) {
  return wall_roots(rays, nullptr);
}

std::vector<Wall> ManhattanSolution::walls() const {
  std::vector<Wall> out;
  out.reserve(d.size());
  const Eigen::Vector2d perp(-axis_u.y(), axis_u.x());
  for (std::size_t i = 0; i < d.size(); ++i) {
    // label 0 walls run along the axis; label 1 rows were built with
    // e1 = (-u_y, u_x), e2 = (-u_x, -u_y).
    Wall w;
    w.u = labels[i] == 0 ? axis_u : perp;
    w.d = d[i];
    if (w.d < 0.0) {
      w.u = -w.u;
      w.d = -w.d;
    }
    out.push_back(w);
  }
  return out;
}

ManhattanSolution solve_manhattan(const std::vector<RaySet>& walls,
                                  const std::vector<int>& labels) {
  if (walls.empty() || walls.size() != labels.size())
    fail(Err::DegenerateConfig, "wall/label counts do not match");
  WallSystem sys;
  sys.n_walls = static_cast<int>(walls.size());
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      fail(Err::DegenerateConfig, "labels must be 0 or 1");
    for (const auto& r : walls[i].ceiling)
      sys.add_ray(static_cast<int>(i), labels[i], true, r);
    for (const auto& r : walls[i].floor)
      sys.add_ray(static_cast<int>(i), labels[i], false, r);
  }
  sys.finalize();

  const auto candidates = sys.solve();
  ManhattanSolution best;
  bool found = false;
  for (const auto& c : candidates) {
    const Eigen::Vector2d u = c.w.segment<2>(0);
    const double hc = u.dot(c.w.segment<2>(2));
    const double hf = u.dot(c.w.segment<2>(4));
    if (!(hc > hf)) continue;
    if (!found || c.rms < best.rms) {
      found = true;
      best.axis_u = u;
      best.h_c = hc;
      best.h_f = hf;
      best.rms = c.rms;
      best.labels = labels;
      best.d.assign(c.w.data() + 6, c.w.data() + 6 + sys.n_walls);
    }
  }
  if (!found) fail(Err::NoValidRoot, "no root satisfies h_c > h_f");
  return best;
}

AtlantaSolution solve_atlanta(const std::vector<RaySet>& walls,
                              const std::vector<Eigen::Vector2d>& directions) {
  const int n = static_cast<int>(walls.size());
  if (n == 0 || walls.size() != directions.size())
    fail(Err::DegenerateConfig, "wall/direction counts do not match");
  const int k = 3 + n;
  std::vector<Eigen::RowVectorXd> rows;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d u = directions[static_cast<std::size_t>(i)].normalized();
    Eigen::Matrix3d rot;  // rows are the wall frame axes e1, e2, e3
    rot << u.x(), u.y(), 0.0, -u.y(), u.x(), 0.0, 0.0, 0.0, 1.0;
    const auto add = [&](const PluckerRay& r, bool is_ceiling) {
      const Eigen::Vector3d dp = rot * r.dir;
      const Eigen::Vector3d mp = rot * r.mom;  // moments rotate like vectors
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k);
      row(0) = mp.x();
      row(is_ceiling ? 1 : 2) = dp.y();
      row(3 + i) = -dp.z();
      const double nn = row.norm();
      if (nn > 0.0) row /= nn;
      rows.push_back(row);
    };
    for (const auto& r : walls[static_cast<std::size_t>(i)].ceiling) add(r, true);
    for (const auto& r : walls[static_cast<std::size_t>(i)].floor) add(r, false);
  }
  if (static_cast<int>(rows.size()) < k - 1)
    fail(Err::RankDeficient, "not enough rays for the Atlanta system");
  Eigen::MatrixXd a(static_cast<int>(rows.size()), k);
  for (int i = 0; i < a.rows(); ++i) a.row(i) = rows[static_cast<std::size_t>(i)];

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(k - 2) < 1e-8 * s(0)) fail(Err::RankDeficient, "Atlanta system rank deficient");
  Eigen::VectorXd w = svd.matrixV().col(k - 1);
  if (std::abs(w(0)) < 1e-10 * w.norm())
    fail(Err::DehomogenizationFailure, "homogeneous component vanishes");
  w /= w(0);

  AtlantaSolution out;
  out.h_c = w(1);
  out.h_f = w(2);
  out.rms = std::sqrt((a * (w / w.norm())).squaredNorm() / static_cast<double>(a.rows()));
  out.walls_out.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Wall wall;
    wall.u = directions[static_cast<std::size_t>(i)].normalized();
    wall.d = w(3 + i);
    if (wall.d < 0.0) {
      wall.u = -wall.u;
      wall.d = -wall.d;
    }
    out.walls_out[static_cast<std::size_t>(i)] = wall;
  }
  if (!(out.h_c > out.h_f)) fail(Err::NoValidRoot, "recovered heights violate h_c > h_f");
  return out;
}

}  // namespace ncl
