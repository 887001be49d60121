#include "ncl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "ncl/error.hpp"
#include "ncl/parallel.hpp"
#include "ncl/rng.hpp"

namespace ncl {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kHalfPi = 1.5707963267948966192313216916398;
// Residual stand-in for a column the current wall cannot project to at all.
constexpr double kUnprojectable = 1e3;

int imod(int a, int n) { return ((a % n) + n) % n; }

int cyclic_dist(int a, int b, int n) {
  const int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

std::vector<double> box5(const std::vector<double>& s, bool cyclic) {
  const int n = static_cast<int>(s.size());
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    int taps = 0;
    for (int t = -2; t <= 2; ++t) {
      int k = j + t;
      if (cyclic) {
        k = imod(k, n);
      } else if (k < 0 || k >= n) {
        continue;
      }
      acc += s[static_cast<std::size_t>(k)];
      ++taps;
    }
    out[static_cast<std::size_t>(j)] = acc / taps;
  }
  return out;
}

struct RowPred {
  double ceiling = 0.0;
  double floor = 0.0;
  bool ok = false;
};

// Boundary rows a wall plane {x . n = d} predicts for one column: intersect the
// column's planar radial with the plane, then lift by the two heights.
RowPred predict_rows(const Eigen::Vector2d& normal, double d, double h_c, double h_f,
                     int col, const CameraModel& cam) {
  const double az = cam.col_center_azimuth(col);
  const Eigen::Vector2d v(std::cos(az), std::sin(az));
  const double denom = normal.dot(v);
  if (denom <= 1e-6) return {};
  const double s = d / denom;   // planar distance of the hit from the origin
  const double t = s - cam.rc;  // distance past the optical circle
  if (t <= 1e-6) return {};
  return {cam.row_of_elevation(std::atan2(h_c, t)),
          cam.row_of_elevation(std::atan2(h_f, t)), true};
}

// Planar distance from the origin to the wall plane along the radial at `az`;
// nullopt when the radial runs parallel to or away from the plane.
std::optional<double> radial_hit(const Wall& w, double az) {
  const Eigen::Vector2d v(std::cos(az), std::sin(az));
  const double denom = wall_normal(w).dot(v);
  if (std::abs(denom) <= 1e-9) return std::nullopt;
  const double s = w.d / denom;
  if (s <= 1e-9) return std::nullopt;
  return s;
}

Eigen::Vector2d intersect_wall_planes(const Wall& a, const Wall& b) {
  const Eigen::Vector2d na = wall_normal(a), nb = wall_normal(b);
  const double det = na.x() * nb.y() - na.y() * nb.x();
  if (std::abs(det) < 1e-9) fail(Err::ParallelLines, "adjacent wall planes are parallel");
  return {(a.d * nb.y() - b.d * na.y()) / det, (na.x() * b.d - nb.x() * a.d) / det};
}

}  // namespace

double required_hypotheses(double confidence, double outlier_rate, int sample_size) {
  if (!(confidence > 0.0) || !(confidence < 1.0))
    fail(Err::DegenerateConfig, "confidence must lie in (0,1)");
  if (!(outlier_rate >= 0.0) || !(outlier_rate < 1.0))
    fail(Err::DegenerateConfig, "outlier rate must lie in [0,1)");
  if (sample_size < 1) fail(Err::DegenerateConfig, "sample size must be positive");
  const double clean = std::pow(1.0 - outlier_rate, sample_size);
  if (clean >= 1.0) return 0.0;  // outlier-free: one draw suffices
  const double denom = std::log1p(-clean);
  if (!(clean > 0.0) || denom == 0.0)
    fail(Err::DegenerateConfig, "clean-sample probability underflows");
  return std::log1p(-confidence) / denom;
}

std::vector<int> detect_corner_columns(const BoundaryMap& bm, bool cyclic) {
  if (!bm.consistent() || bm.cols() < 1) fail(Err::BadInput, "inconsistent boundary map");
  const int n = bm.cols();
  const auto sm = box5(bm.corner_score, cyclic);
  std::vector<int> cand;
  for (int j = 0; j < n; ++j) {
    const double sj = sm[static_cast<std::size_t>(j)];
    if (!(sj > 0.5)) continue;
    bool is_max = true;
    for (int t = -4; t <= 4 && is_max; ++t) {
      if (t == 0) continue;
      int k = j + t;
      if (cyclic) {
        k = imod(k, n);
      } else if (k < 0 || k >= n) {
        continue;
      }
      is_max = sm[static_cast<std::size_t>(k)] <= sj;
    }
    if (is_max) cand.push_back(j);
  }
  std::sort(cand.begin(), cand.end(), [&](int a, int b) {
    const double sa = sm[static_cast<std::size_t>(a)], sb = sm[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  std::vector<int> kept;
  for (int j : cand) {
    bool clear = true;
    for (int k : kept) {
      const int d = cyclic ? cyclic_dist(j, k, n) : std::abs(j - k);
      if (d <= 4) {
        clear = false;
        break;
      }
    }
    if (clear) kept.push_back(j);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<Segment> segment_walls(const BoundaryMap& bm, bool cyclic) {
  const auto peaks = detect_corner_columns(bm, cyclic);
  const int n = bm.cols();
  std::vector<Segment> segs;
  if (cyclic) {
    const int m = static_cast<int>(peaks.size());
    if (m < 3) fail(Err::TooFewCorners, "a closed layout needs at least 3 corner peaks");
    for (int i = 0; i < m; ++i) {
      const int b = peaks[static_cast<std::size_t>(i)];
      const int e = peaks[static_cast<std::size_t>((i + 1) % m)];
      segs.push_back({b, imod(e - b, n)});
    }
  } else {
    if (peaks.empty()) fail(Err::TooFewCorners, "no corner peaks in the window");
    int prev = 0;
    for (int p : peaks) {
      if (p > prev) segs.push_back({prev, p - prev});
      prev = p;
    }
    if (n > prev) segs.push_back({prev, n - prev});
  }
  return segs;
}

namespace {

FittedWall fit_segment(const BoundaryMap& bm, const Segment& seg, const CameraModel& cam,
                       const RansacConfig& cfg, int n_iter, std::uint64_t stream) {
  const int n = bm.cols();
  // Trimmed support: the segment's end columns straddle corners.
  int lo = 0, hi = seg.count;
  if (seg.count >= cfg.sample_size + 2) {
    lo = 1;
    hi = seg.count - 1;
  }
  std::vector<int> cols;
  std::vector<PluckerRay> cray, fray;
  std::vector<char> valid;
  for (int t = lo; t < hi; ++t) {
    const int j = imod(seg.begin + t, n);
    cols.push_back(j);
    PluckerRay rc{}, rf{};
    bool ok = true;
    try {
      rc = cam.backproject_pixel({bm.ceiling_row[static_cast<std::size_t>(j)], j + 0.5});
      rf = cam.backproject_pixel({bm.floor_row[static_cast<std::size_t>(j)], j + 0.5});
    } catch (const Error&) {
      ok = false;
    }
    cray.push_back(rc);
    fray.push_back(rf);
    valid.push_back(ok ? 1 : 0);
  }
  const int m = static_cast<int>(cols.size());
  const int n_valid = static_cast<int>(std::count(valid.begin(), valid.end(), 1));
  if (n_valid < cfg.sample_size)
    fail(Err::DegenerateConfig, "segment has too few usable columns");

  // Inliers need both boundary rows within threshold of the prediction.
  // Hypotheses flatter than min_room_height are vetoed outright: a narrow
  // segment's ray bundle is nearly incident to any line grazing the optical
  // circle in the camera plane, and that near-degenerate root can out-score
  // the actual wall while carrying centimetre-scale heights.
  auto score = [&](const WallSolution& w, std::vector<int>* inliers, double* rms) {
    if (w.h_c - w.h_f < cfg.min_room_height) {
      if (rms) *rms = std::numeric_limits<double>::infinity();
      return -1;
    }
    const Eigen::Vector2d nrm(-w.u.y(), w.u.x());
    int cnt = 0;
    double acc = 0.0;
    for (int t = 0; t < m; ++t) {
      if (!valid[static_cast<std::size_t>(t)]) continue;
      const int j = cols[static_cast<std::size_t>(t)];
      const auto p = predict_rows(nrm, w.d, w.h_c, w.h_f, j, cam);
      if (!p.ok) continue;
      const double ec = std::abs(p.ceiling - bm.ceiling_row[static_cast<std::size_t>(j)]);
      const double ef = std::abs(p.floor - bm.floor_row[static_cast<std::size_t>(j)]);
      if (ec < cfg.inlier_threshold_px && ef < cfg.inlier_threshold_px) {
        ++cnt;
        acc += ec * ec + ef * ef;
        if (inliers) inliers->push_back(t);
      }
    }
    if (rms) *rms = cnt > 0 ? std::sqrt(acc / (2.0 * cnt))
                            : std::numeric_limits<double>::infinity();
    return cnt;
  };

  Rng rng = Rng::child(cfg.seed, stream);
  WallSolution best{};
  int best_cnt = -1;
  double best_rms = std::numeric_limits<double>::infinity();
  std::exception_ptr last_error;

  // Every root of a solved system competes by reprojection. extract_wall's own
  // ranking (side-constraint RMS) can put the degenerate root first on a narrow
  // noisy bundle, and the height veto in score() only helps if the genuine root
  // is still on the table.
  auto consider = [&](const RaySet& rs) {
    std::vector<WallSolution> cands;
    try {
      cands = extract_wall_candidates(rs);
    } catch (const Error&) {
      last_error = std::current_exception();
      return;
    }
    for (const auto& sol : cands) {
      double rms = 0.0;
      const int cnt = score(sol, nullptr, &rms);
      if (cnt > best_cnt || (cnt == best_cnt && rms < best_rms)) {
        best = sol;
        best_cnt = cnt;
        best_rms = rms;
      }
    }
  };

  // Seed hypothesis: least squares over every usable column. Under moderate
  // contamination it lands close enough for the local optimization below to
  // walk to the consensus set even when every minimal sample degenerates.
  {
    RaySet all;
    for (int t = 0; t < m; ++t) {
      if (!valid[static_cast<std::size_t>(t)]) continue;
      all.ceiling.push_back(cray[static_cast<std::size_t>(t)]);
      all.floor.push_back(fray[static_cast<std::size_t>(t)]);
    }
    consider(all);
  }
  std::vector<int> sample(static_cast<std::size_t>(cfg.sample_size));
  for (int it = 0; it < n_iter; ++it) {
    // Stratified draw: one column per equal-width bin of the segment. Clustered
    // samples leave the wall direction unconstrained under pixel noise, so an
    // all-inlier draw would still yield a useless hypothesis; spreading the
    // sample keeps the baseline wide.
    for (int a = 0; a < cfg.sample_size; ++a) {
      const int b0 = (a * m) / cfg.sample_size;
      const int b1 = ((a + 1) * m) / cfg.sample_size;
      int pick = -1;
      for (int tries = 0; tries < 64 && pick < 0; ++tries) {
        const int cand = b0 + rng.uniform_int(0, b1 - b0 - 1);
        if (valid[static_cast<std::size_t>(cand)]) pick = cand;
      }
      for (int cand = b0; cand < b1 && pick < 0; ++cand)
        if (valid[static_cast<std::size_t>(cand)]) pick = cand;
      for (int cand = 0; cand < m && pick < 0; ++cand) {  // bin fully invalid
        bool dup = !valid[static_cast<std::size_t>(cand)];
        for (int b = 0; b < a && !dup; ++b) dup = sample[static_cast<std::size_t>(b)] == cand;
        if (!dup) pick = cand;
      }
      sample[static_cast<std::size_t>(a)] = pick;
    }
    RaySet rs;
    for (int a = 0; a < cfg.sample_size; ++a) {
      rs.ceiling.push_back(cray[static_cast<std::size_t>(sample[static_cast<std::size_t>(a)])]);
      rs.floor.push_back(fray[static_cast<std::size_t>(sample[static_cast<std::size_t>(a)])]);
    }
    consider(rs);
  }
  if (best_cnt < 0) {
    if (last_error) std::rethrow_exception(last_error);
    fail(Err::NoConsensus, "no hypothesis could be formed");
  }

  // Local optimization: refit on the inlier set and rescore until the consensus
  // stops growing. A minimal sample under pixel noise lands near the wall but
  // tilted; each round recovers most of the columns the previous fit missed.
  std::vector<int> in_refit;
  double rms_ignored = 0.0;
  score(best, &in_refit, &rms_ignored);
  WallSolution refit = best;
  for (int round = 0; round < 8; ++round) {
    RaySet rs;
    for (int t : in_refit) {
      rs.ceiling.push_back(cray[static_cast<std::size_t>(t)]);
      rs.floor.push_back(fray[static_cast<std::size_t>(t)]);
    }
    std::vector<WallSolution> cands;
    try {
      cands = extract_wall_candidates(rs);
    } catch (const Error&) {
      break;
    }
    WallSolution next{};
    std::vector<int> in_next;
    int cnt_next = -1;
    for (const auto& c : cands) {
      std::vector<int> in_c;
      const int cnt_c = score(c, &in_c, &rms_ignored);
      if (cnt_c > cnt_next) {
        cnt_next = cnt_c;
        next = c;
        in_next = std::move(in_c);
      }
    }
    if (cnt_next <= static_cast<int>(in_refit.size())) break;  // never lose consensus
    refit = next;
    in_refit = std::move(in_next);
  }
  // The consensus gate applies to the refined hypothesis: a minimal sample under
  // pixel noise often explains less than half the segment even when its inlier
  // set pins down the wall exactly.
  if (static_cast<double>(in_refit.size()) / n_valid < cfg.min_inlier_ratio)
    fail(Err::NoConsensus, "best hypothesis explains under " +
                               std::to_string(cfg.min_inlier_ratio) + " of the segment");
  FittedWall fw;
  fw.sol = refit;
  fw.seg = seg;
  for (int t : in_refit) fw.inlier_cols.push_back(cols[static_cast<std::size_t>(t)]);
  fw.inlier_ratio = static_cast<double>(fw.inlier_cols.size()) / n_valid;
  return fw;
}

}  // namespace

std::vector<FittedWall> ransac_fit_walls(const BoundaryMap& bm,
                                         const std::vector<Segment>& segments,
                                         const CameraModel& cam,
                                         const RansacConfig& cfg) {
  if (!bm.consistent() || bm.cols() != cam.cols)
    fail(Err::BadInput, "boundary map does not match the camera");
  if (cfg.sample_size < 3)
    fail(Err::DegenerateConfig, "wall fitting needs at least 3 sampled columns");
  if (!(cfg.inlier_threshold_px > 0.0))
    fail(Err::DegenerateConfig, "inlier threshold must be positive");
  if (!(cfg.min_inlier_ratio >= 0.0 && cfg.min_inlier_ratio <= 1.0))
    fail(Err::DegenerateConfig, "minimum inlier ratio must lie in [0,1]");
  if (segments.empty()) fail(Err::DegenerateConfig, "no segments to fit");
  for (const auto& s : segments)
    if (s.count < cfg.sample_size)
      fail(Err::DegenerateConfig, "segment shorter than the sample size");
  const int n_iter = std::max(1, static_cast<int>(std::ceil(required_hypotheses(cfg))));

  std::vector<FittedWall> out(segments.size());
  std::vector<std::exception_ptr> errors(segments.size());
  parallel_for(segments.size(), [&](std::size_t si) {
    try {
      out[si] = fit_segment(bm, segments[si], cam, cfg, n_iter,
                            static_cast<std::uint64_t>(si));
    } catch (...) {
      errors[si] = std::current_exception();
    }
  });
  for (const auto& e : errors)  // deterministic: lowest segment index wins
    if (e) std::rethrow_exception(e);
  return out;
}

DirectionClustering cluster_directions(const std::vector<Eigen::Vector2d>& directions) {
  if (directions.empty()) fail(Err::DegenerateConfig, "no directions to cluster");
  std::vector<double> theta(directions.size());
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    theta[i] = std::atan2(directions[i].y(), directions[i].x());
    s += std::sin(4.0 * theta[i]);
    c += std::cos(4.0 * theta[i]);
  }
  DirectionClustering r;
  r.axis_azimuth = 0.25 * std::atan2(s, c);
  const auto dist_mod_pi = [](double a, double b) {
    const double d = std::fmod(std::abs(a - b), kPi);
    return std::min(d, kPi - d);
  };
  r.labels.resize(directions.size());
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const double d0 = dist_mod_pi(theta[i], r.axis_azimuth);
    const double d1 = dist_mod_pi(theta[i], r.axis_azimuth + kHalfPi);
    r.labels[i] = d1 < d0 ? 1 : 0;  // exact tie stays on the axis class
  }
  return r;
}

OcclusionPlan handle_occlusions_manhattan(const std::vector<Wall>& walls,
                                          const std::vector<int>& labels,
                                          const std::vector<double>& corner_azimuth) {
  const int m = static_cast<int>(walls.size());
  if (m < 2 || static_cast<int>(labels.size()) != m ||
      static_cast<int>(corner_azimuth.size()) != m)
    fail(Err::DegenerateConfig, "walls, labels and corner azimuths must align");
  constexpr double kFree = std::numeric_limits<double>::quiet_NaN();
  OcclusionPlan plan;
  for (int i = 0; i < m; ++i) {
    const int prev = imod(i - 1, m);
    const Wall& a = walls[static_cast<std::size_t>(prev)];
    const Wall& b = walls[static_cast<std::size_t>(i)];
    const double az = corner_azimuth[static_cast<std::size_t>(prev)];
    if (labels[static_cast<std::size_t>(prev)] != labels[static_cast<std::size_t>(i)]) {
      plan.corners.push_back(intersect_wall_planes(a, b));
      plan.corner_tie_azimuth.push_back(kFree);
    } else {
      // A perpendicular wall hides between two same-label walls. It passes
      // through the nearer wall's point on the corner radial (the apparent
      // corner); its meet with the farther wall is the hidden corner.
      const auto sa = radial_hit(a, az), sb = radial_hit(b, az);
      bool a_near = true;
      double s_near = 1.0;
      if (sa && sb) {
        a_near = *sa <= *sb;
        s_near = a_near ? *sa : *sb;
      } else if (sa) {
        s_near = *sa;
      } else if (sb) {
        a_near = false;
        s_near = *sb;
      } else {
        a_near = a.d <= b.d;
        s_near = std::max(a_near ? a.d : b.d, 1e-6);
      }
      const Eigen::Vector2d q_near = s_near * Eigen::Vector2d(std::cos(az), std::sin(az));
      Wall ins;
      ins.u = wall_normal(a_near ? a : b);
      ins.occluded = true;
      double d_ins = wall_normal(ins).dot(q_near);
      if (d_ins < 0.0) {
        ins.u = -ins.u;
        d_ins = -d_ins;
      }
      ins.d = d_ins;
      const Eigen::Vector2d q_far = intersect_wall_planes(ins, a_near ? b : a);
      if (a_near) {
        plan.corners.push_back(q_near);
        plan.corner_tie_azimuth.push_back(az);
        plan.wall_occluded.push_back(true);
        plan.wall_source.push_back(-1);
        plan.corners.push_back(q_far);
        plan.corner_tie_azimuth.push_back(kFree);
      } else {
        plan.corners.push_back(q_far);
        plan.corner_tie_azimuth.push_back(kFree);
        plan.wall_occluded.push_back(true);
        plan.wall_source.push_back(-1);
        plan.corners.push_back(q_near);
        plan.corner_tie_azimuth.push_back(az);
      }
    }
    plan.wall_occluded.push_back(b.occluded);
    plan.wall_source.push_back(i);
  }
  return plan;
}

OcclusionPlan handle_occlusions_atlanta(const std::vector<Wall>& walls,
                                        const std::vector<PluckerRay>& corner_rays,
                                        const std::vector<double>& corner_azimuth,
                                        double h_c, double gap_threshold) {
  const int m = static_cast<int>(walls.size());
  if (m < 2 || static_cast<int>(corner_rays.size()) != m ||
      static_cast<int>(corner_azimuth.size()) != m)
    fail(Err::DegenerateConfig, "walls, rays and corner azimuths must align");
  if (!(gap_threshold >= 0.0)) fail(Err::DegenerateConfig, "gap threshold must be >= 0");
  constexpr double kFree = std::numeric_limits<double>::quiet_NaN();
  OcclusionPlan plan;
  for (int i = 0; i < m; ++i) {
    const int prev = imod(i - 1, m);
    const Wall& a = walls[static_cast<std::size_t>(prev)];
    const Wall& b = walls[static_cast<std::size_t>(i)];
    const double az = corner_azimuth[static_cast<std::size_t>(prev)];
    const PluckerRay& ray = corner_rays[static_cast<std::size_t>(prev)];

    Eigen::Vector3d pa = Eigen::Vector3d::Zero(), pb = Eigen::Vector3d::Zero();
    bool have_points = true;
    try {
      pa = closest_point_on_line_to_ray(wall_line(a, h_c), ray);
      pb = closest_point_on_line_to_ray(wall_line(b, h_c), ray);
    } catch (const Error&) {
      have_points = false;
    }

    bool split = have_points && (pa - pb).norm() > gap_threshold;
    if (split) {
      const auto sa = radial_hit(a, az), sb = radial_hit(b, az);
      if (sa && sb) {
        // The inserted wall is the corner's radial plane itself: it contains
        // the projecting rays, and both new corners sit on the radial.
        const Eigen::Vector2d v(std::cos(az), std::sin(az));
        plan.corners.push_back(*sa * v);
        plan.corner_tie_azimuth.push_back(az);
        plan.wall_occluded.push_back(true);
        plan.wall_source.push_back(-1);
        plan.corners.push_back(*sb * v);
        plan.corner_tie_azimuth.push_back(az);
      } else {
        split = false;
      }
    }
    if (!split) {
      Eigen::Vector2d corner;
      if (have_points) {
        corner = 0.5 * (pa.head<2>() + pb.head<2>());
      } else {
        try {
          corner = intersect_wall_planes(a, b);
        } catch (const Error&) {
          corner = 0.5 * (a.d * wall_normal(a) + b.d * wall_normal(b));
        }
      }
      plan.corners.push_back(corner);
      plan.corner_tie_azimuth.push_back(kFree);
    }
    plan.wall_occluded.push_back(b.occluded);
    plan.wall_source.push_back(i);
  }
  return plan;
}

namespace {

// Geometry state the adjustment parameter vector maps to.
struct AdjustState {
  std::vector<Eigen::Vector2d> normal;
  std::vector<double> d;
  double h_c = 0.0;
  double h_f = 0.0;
};

class AdjustProblem {
 public:
  AdjustProblem(const Layout& init, World world,
                const std::vector<std::vector<int>>& wall_cols,
                const std::vector<double>& ties, const BoundaryMap& bm,
                const CameraModel& cam, double mu)
      : world_(world), wall_cols_(wall_cols), ties_(ties), bm_(bm), cam_(cam), mu_(mu) {
    n_ = static_cast<int>(init.walls.size());
    base_angle_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      const auto& u = init.walls[static_cast<std::size_t>(i)].u;
      base_angle_[static_cast<std::size_t>(i)] = std::atan2(u.y(), u.x());
    }
    n_angles_ = world == World::manhattan ? 1 : n_;
    n_params_ = n_angles_ + n_ + 2;
    n_cols_ = 0;
    for (const auto& c : wall_cols) n_cols_ += static_cast<int>(c.size());
    n_ties_ = 0;
    for (double t : ties)
      if (std::isfinite(t)) ++n_ties_;
  }

  int n_params() const { return n_params_; }

  Eigen::VectorXd initial_params(const Layout& init) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n_params_);
    for (int i = 0; i < n_; ++i)
      p[n_angles_ + i] = init.walls[static_cast<std::size_t>(i)].d;
    p[n_params_ - 2] = init.h_c;
    p[n_params_ - 1] = init.h_f;
    return p;
  }

  AdjustState state(const Eigen::VectorXd& p) const {
    AdjustState st;
    st.normal.resize(static_cast<std::size_t>(n_));
    st.d.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      const double ang =
          base_angle_[static_cast<std::size_t>(i)] + (world_ == World::manhattan ? p[0] : p[i]);
      st.normal[static_cast<std::size_t>(i)] = {-std::sin(ang), std::cos(ang)};
      st.d[static_cast<std::size_t>(i)] = p[n_angles_ + i];
    }
    st.h_c = p[n_params_ - 2];
    st.h_f = p[n_params_ - 1];
    return st;
  }

  // Corner k = meet of wall planes k-1 and k. False on a parallel adjacency.
  bool corners_of(const AdjustState& st, std::vector<Eigen::Vector2d>* out) const {
    out->resize(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) {
      const int prev = imod(k - 1, n_);
      const Eigen::Vector2d& na = st.normal[static_cast<std::size_t>(prev)];
      const Eigen::Vector2d& nb = st.normal[static_cast<std::size_t>(k)];
      const double det = na.x() * nb.y() - na.y() * nb.x();
      if (std::abs(det) < 1e-9) return false;
      const double da = st.d[static_cast<std::size_t>(prev)];
      const double db = st.d[static_cast<std::size_t>(k)];
      (*out)[static_cast<std::size_t>(k)] = {(da * nb.y() - db * na.y()) / det,
                                             (na.x() * db - nb.x() * da) / det};
    }
    return true;
  }

  bool residuals(const Eigen::VectorXd& p, Eigen::VectorXd* r) const {
    r->resize(2 * n_cols_ + n_ties_);
    const AdjustState st = state(p);
    int idx = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j : wall_cols_[static_cast<std::size_t>(i)]) {
        const auto pred = predict_rows(st.normal[static_cast<std::size_t>(i)],
                                       st.d[static_cast<std::size_t>(i)], st.h_c, st.h_f,
                                       j, cam_);
        if (pred.ok) {
          (*r)[idx++] = pred.ceiling - bm_.ceiling_row[static_cast<std::size_t>(j)];
          (*r)[idx++] = pred.floor - bm_.floor_row[static_cast<std::size_t>(j)];
        } else {
          (*r)[idx++] = kUnprojectable;
          (*r)[idx++] = kUnprojectable;
        }
      }
    }
    std::vector<Eigen::Vector2d> cs;
    if (!corners_of(st, &cs)) return false;
    for (int k = 0; k < n_; ++k) {
      const double az = ties_[static_cast<std::size_t>(k)];
      if (!std::isfinite(az)) continue;
      const Eigen::Vector2d n_az(-std::sin(az), std::cos(az));
      (*r)[idx++] = mu_ * cs[static_cast<std::size_t>(k)].dot(n_az);
    }
    return true;
  }

 private:
  World world_;
  const std::vector<std::vector<int>>& wall_cols_;
  const std::vector<double>& ties_;
  const BoundaryMap& bm_;
  const CameraModel& cam_;
  double mu_;
  int n_ = 0, n_angles_ = 0, n_params_ = 0, n_cols_ = 0, n_ties_ = 0;
  std::vector<double> base_angle_;
};

}  // namespace

Layout final_adjustment(const Layout& initial, World world,
                        const std::vector<std::vector<int>>& wall_cols,
                        const std::vector<double>& corner_tie_azimuth,
                        const BoundaryMap& bm, const CameraModel& cam,
                        const AdjustConfig& cfg, AdjustReport* report) {
  const int n = static_cast<int>(initial.walls.size());
  if (n < 3 || static_cast<int>(wall_cols.size()) != n ||
      static_cast<int>(corner_tie_azimuth.size()) != n ||
      static_cast<int>(initial.corners.size()) != n)
    fail(Err::DegenerateConfig, "layout, supports and ties must align");
  if (!bm.consistent() || bm.cols() != cam.cols)
    fail(Err::BadInput, "boundary map does not match the camera");

  AdjustReport rep;
  const AdjustProblem prob(initial, world, wall_cols, corner_tie_azimuth, bm, cam,
                           cfg.corner_penalty);
  Eigen::VectorXd p = prob.initial_params(initial);
  Eigen::VectorXd r;
  if (!prob.residuals(p, &r)) {
    if (report) *report = rep;  // cannot even evaluate: hand back the input
    return initial;
  }
  double cost = r.squaredNorm();
  rep.initial_cost = rep.final_cost = cost;
  if (cost <= 1e-20) {  // already a zero-residual stationary point
    rep.converged = true;
    if (report) *report = rep;
    return initial;
  }

  const int np = prob.n_params();
  const int m = static_cast<int>(r.size());
  double lambda = 1e-3;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    rep.iterations = it;
    // Forward-difference Jacobian (backward when a step leaves the domain).
    Eigen::MatrixXd J(m, np);
    Eigen::VectorXd rh;
    for (int k = 0; k < np; ++k) {
      const double h = 1e-7 * (1.0 + std::abs(p[k]));
      Eigen::VectorXd ph = p;
      ph[k] += h;
      if (prob.residuals(ph, &rh)) {
        J.col(k) = (rh - r) / h;
        continue;
      }
      ph[k] = p[k] - h;
      if (prob.residuals(ph, &rh)) {
        J.col(k) = (r - rh) / h;
      } else {
        J.col(k).setZero();
      }
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < 1e-14) {
      rep.converged = true;
      break;
    }
    bool accepted = false;
    double rel = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::MatrixXd M = JtJ;
      M.diagonal() += lambda * JtJ.diagonal();
      M.diagonal().array() += 1e-15;
      const Eigen::VectorXd delta = M.ldlt().solve(-g);
      Eigen::VectorXd r2;
      const Eigen::VectorXd p2 = p + delta;
      if (prob.residuals(p2, &r2)) {
        const double cost2 = r2.squaredNorm();
        if (cost2 < cost) {
          rel = (cost - cost2) / cost;
          p = p2;
          r = r2;
          cost = cost2;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
    if (!accepted) {  // no descent step at any damping: stationary
      rep.converged = true;
      break;
    }
    if (rel < cfg.rel_tol) {
      rep.converged = true;
      break;
    }
  }
  rep.final_cost = cost;

  const AdjustState st = prob.state(p);
  std::vector<Eigen::Vector2d> corners;
  if (!prob.corners_of(st, &corners)) {
    rep.converged = false;
    if (report) *report = rep;
    return initial;
  }
  Layout out = layout_from_corners(corners, st.h_c, st.h_f);
  for (int i = 0; i < n; ++i)
    out.walls[static_cast<std::size_t>(i)].occluded =
        initial.walls[static_cast<std::size_t>(i)].occluded;
  std::string why;
  if (!layout_is_valid(out, &why)) {
    rep.converged = false;
    if (report) *report = rep;
    return initial;  // refuse to return a broken polygon
  }
  if (report) *report = rep;
  return out;
}

namespace {

double ms_between(std::chrono::steady_clock::time_point a,
                  std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    // what() already leads with the code name; drop it before re-wrapping so the
    // final message reads "<Code>: <stage>: <reason>".
    std::string msg = e.what();
    const std::string lead = std::string(to_string(e.code())) + ": ";
    if (msg.rfind(lead, 0) == 0) msg = msg.substr(lead.size());
    fail(e.code(), std::string(name) + ": " + msg);
  }
}

}  // namespace

Layout recover_layout(const BoundaryMap& bm, const CameraModel& cam, World world,
                      const RecoverConfig& cfg, RecoverStats* stats) {
  if (!bm.consistent() || bm.cols() != cam.cols)
    fail(Err::BadInput, "boundary map does not match the camera");
  for (int j = 0; j < bm.cols(); ++j)
    if (!(bm.ceiling_row[static_cast<std::size_t>(j)] >
          bm.floor_row[static_cast<std::size_t>(j)]))
      fail(Err::BadInput, "ceiling row must stay above the floor row in every column");
  if (!cam.full_turn())
    fail(Err::DegenerateConfig, "layout recovery needs the full azimuth turn");

  using clock = std::chrono::steady_clock;
  RecoverStats local;
  RecoverStats& st = stats ? *stats : local;
  st = RecoverStats{};

  auto t0 = clock::now();
  const auto segments = stage("segment_walls", [&] { return segment_walls(bm, true); });
  auto t1 = clock::now();
  st.segment_ms = ms_between(t0, t1);

  const auto fitted =
      stage("ransac_fit_walls", [&] { return ransac_fit_walls(bm, segments, cam, cfg.ransac); });
  auto t2 = clock::now();
  st.ransac_ms = ms_between(t1, t2);
  const int m = static_cast<int>(fitted.size());
  st.inlier_ratio.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    st.inlier_ratio[static_cast<std::size_t>(i)] = fitted[static_cast<std::size_t>(i)].inlier_ratio;

  // Inlier rays per wall; adjacency i joins walls i and i+1 at the peak that
  // starts segment i+1.
  std::vector<RaySet> rays(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j : fitted[static_cast<std::size_t>(i)].inlier_cols) {
      rays[static_cast<std::size_t>(i)].ceiling.push_back(
          cam.backproject_pixel({bm.ceiling_row[static_cast<std::size_t>(j)], j + 0.5}));
      rays[static_cast<std::size_t>(i)].floor.push_back(
          cam.backproject_pixel({bm.floor_row[static_cast<std::size_t>(j)], j + 0.5}));
    }
  std::vector<int> adj_col(static_cast<std::size_t>(m));
  std::vector<double> adj_az(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    adj_col[static_cast<std::size_t>(i)] = segments[static_cast<std::size_t>((i + 1) % m)].begin;
    adj_az[static_cast<std::size_t>(i)] =
        cam.col_center_azimuth(adj_col[static_cast<std::size_t>(i)]);
  }

  OcclusionPlan plan;
  double h_c = 0.0, h_f = 0.0;
  auto t3 = t2;
  if (world == World::manhattan) {
    std::vector<Eigen::Vector2d> dirs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) dirs[static_cast<std::size_t>(i)] = fitted[static_cast<std::size_t>(i)].sol.u;
    const auto clus = stage("cluster_directions", [&] { return cluster_directions(dirs); });
    const auto sol =
        stage("solve_manhattan", [&] { return solve_manhattan(rays, clus.labels); });
    h_c = sol.h_c;
    h_f = sol.h_f;
    t3 = clock::now();
    st.solve_ms = ms_between(t2, t3);
    plan = stage("handle_occlusions", [&] {
      return handle_occlusions_manhattan(sol.walls(), clus.labels, adj_az);
    });
  } else {
    std::vector<Eigen::Vector2d> dirs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) dirs[static_cast<std::size_t>(i)] = fitted[static_cast<std::size_t>(i)].sol.u;
    const auto sol = stage("solve_atlanta", [&] { return solve_atlanta(rays, dirs); });
    h_c = sol.h_c;
    h_f = sol.h_f;
    t3 = clock::now();
    st.solve_ms = ms_between(t2, t3);
    std::vector<PluckerRay> corner_rays(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const int col = adj_col[static_cast<std::size_t>(i)];
      corner_rays[static_cast<std::size_t>(i)] = cam.backproject_pixel(
          {bm.ceiling_row[static_cast<std::size_t>(col)], col + 0.5});
    }
    plan = stage("handle_occlusions", [&] {
      return handle_occlusions_atlanta(sol.walls_out, corner_rays, adj_az, h_c,
                                       cfg.gap_threshold_m);
    });
  }
  auto t4 = clock::now();
  st.occlusion_ms = ms_between(t3, t4);

  Layout layout = stage("assemble", [&] {
    Layout l = layout_from_corners(plan.corners, h_c, h_f);
    for (std::size_t k = 0; k < l.walls.size(); ++k)
      l.walls[k].occluded = plan.wall_occluded[k];
    std::string why;
    if (!layout_is_valid(l, &why))
      fail(Err::DegenerateConfig, "recovered polygon is invalid: " + why);
    return l;
  });

  if (cfg.run_adjustment) {
    std::vector<std::vector<int>> wall_cols(layout.walls.size());
    for (std::size_t k = 0; k < layout.walls.size(); ++k) {
      const int src = plan.wall_source[k];
      if (src >= 0) wall_cols[k] = fitted[static_cast<std::size_t>(src)].inlier_cols;
    }
    layout = stage("final_adjustment", [&] {
      return final_adjustment(layout, world, wall_cols, plan.corner_tie_azimuth, bm, cam,
                              cfg.adjust, &st.adjust);
    });
    st.adjust_ms = ms_between(t4, clock::now());
  }
  return layout;
}

}  // namespace ncl
