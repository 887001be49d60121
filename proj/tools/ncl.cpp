// Command-line front end: synth | project | solve | eval | sweep.
//
// Exit codes: 0 success, 1 geometric/pipeline failure, 2 malformed input
// (bad arguments, unreadable or invalid files). Angle-valued flags take
// radians, or degrees with an explicit "deg" suffix ("--phi=-90deg..90deg").
// Range-valued flags use "lo..hi". NCL_THREADS caps worker threads.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ncl/boundary.hpp"
#include "ncl/camera.hpp"
#include "ncl/error.hpp"
#include "ncl/io.hpp"
#include "ncl/metrics.hpp"
#include "ncl/parallel.hpp"
#include "ncl/pipeline.hpp"
#include "ncl/rng.hpp"
#include "ncl/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace ncl;

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

[[noreturn]] void bad_flag(const std::string& what) { fail(Err::BadInput, what); }

double parse_scalar(std::string tok, const std::string& flag) {
  bool deg = false;
  if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "deg") == 0) {
    deg = true;
    tok.resize(tok.size() - 3);
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return deg ? v * kDegToRad : v;
  } catch (const std::exception&) {
    bad_flag(flag + ": cannot parse number '" + tok + "'");
  }
}

std::pair<double, double> parse_range(const std::string& tok, const std::string& flag) {
  const auto dots = tok.find("..");
  if (dots == std::string::npos || dots == 0 || dots + 2 >= tok.size())
    bad_flag(flag + ": expected 'lo..hi', got '" + tok + "'");
  const double lo = parse_scalar(tok.substr(0, dots), flag);
  const double hi = parse_scalar(tok.substr(dots + 2), flag);
  if (hi < lo) bad_flag(flag + ": range is reversed");
  return {lo, hi};
}

std::pair<int, int> parse_int_range(const std::string& tok, const std::string& flag) {
  const auto [lo, hi] = parse_range(tok, flag);
  if (lo != std::floor(lo) || hi != std::floor(hi))
    bad_flag(flag + ": expected integers");
  return {static_cast<int>(lo), static_cast<int>(hi)};
}

World parse_world(const std::string& w) {
  if (w == "manhattan") return World::manhattan;
  if (w == "atlanta") return World::atlanta;
  bad_flag("--world must be 'manhattan' or 'atlanta', got '" + w + "'");
}

const char* world_name(World w) {
  return w == World::manhattan ? "manhattan" : "atlanta";
}

std::string room_id(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "room_%03d", i);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoFailure, "cannot open for writing: " + path.string());
  out << text;
  if (!out) fail(Err::IoFailure, "write failed: " + path.string());
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

ordered_json load_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoFailure, "cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Err::BadInput, "malformed JSON: " + path.string());
  return j;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// synth

struct SynthOpts {
  std::string out;
  int rooms = 20;
  std::uint64_t seed = 1;
  double atlanta_prob = 0.0;
  std::string walls = "4..14";
  std::string side = "3..8.5";
  std::string hc = "0.8..2.2";
  std::string hf = "-2.2..-0.8";
  double clip_prob = 0.6;
  std::string wall_dist = "1..8";
  double rc = 1.0;
  int rows = 512;
  int cols = 1024;
  std::string phi = "-90deg..90deg";
  std::string varphi = "-180deg..180deg";
  double sigma = 0.0;
  double spike_rate = 0.0;
  double spike_mag = 30.0;
};

int run_synth(const SynthOpts& o) {
  if (o.rooms < 1) bad_flag("--rooms must be >= 1");
  if (o.atlanta_prob < 0.0 || o.atlanta_prob > 1.0)
    bad_flag("--atlanta-prob must be in [0, 1]");

  CameraModel cam;
  cam.rc = o.rc;
  cam.rows = o.rows;
  cam.cols = o.cols;
  std::tie(cam.phi_min, cam.phi_max) = parse_range(o.phi, "--phi");
  std::tie(cam.varphi_min, cam.varphi_max) = parse_range(o.varphi, "--varphi");

  LayoutSpec base;
  std::tie(base.min_walls, base.max_walls) = parse_int_range(o.walls, "--walls");
  std::tie(base.min_side, base.max_side) = parse_range(o.side, "--side");
  std::tie(base.hc_min, base.hc_max) = parse_range(o.hc, "--hc");
  std::tie(base.hf_min, base.hf_max) = parse_range(o.hf, "--hf");
  std::tie(base.min_wall_dist, base.max_wall_dist) = parse_range(o.wall_dist, "--wall-dist");
  base.clip_prob = o.clip_prob;
  base.rc = cam.rc;

  const fs::path out_dir(o.out);
  fs::create_directories(out_dir);
  write_camera_json(out_dir / "camera.json", cam);

  Rng world_rng(o.seed);
  ordered_json rooms = ordered_json::array();
  int n_atlanta = 0;
  for (int i = 0; i < o.rooms; ++i) {
    const World world =
        world_rng.bernoulli(o.atlanta_prob) ? World::atlanta : World::manhattan;
    if (world == World::atlanta) ++n_atlanta;

    Rng streams = Rng::child(o.seed, static_cast<std::uint64_t>(i));
    LayoutSpec spec = base;
    spec.world = world;
    spec.seed = streams.next_u64();
    const std::uint64_t noise_seed = streams.next_u64();

    const Layout layout = generate_layout(spec);
    BoundaryMap bm = project_layout(layout, cam);
    if (o.sigma > 0.0 || o.spike_rate > 0.0) {
      NoiseSpec noise;
      noise.sigma_px = o.sigma;
      noise.spike_rate = o.spike_rate;
      noise.spike_mag_px = o.spike_mag;
      noise.seed = noise_seed;
      bm = add_noise(bm, noise, cam.rows);
    }

    const std::string id = room_id(i);
    const fs::path dir = out_dir / id;
    fs::create_directories(dir);
    write_layout_json(dir / "layout.json", layout);
    write_boundaries_csv(dir / "boundaries.csv", bm);

    ordered_json r;
    r["id"] = id;
    r["world"] = world_name(world);
    r["seed"] = spec.seed;
    r["walls"] = static_cast<int>(layout.walls.size());
    r["layout"] = id + "/layout.json";
    r["boundaries"] = id + "/boundaries.csv";
    rooms.push_back(std::move(r));
  }

  // Deterministic contiguous splits by room index, 1677:399:499 proportions.
  const int n_train = static_cast<int>(std::floor(o.rooms * 1677.0 / 2575.0));
  const int n_trval = static_cast<int>(std::floor(o.rooms * 2076.0 / 2575.0));
  for (int i = 0; i < o.rooms; ++i)
    rooms[static_cast<std::size_t>(i)]["split"] =
        i < n_train ? "train" : (i < n_trval ? "val" : "test");

  ordered_json m;
  m["tool_version"] = NCL_VERSION;
  m["command"] = "synth";
  ordered_json cfg;
  cfg["rooms"] = o.rooms;
  cfg["seed"] = o.seed;
  cfg["atlanta_prob"] = o.atlanta_prob;
  cfg["walls"] = o.walls;
  cfg["side"] = o.side;
  cfg["hc"] = o.hc;
  cfg["hf"] = o.hf;
  cfg["clip_prob"] = o.clip_prob;
  cfg["wall_dist"] = o.wall_dist;
  cfg["rc"] = o.rc;
  cfg["rows"] = o.rows;
  cfg["cols"] = o.cols;
  cfg["phi"] = o.phi;
  cfg["varphi"] = o.varphi;
  cfg["sigma"] = o.sigma;
  cfg["spike_rate"] = o.spike_rate;
  cfg["spike_mag"] = o.spike_mag;
  m["config"] = std::move(cfg);
  m["camera"] = "camera.json";
  m["split_ratios"] = {{"train", 1677.0 / 2575.0},
                       {"val", 399.0 / 2575.0},
                       {"test", 499.0 / 2575.0}};
  m["rooms"] = std::move(rooms);
  write_json_file(out_dir / "manifest.json", m);

  std::cout << "wrote " << o.rooms << " rooms (" << (o.rooms - n_atlanta)
            << " manhattan, " << n_atlanta << " atlanta) to " << out_dir.string()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// project

int run_project(const std::string& layout_path, const std::string& camera_path,
                const std::string& out_path) {
  const Layout layout = read_layout_json(layout_path);
  const CameraModel cam = read_camera_json(camera_path);
  const BoundaryMap bm = project_layout(layout, cam);
  write_boundaries_csv(out_path, bm);
  std::cout << "projected " << layout.walls.size() << " walls into " << bm.cols()
            << " columns -> " << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOpts {
  std::string boundaries;
  std::string camera;
  std::string world = "manhattan";
  std::string out;
  std::string manifest;  // empty = alongside --out
  std::uint64_t seed = 0;
  double confidence = 0.9999;
  double outlier_rate = 0.2;
  int sample_size = 3;
  double inlier_threshold = 1.5;
  double min_inlier_ratio = 0.5;
  double gap_threshold = 0.05;
  double corner_penalty = 10.0;
  int adjust_iters = 100;
  bool no_adjust = false;
};

RecoverConfig recover_config(const SolveOpts& o) {
  RecoverConfig cfg;
  cfg.ransac.confidence = o.confidence;
  cfg.ransac.outlier_rate = o.outlier_rate;
  cfg.ransac.sample_size = o.sample_size;
  cfg.ransac.inlier_threshold_px = o.inlier_threshold;
  cfg.ransac.min_inlier_ratio = o.min_inlier_ratio;
  cfg.ransac.seed = o.seed;
  cfg.gap_threshold_m = o.gap_threshold;
  cfg.adjust.corner_penalty = o.corner_penalty;
  cfg.adjust.max_iterations = o.adjust_iters;
  cfg.run_adjustment = !o.no_adjust;
  return cfg;
}

ordered_json config_json(const SolveOpts& o) {
  ordered_json c;
  c["world"] = o.world;
  c["seed"] = o.seed;
  c["confidence"] = o.confidence;
  c["outlier_rate"] = o.outlier_rate;
  c["sample_size"] = o.sample_size;
  c["inlier_threshold_px"] = o.inlier_threshold;
  c["min_inlier_ratio"] = o.min_inlier_ratio;
  c["gap_threshold_m"] = o.gap_threshold;
  c["corner_penalty"] = o.corner_penalty;
  c["adjust_iterations"] = o.adjust_iters;
  c["run_adjustment"] = !o.no_adjust;
  return c;
}

int run_solve(const SolveOpts& o) {
  const World world = parse_world(o.world);
  const BoundaryMap bm = read_boundaries_csv(o.boundaries);
  const CameraModel cam = read_camera_json(o.camera);

  const auto t0 = std::chrono::steady_clock::now();
  RecoverStats stats;
  const Layout layout = recover_layout(bm, cam, world, recover_config(o), &stats);
  const double total_ms = ms_since(t0);

  write_layout_json(o.out, layout);

  ordered_json m;
  m["tool_version"] = NCL_VERSION;
  m["command"] = "solve";
  m["config"] = config_json(o);
  m["inputs"] = {{"boundaries", o.boundaries}, {"camera", o.camera}};
  m["outputs"] = {{"layout", o.out}};
  m["timing_ms"] = {{"segment", stats.segment_ms}, {"ransac", stats.ransac_ms},
                    {"solve", stats.solve_ms},     {"occlusion", stats.occlusion_ms},
                    {"adjust", stats.adjust_ms},   {"total", total_ms}};
  m["inlier_ratio"] = stats.inlier_ratio;
  m["adjustment"] = {{"iterations", stats.adjust.iterations},
                     {"initial_cost", stats.adjust.initial_cost},
                     {"final_cost", stats.adjust.final_cost},
                     {"converged", stats.adjust.converged}};
  const fs::path mpath = o.manifest.empty()
                             ? fs::path(o.out).parent_path() / "run_manifest.json"
                             : fs::path(o.manifest);
  write_json_file(mpath, m);

  int occluded = 0;
  for (const auto& w : layout.walls) occluded += w.occluded ? 1 : 0;
  char line[256];
  std::snprintf(line, sizeof line,
                "recovered %d walls (%d occluded), h_c=%.4f m, h_f=%.4f m in %.1f ms",
                static_cast<int>(layout.walls.size()), occluded, layout.h_c,
                layout.h_f, total_ms);
  std::cout << line << " -> " << o.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string pred;
  std::string gt;
  std::string out;
  std::string csv;         // optional: append a row
  std::string pred_camera; // optional pair: mismatch check
  std::string gt_camera;
};

int run_eval(const EvalOpts& o) {
  const Layout pred = read_layout_json(o.pred);
  const Layout gt = read_layout_json(o.gt);

  std::string warning;
  if (!o.pred_camera.empty() && !o.gt_camera.empty()) {
    const CameraModel a = read_camera_json(o.pred_camera);
    const CameraModel b = read_camera_json(o.gt_camera);
    if (!(a == b))
      warning = "camera models differ between prediction and ground truth";
  }

  const EvalReport r = evaluate(pred, gt);
  write_eval_json(o.out, r, warning);

  if (!o.csv.empty()) {
    const bool fresh = !fs::exists(o.csv) || fs::file_size(o.csv) == 0;
    std::ofstream out(o.csv, std::ios::binary | std::ios::app);
    if (!out) fail(Err::IoFailure, "cannot open for appending: " + o.csv);
    if (fresh)
      out << "pred,gt,ce_m,cen_pct,corner_count_mismatch,iou2d_pct,iou3d_pct,"
             "dir_err_deg,depth_err_m,scale_err_pct,wall_count_pred,wall_count_gt\n";
    out << o.pred << ',' << o.gt << ',' << fmt6(r.ce_m) << ',' << fmt6(r.cen_pct)
        << ',' << (r.corner_count_mismatch ? 1 : 0) << ',' << fmt6(r.iou2d_pct)
        << ',' << fmt6(r.iou3d_pct) << ',' << fmt6(r.dir_err_deg) << ','
        << fmt6(r.depth_err_m) << ',' << fmt6(r.scale_err_pct) << ','
        << r.wall_count_pred << ',' << r.wall_count_gt << '\n';
    if (!out) fail(Err::IoFailure, "append failed: " + o.csv);
  }

  char line[256];
  std::snprintf(line, sizeof line,
                "CE %.4f m (%.3f%%), IoU2D %.2f%%, IoU3D %.2f%%, dir %.4f deg, "
                "depth %.4f m, scale %.3f%%",
                r.ce_m, r.cen_pct, r.iou2d_pct, r.iou3d_pct, r.dir_err_deg,
                r.depth_err_m, r.scale_err_pct);
  std::cout << line << "\n";
  if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts {
  std::string corpus;
  std::string out = "sweep.csv";
  std::string medians;  // empty = derived from --out
  std::string svg;
  std::string sigmas = "0.1,0.25,0.5,1.0";
  int trials = 5;
  std::uint64_t seed = 0;
  double spike_rate = 0.0;
  double spike_mag = 30.0;
};

struct SweepTaskResult {
  bool ok = false;
  EvalReport rep;
};

std::vector<double> parse_sigma_list(const std::string& tok) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= tok.size()) {
    const auto comma = tok.find(',', pos);
    const std::string piece =
        tok.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (piece.empty()) bad_flag("--sigmas: empty element in '" + tok + "'");
    const double v = parse_scalar(piece, "--sigmas");
    if (v < 0.0) bad_flag("--sigmas: sigma must be >= 0");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) bad_flag("--sigmas: empty list");
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_sweep_svg(const fs::path& path, const std::vector<double>& sigmas,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& names);

int run_sweep(const SweepOpts& o) {
  if (o.trials < 1) bad_flag("--trials must be >= 1");
  const std::vector<double> sigmas = parse_sigma_list(o.sigmas);

  const fs::path corpus(o.corpus);
  const ordered_json manifest = load_json_file(corpus / "manifest.json");
  if (!manifest.contains("rooms") || !manifest["rooms"].is_array() ||
      manifest["rooms"].empty())
    fail(Err::BadInput, "corpus manifest has no rooms");
  const CameraModel cam =
      read_camera_json(corpus / manifest.value("camera", "camera.json"));

  struct Room {
    std::string id;
    World world;
    BoundaryMap bm;
    Layout gt;
  };
  std::vector<Room> rooms;
  for (const auto& r : manifest["rooms"]) {
    Room room;
    room.id = r.value("id", "");
    room.world = parse_world(r.value("world", ""));
    room.bm = read_boundaries_csv(corpus / r.value("boundaries", ""));
    room.gt = read_layout_json(corpus / r.value("layout", ""));
    rooms.push_back(std::move(room));
  }

  const std::size_t n_rooms = rooms.size();
  const std::size_t n_sigmas = sigmas.size();
  const std::size_t n_trials = static_cast<std::size_t>(o.trials);
  const std::size_t n_tasks = n_rooms * n_sigmas * n_trials;
  std::vector<SweepTaskResult> results(n_tasks);

  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(n_tasks, [&](std::size_t idx) {
    const std::size_t r = idx / (n_sigmas * n_trials);
    const std::size_t si = (idx / n_trials) % n_sigmas;
    const std::size_t t = idx % n_trials;

    Rng streams = Rng::child(o.seed, idx);
    NoiseSpec noise;
    noise.sigma_px = sigmas[si];
    noise.spike_rate = o.spike_rate;
    noise.spike_mag_px = o.spike_mag;
    noise.seed = streams.next_u64();

    RecoverConfig cfg;
    cfg.ransac.seed = streams.next_u64();

    try {
      const BoundaryMap noisy = add_noise(rooms[r].bm, noise, cam.rows);
      const Layout fit = recover_layout(noisy, cam, rooms[r].world, cfg);
      results[idx].rep = evaluate(fit, rooms[r].gt);
      results[idx].ok = true;
    } catch (const Error&) {
      results[idx].ok = false;  // recorded as a failed trial, not a crash
    }
    (void)t;
  });
  const double total_ms = ms_since(t0);

  // Long format, sigma-major for readability; order is schedule-independent.
  std::string csv =
      "sigma,room,trial,status,ce_m,cen_pct,iou2d_pct,iou3d_pct,dir_err_deg,"
      "depth_err_m,scale_err_pct\n";
  std::size_t n_failed_total = 0;
  for (std::size_t si = 0; si < n_sigmas; ++si)
    for (std::size_t r = 0; r < n_rooms; ++r)
      for (std::size_t t = 0; t < n_trials; ++t) {
        const auto& res = results[(r * n_sigmas + si) * n_trials + t];
        csv += fmt6(sigmas[si]) + "," + rooms[r].id + "," + std::to_string(t) + ",";
        if (res.ok) {
          const EvalReport& e = res.rep;
          csv += "ok," + fmt6(e.ce_m) + "," + fmt6(e.cen_pct) + "," +
                 fmt6(e.iou2d_pct) + "," + fmt6(e.iou3d_pct) + "," +
                 fmt6(e.dir_err_deg) + "," + fmt6(e.depth_err_m) + "," +
                 fmt6(e.scale_err_pct) + "\n";
        } else {
          csv += "failed,,,,,,,\n";
          ++n_failed_total;
        }
      }
  const fs::path out_path(o.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_text(out_path, csv);

  // Per-sigma medians over successful trials.
  const std::vector<std::string> metric_names = {
      "ce_m",        "cen_pct",     "iou2d_pct",    "iou3d_pct",
      "dir_err_deg", "depth_err_m", "scale_err_pct"};
  auto metric_value = [](const EvalReport& e, std::size_t k) {
    const double vals[] = {e.ce_m,        e.cen_pct,     e.iou2d_pct,    e.iou3d_pct,
                           e.dir_err_deg, e.depth_err_m, e.scale_err_pct};
    return vals[k];
  };
  std::string med_csv = "sigma,n,n_failed";
  for (const auto& name : metric_names) med_csv += "," + name;
  med_csv += "\n";
  std::vector<std::vector<double>> med_series(3);  // ce, dir, depth for the chart
  for (std::size_t si = 0; si < n_sigmas; ++si) {
    std::vector<std::vector<double>> cols(metric_names.size());
    std::size_t n_failed = 0;
    for (std::size_t r = 0; r < n_rooms; ++r)
      for (std::size_t t = 0; t < n_trials; ++t) {
        const auto& res = results[(r * n_sigmas + si) * n_trials + t];
        if (!res.ok) {
          ++n_failed;
          continue;
        }
        for (std::size_t k = 0; k < metric_names.size(); ++k)
          cols[k].push_back(metric_value(res.rep, k));
      }
    const std::size_t n_ok = cols[0].size();
    med_csv += fmt6(sigmas[si]) + "," + std::to_string(n_ok) + "," +
               std::to_string(n_failed);
    for (auto& c : cols) med_csv += "," + (c.empty() ? std::string() : fmt6(median_of(c)));
    med_csv += "\n";
    med_series[0].push_back(cols[0].empty() ? std::nan("") : median_of(cols[0]));
    med_series[1].push_back(cols[4].empty() ? std::nan("") : median_of(cols[4]));
    med_series[2].push_back(cols[5].empty() ? std::nan("") : median_of(cols[5]));
  }
  fs::path med_path;
  if (!o.medians.empty()) {
    med_path = o.medians;
  } else {
    med_path = out_path;
    med_path.replace_filename(out_path.stem().string() + "_medians" +
                              out_path.extension().string());
  }
  write_text(med_path, med_csv);

  if (!o.svg.empty())
    write_sweep_svg(o.svg, sigmas, med_series,
                    {"CE [m]", "dir err [deg]", "depth err [m]"});

  ordered_json m;
  m["tool_version"] = NCL_VERSION;
  m["command"] = "sweep";
  ordered_json cfg;
  cfg["corpus"] = o.corpus;
  cfg["sigmas"] = sigmas;
  cfg["trials"] = o.trials;
  cfg["seed"] = o.seed;
  cfg["spike_rate"] = o.spike_rate;
  cfg["spike_mag"] = o.spike_mag;
  m["config"] = std::move(cfg);
  m["outputs"] = {{"table", o.out}, {"medians", med_path.string()}};
  if (!o.svg.empty()) m["outputs"]["chart"] = o.svg;
  m["tasks"] = n_tasks;
  m["failed"] = n_failed_total;
  m["timing_ms"] = {{"total", total_ms}};
  fs::path mpath = out_path;
  mpath.replace_filename("run_manifest.json");
  write_json_file(mpath, m);

  char line[256];
  std::snprintf(line, sizeof line,
                "%zu tasks (%zu rooms x %zu sigmas x %zu trials), %zu failed, %.1f s",
                n_tasks, n_rooms, n_sigmas, n_trials, n_failed_total,
                total_ms / 1000.0);
  std::cout << line << " -> " << o.out << "\n";
  return 0;
}

// Minimal static line chart, log-scale y, categorical x at the sigma values.
void write_sweep_svg(const fs::path& path, const std::vector<double>& sigmas,
                     const std::vector<std::vector<double>>& series,
                     const std::vector<std::string>& names) {
  const double W = 640, H = 420, L = 70, R = 20, T = 24, B = 48;
  const double plot_w = W - L - R, plot_h = H - T - B;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};

  double lo = 1e300, hi = -1e300;
  for (const auto& s : series)
    for (double v : s)
      if (std::isfinite(v)) {
        const double c = std::max(v, 1e-6);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
  if (hi < lo) {
    lo = 1e-6;
    hi = 1.0;
  }
  const double dlo = std::floor(std::log10(lo));
  const double dhi = std::ceil(std::log10(hi) + (hi <= lo ? 1.0 : 0.0));
  auto ymap = [&](double v) {
    const double z = (std::log10(std::max(v, 1e-6)) - dlo) / std::max(dhi - dlo, 1.0);
    return T + plot_h * (1.0 - z);
  };
  auto xmap = [&](std::size_t i) {
    return sigmas.size() == 1 ? L + plot_w / 2
                              : L + plot_w * static_cast<double>(i) /
                                        static_cast<double>(sigmas.size() - 1);
  };

  std::string svg;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                W, H, W, H);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double d = dlo; d <= dhi; d += 1.0) {
    const double y = ymap(std::pow(10.0, d));
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#ddd\"/><text x=\"%.1f\" y=\"%.1f\" "
                  "text-anchor=\"end\">1e%.0f</text>\n",
                  L, y, W - R, y, L - 6, y + 4, d);
    svg += buf;
  }
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%g</text>\n",
                  xmap(i), H - B + 18, sigmas[i]);
    svg += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">noise sigma "
                "[px]</text>\n",
                L + plot_w / 2, H - 8);
  svg += buf;
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::string pts;
    for (std::size_t i = 0; i < series[s].size(); ++i) {
      if (!std::isfinite(series[s][i])) continue;
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", xmap(i), ymap(series[s][i]));
      pts += buf;
    }
    if (pts.empty()) continue;
    std::snprintf(buf, sizeof buf,
                  "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                  "stroke-width=\"2\"/>\n",
                  pts.c_str(), colors[s % 3]);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n", L + 8,
                  T + 16 + 16 * static_cast<double>(s), colors[s % 3],
                  names[s].c_str());
    svg += buf;
  }
  svg += "</svg>\n";
  write_text(path, svg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-central circular panorama room-layout toolkit"};
  app.set_version_flag("--version", NCL_VERSION);
  app.require_subcommand(1);
  int rc = 0;

  SynthOpts sy;
  auto* synth = app.add_subcommand("synth", "generate a synthetic room corpus");
  synth->add_option("--out", sy.out, "output corpus directory")->required();
  synth->add_option("--rooms", sy.rooms, "number of rooms");
  synth->add_option("--seed", sy.seed, "corpus seed");
  synth->add_option("--atlanta-prob", sy.atlanta_prob, "per-room chance of an Atlanta room");
  synth->add_option("--walls", sy.walls, "wall count range, lo..hi");
  synth->add_option("--side", sy.side, "base rectangle side range [m]");
  synth->add_option("--hc", sy.hc, "ceiling height range [m]");
  synth->add_option("--hf", sy.hf, "floor height range [m], negative");
  synth->add_option("--clip-prob", sy.clip_prob, "per-corner clip chance (Atlanta)");
  synth->add_option("--wall-dist", sy.wall_dist, "camera-to-wall distance range [m]");
  synth->add_option("--rc", sy.rc, "camera circle radius [m]");
  synth->add_option("--rows", sy.rows, "image rows");
  synth->add_option("--cols", sy.cols, "image columns");
  synth->add_option("--phi", sy.phi, "elevation range (rad, or e.g. -90deg..90deg)");
  synth->add_option("--varphi", sy.varphi, "azimuth range (rad or deg)");
  synth->add_option("--sigma", sy.sigma, "boundary noise sigma [px]");
  synth->add_option("--spike-rate", sy.spike_rate, "outlier column fraction");
  synth->add_option("--spike-mag", sy.spike_mag, "outlier magnitude [px]");
  synth->callback([&] { rc = run_synth(sy); });

  std::string pl_layout, pl_camera, pl_out;
  auto* project = app.add_subcommand("project", "project a layout to boundary rows");
  project->add_option("--layout", pl_layout, "layout.json")->required();
  project->add_option("--camera", pl_camera, "camera.json")->required();
  project->add_option("--out", pl_out, "boundaries.csv to write")->required();
  project->callback([&] { rc = run_project(pl_layout, pl_camera, pl_out); });

  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "recover a layout from boundaries");
  solve->add_option("--boundaries", so.boundaries, "boundaries.csv")->required();
  solve->add_option("--camera", so.camera, "camera.json")->required();
  solve->add_option("--world", so.world, "manhattan | atlanta")->required();
  solve->add_option("--out", so.out, "layout.json to write")->required();
  solve->add_option("--manifest", so.manifest, "run manifest path (default: alongside --out)");
  solve->add_option("--seed", so.seed, "RANSAC seed");
  solve->add_option("--confidence", so.confidence, "RANSAC success confidence");
  solve->add_option("--outlier-rate", so.outlier_rate, "assumed outlier rate");
  solve->add_option("--sample-size", so.sample_size, "columns per hypothesis");
  solve->add_option("--inlier-threshold", so.inlier_threshold, "row residual gate [px]");
  solve->add_option("--min-inlier-ratio", so.min_inlier_ratio, "consensus floor");
  solve->add_option("--gap-threshold", so.gap_threshold, "occluded-corner gap [m]");
  solve->add_option("--mu", so.corner_penalty, "corner tie-down weight");
  solve->add_option("--adjust-iters", so.adjust_iters, "max refinement iterations");
  solve->add_flag("--no-adjust", so.no_adjust, "skip final refinement");
  solve->callback([&] { rc = run_solve(so); });

  EvalOpts ev;
  auto* eval = app.add_subcommand("eval", "compare a layout against ground truth");
  eval->add_option("--pred", ev.pred, "predicted layout.json")->required();
  eval->add_option("--gt", ev.gt, "ground-truth layout.json")->required();
  eval->add_option("--out", ev.out, "eval.json to write")->required();
  eval->add_option("--csv", ev.csv, "append a row to this CSV table");
  eval->add_option("--pred-camera", ev.pred_camera, "camera used for the prediction");
  eval->add_option("--gt-camera", ev.gt_camera, "camera used for the ground truth");
  eval->callback([&] { rc = run_eval(ev); });

  SweepOpts sw;
  auto* sweep = app.add_subcommand("sweep", "noise sweep over a corpus");
  sweep->add_option("--corpus", sw.corpus, "corpus directory from synth")->required();
  sweep->add_option("--out", sw.out, "long-format CSV to write");
  sweep->add_option("--medians", sw.medians, "per-sigma medians CSV (default: derived)");
  sweep->add_option("--svg", sw.svg, "optional chart");
  sweep->add_option("--sigmas", sw.sigmas, "comma-separated noise sigmas [px]");
  sweep->add_option("--trials", sw.trials, "trials per room per sigma");
  sweep->add_option("--seed", sw.seed, "sweep seed");
  sweep->add_option("--spike-rate", sw.spike_rate, "outlier column fraction");
  sweep->add_option("--spike-mag", sw.spike_mag, "outlier magnitude [px]");
  sweep->callback([&] { rc = run_sweep(sw); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad arguments are input errors
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == Err::BadInput || e.code() == Err::IoFailure) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
