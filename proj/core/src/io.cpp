#include "ncl/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncl/error.hpp"

namespace ncl {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(Err::IoFailure, "cannot read " + path.string());
  return std::move(buf).str();
}

void spill(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Err::IoFailure, "cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) fail(Err::IoFailure, "cannot write " + path.string());
}

ordered_json parse_json(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Err::BadInput, path.string() + ": not valid JSON");
  return j;
}

double require_number(const ordered_json& j, const char* key, const std::filesystem::path& path) {
  if (!j.contains(key) || !j[key].is_number())
    fail(Err::BadInput, path.string() + ": missing numeric field \"" + key + "\"");
  return j[key].get<double>();
}

double parse_field(std::string_view text, const std::filesystem::path& path, int line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    fail(Err::BadInput,
         path.string() + ":" + std::to_string(line) + ": bad number \"" + std::string(text) + "\"");
  return value;
}

}  // namespace

CameraModel read_camera_json(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  CameraModel cam;
  cam.rc = require_number(j, "rc", path);
  const double rows = require_number(j, "rows", path);
  const double cols = require_number(j, "cols", path);
  for (const char* key : {"phi", "varphi"}) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2 ||
        !j[key][0].is_number() || !j[key][1].is_number())
      fail(Err::BadInput, path.string() + ": \"" + key + "\" must be [lo, hi]");
  }
  cam.phi_min = j["phi"][0].get<double>();
  cam.phi_max = j["phi"][1].get<double>();
  cam.varphi_min = j["varphi"][0].get<double>();
  cam.varphi_max = j["varphi"][1].get<double>();
  if (!(cam.rc >= 0.0)) fail(Err::BadInput, path.string() + ": rc must be >= 0");
  if (rows < 1.0 || cols < 1.0 || rows != std::floor(rows) || cols != std::floor(cols))
    fail(Err::BadInput, path.string() + ": rows and cols must be positive integers");
  cam.rows = static_cast<int>(rows);
  cam.cols = static_cast<int>(cols);
  if (!(cam.phi_min < cam.phi_max) || !(cam.varphi_min < cam.varphi_max))
    fail(Err::BadInput, path.string() + ": angle ranges must be increasing");
  return cam;
}

void write_camera_json(const std::filesystem::path& path, const CameraModel& cam) {
  ordered_json j;
  j["rc"] = cam.rc;
  j["rows"] = cam.rows;
  j["cols"] = cam.cols;
  j["phi"] = {cam.phi_min, cam.phi_max};
  j["varphi"] = {cam.varphi_min, cam.varphi_max};
  spill(path, j.dump(2) + "\n");
}

Layout read_layout_json(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  const double h_c = require_number(j, "h_c", path);
  const double h_f = require_number(j, "h_f", path);
  if (!(h_c > h_f)) fail(Err::BadInput, path.string() + ": h_c must exceed h_f");
  if (!j.contains("corners") || !j["corners"].is_array() || j["corners"].size() < 3)
    fail(Err::BadInput, path.string() + ": \"corners\" must list at least 3 points");
  std::vector<Eigen::Vector2d> corners;
  for (const auto& c : j["corners"]) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
      fail(Err::BadInput, path.string() + ": corners must be [x, y] pairs");
    corners.emplace_back(c[0].get<double>(), c[1].get<double>());
  }
  Layout layout = layout_from_corners(std::move(corners), h_c, h_f);
  if (j.contains("walls")) {
    const auto& walls = j["walls"];
    if (!walls.is_array() || walls.size() != layout.walls.size())
      fail(Err::BadInput, path.string() + ": wall count must match the corner count");
    for (std::size_t k = 0; k < layout.walls.size(); ++k) {
      const auto& w = walls[k];
      if (!w.is_object())
        fail(Err::BadInput, path.string() + ": walls must be objects");
      const double theta = require_number(w, "theta", path);
      const double d = require_number(w, "d", path);
      const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
      const Eigen::Vector2d& ur = layout.walls[k].u;
      const double dir_gap = std::min((u - ur).norm(), (u + ur).norm());
      if (dir_gap > 1e-5 || std::abs(d - layout.walls[k].d) > 1e-5)
        fail(Err::BadInput, path.string() + ": wall " + std::to_string(k) +
                                " disagrees with the corner polygon");
      layout.walls[k].occluded = w.value("occluded", false);
    }
  }
  std::string why;
  if (!layout_is_valid(layout, &why))
    fail(Err::BadInput, path.string() + ": " + why);
  return layout;
}

void write_layout_json(const std::filesystem::path& path, const Layout& layout) {
  ordered_json j;
  j["h_c"] = layout.h_c;
  j["h_f"] = layout.h_f;
  j["corners"] = ordered_json::array();
  for (const auto& c : layout.corners) j["corners"].push_back({c.x(), c.y()});
  j["walls"] = ordered_json::array();
  for (const auto& w : layout.walls) {
    ordered_json jw;
    jw["theta"] = std::atan2(w.u.y(), w.u.x());
    jw["d"] = w.d;
    jw["occluded"] = w.occluded;
    j["walls"].push_back(std::move(jw));
  }
  spill(path, j.dump(2) + "\n");
}

BoundaryMap read_boundaries_csv(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "col,ceiling_row,floor_row,corner_score")
    fail(Err::BadInput, path.string() + ": bad or missing CSV header");
  BoundaryMap bm;
  int expected = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<std::string_view, 4> fields;
    std::string_view rest = line;
    for (int f = 0; f < 4; ++f) {
      const auto comma = rest.find(',');
      if (f < 3) {
        if (comma == std::string_view::npos)
          fail(Err::BadInput, path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
        fields[static_cast<std::size_t>(f)] = rest.substr(0, comma);
        rest = rest.substr(comma + 1);
      } else {
        if (comma != std::string_view::npos)
          fail(Err::BadInput, path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
        fields[static_cast<std::size_t>(f)] = rest;
      }
    }
    const double col = parse_field(fields[0], path, lineno);
    if (col != expected)
      fail(Err::BadInput, path.string() + ":" + std::to_string(lineno) +
                              ": columns must be a 0-based running index");
    const double c = parse_field(fields[1], path, lineno);
    const double f = parse_field(fields[2], path, lineno);
    const double s = parse_field(fields[3], path, lineno);
    if (!(c > f))
      fail(Err::BadInput, path.string() + ":" + std::to_string(lineno) +
                              ": ceiling row must stay above the floor row");
    if (!(s >= 0.0 && s <= 1.0))
      fail(Err::BadInput, path.string() + ":" + std::to_string(lineno) +
                              ": corner score must lie in [0,1]");
    bm.ceiling_row.push_back(c);
    bm.floor_row.push_back(f);
    bm.corner_score.push_back(s);
    ++expected;
  }
  if (bm.cols() == 0) fail(Err::BadInput, path.string() + ": no data rows");
  return bm;
}

void write_boundaries_csv(const std::filesystem::path& path, const BoundaryMap& bm) {
  if (!bm.consistent()) fail(Err::BadInput, "inconsistent boundary map");
  std::string out = "col,ceiling_row,floor_row,corner_score\n";
  char buf[128];
  for (int j = 0; j < bm.cols(); ++j) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f\n", j,
                  bm.ceiling_row[static_cast<std::size_t>(j)],
                  bm.floor_row[static_cast<std::size_t>(j)],
                  bm.corner_score[static_cast<std::size_t>(j)]);
    out += buf;
  }
  spill(path, out);
}

void write_eval_json(const std::filesystem::path& path, const EvalReport& report,
                     const std::string& camera_warning) {
  ordered_json j;
  j["ce_m"] = report.ce_m;
  j["cen_pct"] = report.cen_pct;
  j["corner_count_mismatch"] = report.corner_count_mismatch;
  j["iou2d_pct"] = report.iou2d_pct;
  j["iou3d_pct"] = report.iou3d_pct;
  j["dir_err_deg"] = report.dir_err_deg;
  j["depth_err_m"] = report.depth_err_m;
  j["scale_err_pct"] = report.scale_err_pct;
  j["wall_count_pred"] = report.wall_count_pred;
  j["wall_count_gt"] = report.wall_count_gt;
  if (!camera_warning.empty()) j["camera_warning"] = camera_warning;
  spill(path, j.dump(2) + "\n");
}

}  // namespace ncl
