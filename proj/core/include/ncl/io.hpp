#pragma once

#include <filesystem>
#include <string>

#include "ncl/boundary.hpp"
#include "ncl/camera.hpp"
#include "ncl/layout.hpp"
#include "ncl/metrics.hpp"

namespace ncl {

// File formats. Malformed content throws BadInput, filesystem trouble
// IoFailure (the CLI maps both to exit code 2). All write_* emit 2-space
// indented JSON / fixed 6-decimal CSV, newline-terminated, locale-independent,
// so equal inputs give byte-equal files.

// camera.json: {"rc", "rows", "cols", "phi": [lo, hi], "varphi": [lo, hi]},
// angles in radians.
CameraModel read_camera_json(const std::filesystem::path& path);
void write_camera_json(const std::filesystem::path& path, const CameraModel& cam);

// layout.json: {"h_c", "h_f", "corners": [[x, y], ...] (CCW),
// "walls": [{"theta", "d", "occluded"}, ...]}, theta in radians. Corners are
// authoritative on read: walls are rebuilt from them and cross-checked against
// the stored entries (direction modulo pi and distance, 1e-5); occluded flags
// are taken from the stored walls.
Layout read_layout_json(const std::filesystem::path& path);
void write_layout_json(const std::filesystem::path& path, const Layout& layout);

// boundaries.csv: header `col,ceiling_row,floor_row,corner_score`, one row per
// column with col a 0-based running index.
BoundaryMap read_boundaries_csv(const std::filesystem::path& path);
void write_boundaries_csv(const std::filesystem::path& path, const BoundaryMap& bm);

// eval.json: the EvalReport fields verbatim, plus "camera_warning" when a
// non-empty warning is given.
void write_eval_json(const std::filesystem::path& path, const EvalReport& report,
                     const std::string& camera_warning = {});

}  // namespace ncl
