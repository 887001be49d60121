#pragma once

#include <vector>

namespace ncl {

// Per-column layout boundaries, the hand-off format between the (real or
// synthetic) front end and the geometry pipeline. Rows are continuous image
// coordinates and grow with elevation, so ceiling_row[j] > floor_row[j].
// corner_score in [0, 1] peaks at columns containing a visible corner.
struct BoundaryMap {
  std::vector<double> ceiling_row;
  std::vector<double> floor_row;
  std::vector<double> corner_score;

  int cols() const { return static_cast<int>(ceiling_row.size()); }
  bool consistent() const {
    return ceiling_row.size() == floor_row.size() &&
           ceiling_row.size() == corner_score.size();
  }
};

}  // namespace ncl
