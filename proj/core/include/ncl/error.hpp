#pragma once

#include <stdexcept>
#include <string>

namespace ncl {

// Failure classes thrown across the library. BadInput/IoFailure indicate unusable
// input files or arguments; everything else is a geometric/numeric failure of an
// otherwise well-formed problem. The CLI maps the former to exit code 2 and the
// latter to exit code 1.
enum class Err {
  InsideCircle,      // point is inside (or on) the optical-center circle
  OutOfView,         // point projects outside the field of view
  OutOfBounds,       // pixel coordinate outside the image
  DegenerateRays,    // rays do not give independent constraints
  NoRealSolution,    // quadric intersection has complex roots
  ParallelLines,     // closest point / intersection undefined
  NotCoplanar,       // lines do not intersect
  RankDeficient,     // linear system drops below the required rank
  ComplexRoots,      // both selection quadratics have complex roots
  NoValidRoot,       // no root satisfies h_c > h_f
  DehomogenizationFailure,  // homogeneous part of the solution vanishes
  DegenerateConfig,  // parameters make the computation meaningless
  TooFewCorners,     // not enough corner peaks to segment
  NoConsensus,       // consensus below the minimum inlier ratio
  CameraOutsideRoom, // projection requested from outside the polygon
  RejectionOverflow, // rejection sampling failed to produce a valid room
  EmptyCornerSet,    // corner metric on an empty set
  DegeneratePolygon, // IoU on a non-simple or empty polygon
  BadInput,          // malformed file or argument
  IoFailure,         // filesystem error
};

const char* to_string(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, std::string message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ncl
