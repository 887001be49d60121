#include "ncl/error.hpp"

namespace ncl {

const char* to_string(Err e) {
  switch (e) {
    case Err::InsideCircle: return "InsideCircle";
    case Err::OutOfView: return "OutOfView";
    case Err::OutOfBounds: return "OutOfBounds";
    case Err::DegenerateRays: return "DegenerateRays";
    case Err::NoRealSolution: return "NoRealSolution";
    case Err::ParallelLines: return "ParallelLines";
    case Err::NotCoplanar: return "NotCoplanar";
    case Err::RankDeficient: return "RankDeficient";
    case Err::ComplexRoots: return "ComplexRoots";
    case Err::NoValidRoot: return "NoValidRoot";
    case Err::DehomogenizationFailure: return "DehomogenizationFailure";
    case Err::DegenerateConfig: return "DegenerateConfig";
    case Err::TooFewCorners: return "TooFewCorners";
    case Err::NoConsensus: return "NoConsensus";
    case Err::CameraOutsideRoom: return "CameraOutsideRoom";
    case Err::RejectionOverflow: return "RejectionOverflow";
    case Err::EmptyCornerSet: return "EmptyCornerSet";
    case Err::DegeneratePolygon: return "DegeneratePolygon";
    case Err::BadInput: return "BadInput";
    case Err::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

}  // namespace ncl
