#include "biharm/error.hpp"

namespace biharm {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kDegenerateFace: return "DegenerateFace";
    case ErrorCode::kNonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::kInconsistentOrientation: return "InconsistentOrientation";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kOutsideReach: return "OutsideReach";
    case ErrorCode::kInvalidAngle: return "InvalidAngle";
    case ErrorCode::kInvalidDimension: return "InvalidDimension";
    case ErrorCode::kInvalidDegree: return "InvalidDegree";
    case ErrorCode::kTooFewRings: return "TooFewRings";
    case ErrorCode::kInvalidCounts: return "InvalidCounts";
    case ErrorCode::kNoBoundary: return "NoBoundary";
    case ErrorCode::kHasBoundary: return "HasBoundary";
    case ErrorCode::kInsufficientLevels: return "InsufficientLevels";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kConfig: return "Config";
    }
    return "Unknown";
}

} // namespace biharm
