#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biharm {

enum class ErrorCode {
    kInvalidInput,
    kDegenerateFace,
    kNonManifoldEdge,
    kInconsistentOrientation,
    kDimensionMismatch,
    kNotConverged,
    kSingular,
    kOutsideReach,
    kInvalidAngle,
    kInvalidDimension,
    kInvalidDegree,
    kTooFewRings,
    kInvalidCounts,
    kNoBoundary,
    kHasBoundary,
    kInsufficientLevels,
    kIo,
    kConfig,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace biharm
