#include "biharm/quadrature.hpp"

#include <fmt/format.h>

#include "biharm/error.hpp"

namespace biharm {

namespace {

constexpr std::array<QuadraturePoint, 1> kCentroid{{
    {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 1.0},
}};

constexpr std::array<QuadraturePoint, 3> kDegree2{{
    {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
    {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
    {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
}};

// Dunavant (1985), degree 4.
constexpr double kA = 0.44594849091596488632;
constexpr double kWA = 0.22338158967801146570;
constexpr double kB = 0.091576213509770743460;
constexpr double kWB = 0.10995174365532186764;

constexpr std::array<QuadraturePoint, 6> kDegree4{{
    {{1.0 - 2.0 * kA, kA, kA}, kWA},
    {{kA, 1.0 - 2.0 * kA, kA}, kWA},
    {{kA, kA, 1.0 - 2.0 * kA}, kWA},
    {{1.0 - 2.0 * kB, kB, kB}, kWB},
    {{kB, 1.0 - 2.0 * kB, kB}, kWB},
    {{kB, kB, 1.0 - 2.0 * kB}, kWB},
}};

} // namespace

std::span<const QuadraturePoint> triangle_rule(int order)
{
    switch (order) {
    case 1: return kCentroid;
    case 2: return kDegree2;
    case 4: return kDegree4;
    default: raise(ErrorCode::kInvalidInput, fmt::format("no triangle rule of order {}", order));
    }
}

} // namespace biharm
