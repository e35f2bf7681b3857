#pragma once

#include <array>
#include <span>

#include "biharm/mesh.hpp"

namespace biharm {

struct QuadraturePoint {
    std::array<double, 3> barycentric;
    double weight; // weights of a rule sum to 1; scale by the triangle area
};

/// Symmetric triangle rule exact for polynomials up to `order`.
/// Supported orders: 1 (centroid), 2 (three interior points), 4 (six-point
/// Dunavant). Throws kInvalidInput otherwise.
std::span<const QuadraturePoint> triangle_rule(int order);

inline Point3 barycentric_point(const Point3& a, const Point3& b, const Point3& c, const QuadraturePoint& q)
{
    return q.barycentric[0] * a + q.barycentric[1] * b + q.barycentric[2] * c;
}

} // namespace biharm
