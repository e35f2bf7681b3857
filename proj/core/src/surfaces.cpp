#include "biharm/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>

#include "biharm/error.hpp"

namespace biharm {

namespace {

Point3 radial_unit(const Point3& p)
{
    const double r = p.norm();
    if (!(r > 0.0)) {
        raise(ErrorCode::kOutsideReach, "point coincides with the sphere center");
    }
    return p / r;
}

Point3 tangential(const Point3& v, const Point3& normal)
{
    return v - v.dot(normal) * normal;
}

// Associated Legendre P_l^m(z) divided by (1 - z^2)^(m/2), and its derivative.
std::pair<double, double> reduced_legendre(int degree, int order, double z)
{
    double p_mm = 1.0;
    for (int k = 1; k <= order; ++k) {
        p_mm *= static_cast<double>(2 * k - 1);
    }
    if (degree == order) {
        return {p_mm, 0.0};
    }
    double p_prev = p_mm;
    double d_prev = 0.0;
    double p = static_cast<double>(2 * order + 1) * z * p_mm;
    double d = static_cast<double>(2 * order + 1) * p_mm;
    for (int l = order + 2; l <= degree; ++l) {
        const double p_next =
            (static_cast<double>(2 * l - 1) * z * p - static_cast<double>(l + order - 1) * p_prev) / (l - order);
        const double d_next =
            (static_cast<double>(2 * l - 1) * (p + z * d) - static_cast<double>(l + order - 1) * d_prev) / (l - order);
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
    }
    return {p, d};
}

void check_harmonic(int degree, int order)
{
    if (degree < 0 || std::abs(order) > degree) {
        raise(ErrorCode::kInvalidDegree, fmt::format("need l >= 0 and |m| <= l (got l={}, m={})", degree, order));
    }
}

} // namespace

std::string_view to_string(SurfaceKind kind)
{
    switch (kind) {
    case SurfaceKind::kSphere: return "sphere";
    case SurfaceKind::kCap: return "cap";
    case SurfaceKind::kCylinder: return "cylinder";
    }
    return "unknown";
}

std::string_view to_string(LanternCoupling coupling)
{
    return coupling == LanternCoupling::kLinear ? "linear" : "quadratic";
}

Point3 SurfaceCase::closest_point(const Point3& p) const
{
    if (kind == SurfaceKind::kCylinder) {
        const double r = std::hypot(p.x(), p.y());
        if (!(r > 0.0)) {
            raise(ErrorCode::kOutsideReach, "point lies on the cylinder axis");
        }
        const double a = 0.5 * height;
        return {radius * p.x() / r, radius * p.y() / r, std::clamp(p.z(), -a, a)};
    }
    return radius * radial_unit(p);
}

Point3 SurfaceCase::normal_at(const Point3& p) const
{
    if (kind == SurfaceKind::kCylinder) {
        const double r = std::hypot(p.x(), p.y());
        if (!(r > 0.0)) {
            raise(ErrorCode::kOutsideReach, "point lies on the cylinder axis");
        }
        return {p.x() / r, p.y() / r, 0.0};
    }
    return radial_unit(p);
}

std::string SurfaceCase::describe() const
{
    switch (kind) {
    case SurfaceKind::kSphere: return fmt::format("sphere(R={:g},l={},m={})", radius, degree, order);
    case SurfaceKind::kCap: return fmt::format("cap(R={:g},theta0={:.6g})", radius, theta0);
    case SurfaceKind::kCylinder: return fmt::format("cylinder(R={:g},H={:g})", radius, height);
    }
    return "unknown";
}

Point3 closest_point(const SurfaceCase& surface, const Point3& p)
{
    return surface.closest_point(p);
}

double spherical_harmonic(int degree, int order, const Point3& unit)
{
    check_harmonic(degree, order);
    const int m = std::abs(order);
    const auto [p, dp] = reduced_legendre(degree, m, unit.z());
    const std::complex<double> w = std::pow(std::complex<double>(unit.x(), unit.y()), m);
    return p * (order >= 0 ? w.real() : w.imag());
}

Point3 spherical_harmonic_gradient(int degree, int order, const Point3& unit)
{
    check_harmonic(degree, order);
    const int m = std::abs(order);
    const auto [p, dp] = reduced_legendre(degree, m, unit.z());
    const std::complex<double> xy(unit.x(), unit.y());
    const std::complex<double> w = std::pow(xy, m);
    const std::complex<double> w_lower = m > 0 ? std::pow(xy, m - 1) : std::complex<double>(0.0, 0.0);
    double q = 0.0, dq_dx = 0.0, dq_dy = 0.0;
    if (order >= 0) {
        q = w.real();
        dq_dx = m * w_lower.real();
        dq_dy = -m * w_lower.imag();
    } else {
        q = w.imag();
        dq_dx = m * w_lower.imag();
        dq_dy = m * w_lower.real();
    }
    return {p * dq_dx, p * dq_dy, dp * q};
}

SurfaceCase cap_case(double radius, double theta0)
{
    if (!(radius > 0.0)) {
        raise(ErrorCode::kInvalidDimension, fmt::format("cap radius must be positive (got {})", radius));
    }
    if (!(theta0 > 0.0 && theta0 < std::numbers::pi)) {
        raise(ErrorCode::kInvalidAngle, fmt::format("cap angle must lie in (0, pi) (got {})", theta0));
    }
    SurfaceCase s;
    s.kind = SurfaceKind::kCap;
    s.radius = radius;
    s.theta0 = theta0;
    s.has_boundary = true;

    // With x = cos(theta): Delta g(x) = -(1/R^2) d/dx[(1 - x^2) g'(x)].
    const double c = std::cos(theta0);
    const double inv_r2 = 1.0 / (radius * radius);
    s.exact_u = [c](const Point3& p) {
        const double x = radial_unit(p).z();
        return (x - c) * (x - c);
    };
    s.exact_grad_u = [c, radius](const Point3& p) {
        const Point3 n = radial_unit(p);
        return Point3(tangential(Point3(0.0, 0.0, 2.0 * (n.z() - c)), n) / radius);
    };
    s.exact_lap_u = [c, inv_r2](const Point3& p) {
        const double x = radial_unit(p).z();
        return inv_r2 * (6.0 * x * x - 4.0 * c * x - 2.0);
    };
    s.exact_f = [c, inv_r2](const Point3& p) {
        const double x = radial_unit(p).z();
        return inv_r2 * inv_r2 * (36.0 * x * x - 8.0 * c * x - 12.0);
    };
    return s;
}

SurfaceCase cylinder_case(double radius, double height)
{
    if (!(radius > 0.0) || !(height > 0.0)) {
        raise(ErrorCode::kInvalidDimension, fmt::format("cylinder needs R, H > 0 (got {}, {})", radius, height));
    }
    SurfaceCase s;
    s.kind = SurfaceKind::kCylinder;
    s.radius = radius;
    s.height = height;
    s.has_boundary = true;

    const double a = 0.5 * height;
    const auto axial = [a](const Point3& p) { return std::clamp(p.z(), -a, a); };
    s.exact_u = [a, axial](const Point3& p) {
        const double z = axial(p);
        const double q = z * z - a * a;
        return q * q;
    };
    s.exact_grad_u = [a, axial](const Point3& p) {
        const double z = axial(p);
        return Point3(0.0, 0.0, 4.0 * z * (z * z - a * a));
    };
    s.exact_lap_u = [a, axial](const Point3& p) {
        const double z = axial(p);
        return -(12.0 * z * z - 4.0 * a * a);
    };
    s.exact_f = [](const Point3&) { return 24.0; };
    return s;
}

SurfaceCase sphere_case(double radius, int degree, int order)
{
    if (degree < 1 || std::abs(order) > degree) {
        raise(ErrorCode::kInvalidDegree, fmt::format("need l >= 1 and |m| <= l (got l={}, m={})", degree, order));
    }
    if (!(radius > 0.0)) {
        raise(ErrorCode::kInvalidDimension, fmt::format("sphere radius must be positive (got {})", radius));
    }
    SurfaceCase s;
    s.kind = SurfaceKind::kSphere;
    s.radius = radius;
    s.degree = degree;
    s.order = order;
    s.has_boundary = false;

    // Delta Y = l(l+1)/R^2 Y on the sphere of radius R.
    const double eigenvalue = static_cast<double>(degree * (degree + 1)) / (radius * radius);
    const double u_scale = 1.0 / (eigenvalue * eigenvalue);
    const double lap_scale = 1.0 / eigenvalue;
    s.exact_f = [degree, order](const Point3& p) { return spherical_harmonic(degree, order, radial_unit(p)); };
    s.exact_lap_u = [=](const Point3& p) { return lap_scale * spherical_harmonic(degree, order, radial_unit(p)); };
    s.exact_u = [=](const Point3& p) { return u_scale * spherical_harmonic(degree, order, radial_unit(p)); };
    s.exact_grad_u = [=](const Point3& p) {
        const Point3 n = radial_unit(p);
        return Point3(u_scale / radius * tangential(spherical_harmonic_gradient(degree, order, n), n));
    };
    return s;
}

int lantern_equator_count(LanternCoupling coupling, int n)
{
    return coupling == LanternCoupling::kLinear ? 2 * n : n * n;
}

TriMesh RefinementFamily::mesh(std::size_t level_index) const
{
    if (level_index >= levels.size()) {
        raise(ErrorCode::kInvalidInput, fmt::format("level {} out of range ({} levels)", level_index, levels.size()));
    }
    const int level = levels[level_index];
    switch (surface.kind) {
    case SurfaceKind::kCap: return gen_cap_mesh(surface.theta0, level, surface.radius);
    case SurfaceKind::kSphere: return gen_icosphere(level, surface.radius);
    case SurfaceKind::kCylinder:
        return gen_schwarz_lantern(lantern_equator_count(coupling, level), level, surface.radius, surface.height);
    }
    raise(ErrorCode::kInvalidInput, "unknown surface kind");
}

} // namespace biharm
