#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "biharm/fem.hpp"
#include "biharm/mesh.hpp"
#include "biharm/surfaces.hpp"

namespace biharm {

inline constexpr int kDefaultQuadratureOrder = 4;

/// Mesh-quality measurements for one mesh against its reference surface.
///
/// kappa_min and K_max are inradius / circumradius relative to each
/// triangle's longest edge. Distances and normal angles are sampled at
/// quadrature points and vertices; angles are in radians, in [0, pi/2].
struct QualityRecord {
    double kappa_min = 0.0;
    double K_max = 0.0;
    double max_distance = 0.0;
    double max_normal_angle = 0.0;
};

struct ErrorRecord {
    int level = 0; // generator parameter (rings, subdivisions, axial count)
    double h = 0.0;
    std::size_t dofs = 0;          // vertices
    std::size_t interior_dofs = 0; // vertices off the boundary
    double l2_u1 = 0.0;
    double h1_u1 = 0.0;
    double l2_u2 = 0.0;
    QualityRecord quality;
};

struct RateFit {
    std::string norm;
    double slope = 0.0;
    double residual = 0.0; // RMS of log-space residuals
};

/// Per-level records plus least-squares slopes of log(error) against log(h).
struct ConvergenceReport {
    std::string case_name;
    std::vector<ErrorRecord> records;
    std::vector<RateFit> fitted_rates; // l2_u1, h1_u1, l2_u2
    /// Distance rate (gamma), normal-angle rate (epsilon) and
    /// sigma = min(gamma, 2 epsilon) fitted from the quality fields.
    RateFit gamma;
    RateFit epsilon;
    double sigma_estimate = 0.0;

    [[nodiscard]] const RateFit& rate(std::string_view norm) const;
};

/// L2 distance on the mesh between u_h and exact o Phi.
double l2_error(const TriMesh& mesh, const NodalField& u_h, const SurfaceScalar& exact, const SurfaceCase& surface,
                int quad_order = kDefaultQuadratureOrder);

/// L2 error of u_h against the case's exact u.
double l2_error(const TriMesh& mesh, const NodalField& u_h, const SurfaceCase& surface,
                int quad_order = kDefaultQuadratureOrder);

/// H1 seminorm error: per-face P1 gradient against the exact surface gradient
/// at the closest point, projected onto the face plane.
double h1_error(const TriMesh& mesh, const NodalField& u_h, const SurfaceVector& exact_grad,
                const SurfaceCase& surface, int quad_order = kDefaultQuadratureOrder);

double h1_error(const TriMesh& mesh, const NodalField& u_h, const SurfaceCase& surface,
                int quad_order = kDefaultQuadratureOrder);

QualityRecord certify_quality(const TriMesh& mesh, const SurfaceCase& surface);

/// Least-squares slope of log(value) against log(h).
RateFit fit_power_law(std::string norm, const std::vector<double>& h, const std::vector<double>& values);

/// Fits every norm and the gamma / epsilon quality rates using the finest
/// ceil(levels / 2) + 1 records. Throws kInsufficientLevels below 3 records
/// and kInvalidInput for repeated h.
ConvergenceReport fit_rates(std::vector<ErrorRecord> records, std::string case_name = {});

/// Number of finest levels used by fit_rates.
std::size_t fit_window(std::size_t levels);

// CSV: `case,level,h,dofs,l2_u1,h1_u1,l2_u2,kappa_min,K_max,max_dist,max_normal_angle`
// with 12 significant digits.
void write_report_csv(std::ostream& out, const ConvergenceReport& report);
std::vector<ErrorRecord> read_report_csv(std::istream& in, std::string* case_name = nullptr);

/// Quality-only CSV: `case,level,h,kappa_min,K_max,max_dist,max_normal_angle`.
void write_quality_csv(std::ostream& out, const std::string& case_name, const std::vector<ErrorRecord>& records);

} // namespace biharm
