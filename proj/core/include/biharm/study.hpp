#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "biharm/analysis.hpp"
#include "biharm/biharmonic.hpp"
#include "biharm/surfaces.hpp"

namespace biharm {

enum class StudyCase {
    kCap,
    kSphere,
    kLantern,
};

std::string_view to_string(StudyCase kind);

/// What lantern solutions are compared against.
enum class LanternReference {
    kExact,          // cylinder manufactured solution
    kHighResolution, // numerical solution on a fine m = 2n lantern
};

/// Parameters of one refinement study. `levels` holds ring counts (cap),
/// icosphere subdivisions (sphere) or axial counts n (lantern).
struct StudyConfig {
    StudyCase kind = StudyCase::kCap;
    std::vector<int> levels;
    double theta0 = 1.0471975511965976; // pi / 3
    int degree = 2;
    int order = 0;
    LanternCoupling coupling = LanternCoupling::kLinear;
    double radius = 1.0;
    double height = 2.0;
    LanternReference reference = LanternReference::kExact;
    int reference_n = 128;
    MassMode mass_mode = MassMode::kConsistent;
    double tol = kDefaultTolerance;
    int quad_order = kDefaultQuadratureOrder;
    std::filesystem::path output_dir = ".";

    /// Default levels and parameters for each experiment family.
    static StudyConfig defaults(StudyCase kind, LanternCoupling coupling = LanternCoupling::kLinear);

    /// Throws kConfig. `min_levels` is 3 for convergence studies.
    void validate(std::size_t min_levels = 1) const;

    /// Short label without commas, e.g. "cap", "sphere", "lantern-quadratic".
    [[nodiscard]] std::string label() const;
    [[nodiscard]] SurfaceCase surface() const;
    [[nodiscard]] RefinementFamily family() const;
};

/// Dispatches to the clamped, lumped or closed-surface solver.
MixedSolution solve_biharmonic(const TriMesh& mesh, const NodalField& f, MassMode mass_mode, double tol);

struct LevelResult {
    TriMesh mesh;
    MixedSolution solution;
    ErrorRecord record;
};

/// Solves one level of the family with f = I_h(exact f) and measures errors
/// against `reference` (normally config.surface()).
LevelResult run_level(const StudyConfig& config, std::size_t level_index, const SurfaceCase& reference);

/// Quality measurements only, no solve.
ErrorRecord measure_quality(const StudyConfig& config, std::size_t level_index);

/// Replaces the exact fields of a cylinder case by the piecewise-linear
/// interpolant of a numerical solution on a lantern mesh.
SurfaceCase interpolated_reference(const SurfaceCase& cylinder, const TriMesh& mesh, const MixedSolution& solution);

/// The comparison surface for the configured study.
SurfaceCase study_reference(const StudyConfig& config);

/// Solves every level (concurrently, capped by BIHARM_THREADS) and fits rates.
/// Results are returned in level order regardless of scheduling.
ConvergenceReport run_study(const StudyConfig& config);

/// Quality-only counterpart of run_study.
ConvergenceReport run_quality_study(const StudyConfig& config);

/// Worker count from BIHARM_THREADS, defaulting to the hardware concurrency.
unsigned study_threads();

struct GateCheck {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool lower_bound = true; // value >= bound when true, value <= bound otherwise
    [[nodiscard]] bool passed() const { return lower_bound ? value >= bound : value <= bound; }
};

/// Rate thresholds for the standard experiment families.
std::vector<GateCheck> acceptance_gate(const StudyConfig& config, const ConvergenceReport& report);

/// Rates at or below this slope are flagged non-convergent.
inline constexpr double kNonConvergentSlope = 0.25;

} // namespace biharm
