#include "biharm/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <memory>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "biharm/error.hpp"

namespace biharm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception (lowest index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    std::vector<std::exception_ptr> errors(count);
    const auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const auto workers = static_cast<std::size_t>(std::max(1u, threads));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            guarded(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, count); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    guarded(i);
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

double angle_turns(const Point3& p)
{
    double phi = std::atan2(p.y(), p.x());
    if (phi < 0.0) {
        phi += kTwoPi;
    }
    return phi;
}

/// Piecewise-linear field on a cylinder mesh, looked up in the unrolled
/// (R phi, z) chart through a uniform bucket grid.
class CylinderChartField {
public:
    CylinderChartField(const TriMesh& mesh, double radius, const Vector& u1, const Vector& u2)
        : radius_(radius)
        , u1_(u1)
        , u2_(u2)
    {
        double z_min = std::numeric_limits<double>::infinity();
        double z_max = -z_min;
        for (const auto& f : mesh.faces()) {
            ChartTriangle t;
            t.ids = f;
            for (int k = 0; k < 3; ++k) {
                const Point3& p = mesh.vertex(f[static_cast<std::size_t>(k)]);
                t.s[static_cast<std::size_t>(k)] = radius * angle_turns(p);
                t.z[static_cast<std::size_t>(k)] = p.z();
                z_min = std::min(z_min, p.z());
                z_max = std::max(z_max, p.z());
            }
            // Unwrap triangles straddling phi = 0 so they are contiguous in s.
            const double s_max = *std::max_element(t.s.begin(), t.s.end());
            for (auto& s : t.s) {
                if (s_max - s > std::numbers::pi * radius) {
                    s += kTwoPi * radius;
                }
            }
            triangles_.push_back(t);
        }
        s_extent_ = 2.0 * kTwoPi * radius;
        z_min_ = z_min;
        z_extent_ = std::max(z_max - z_min, 1e-12);
        const auto cells = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(triangles_.size()))));
        ns_ = std::max<std::size_t>(1, 2 * cells);
        nz_ = std::max<std::size_t>(1, cells);
        grid_.assign(ns_ * nz_, {});
        for (std::size_t i = 0; i < triangles_.size(); ++i) {
            const auto& t = triangles_[i];
            const auto [s0, s1] = std::minmax({t.s[0], t.s[1], t.s[2]});
            const auto [z0, z1] = std::minmax({t.z[0], t.z[1], t.z[2]});
            for (std::size_t a = s_cell(s0); a <= s_cell(s1); ++a) {
                for (std::size_t b = z_cell(z0); b <= z_cell(z1); ++b) {
                    grid_[a * nz_ + b].push_back(i);
                }
            }
        }
    }

    struct Sample {
        double u1;
        double u2;
        Point3 grad_u1;
    };

    [[nodiscard]] Sample at(const Point3& p) const
    {
        const double s = radius_ * angle_turns(p);
        const double z = std::clamp(p.z(), z_min_, z_min_ + z_extent_);
        const ChartTriangle* best = nullptr;
        std::array<double, 3> best_bary{};
        double best_score = -std::numeric_limits<double>::infinity();
        for (double shift : {0.0, kTwoPi * radius_}) {
            const double ss = s + shift;
            for (std::size_t id : grid_[s_cell(ss) * nz_ + z_cell(z)]) {
                const auto& t = triangles_[id];
                const auto bary = barycentric(t, ss, z);
                const double score = std::min({bary[0], bary[1], bary[2]});
                if (score > best_score) {
                    best_score = score;
                    best = &t;
                    best_bary = bary;
                }
            }
        }
        if (best == nullptr) {
            raise(ErrorCode::kOutsideReach, "point not covered by the reference mesh");
        }
        Sample out{0.0, 0.0, Point3::Zero()};
        double gs = 0.0, gz = 0.0;
        const double det = (best->s[1] - best->s[0]) * (best->z[2] - best->z[0]) -
                           (best->s[2] - best->s[0]) * (best->z[1] - best->z[0]);
        for (int k = 0; k < 3; ++k) {
            const auto idx = static_cast<std::size_t>(k);
            const Index v = best->ids[idx];
            out.u1 += best_bary[idx] * u1_[v];
            out.u2 += best_bary[idx] * u2_[v];
            // Gradient of the chart-linear interpolant.
            const auto j = static_cast<std::size_t>((k + 1) % 3);
            const auto l = static_cast<std::size_t>((k + 2) % 3);
            gs += u1_[v] * (best->z[j] - best->z[l]) / det;
            gz += u1_[v] * (best->s[l] - best->s[j]) / det;
        }
        const double phi = s / radius_;
        out.grad_u1 = gs * Point3(-std::sin(phi), std::cos(phi), 0.0) + gz * Point3::UnitZ();
        return out;
    }

private:
    struct ChartTriangle {
        Face ids{};
        std::array<double, 3> s{};
        std::array<double, 3> z{};
    };

    static std::array<double, 3> barycentric(const ChartTriangle& t, double s, double z)
    {
        const double det = (t.s[1] - t.s[0]) * (t.z[2] - t.z[0]) - (t.s[2] - t.s[0]) * (t.z[1] - t.z[0]);
        const double l1 = ((s - t.s[0]) * (t.z[2] - t.z[0]) - (t.s[2] - t.s[0]) * (z - t.z[0])) / det;
        const double l2 = ((t.s[1] - t.s[0]) * (z - t.z[0]) - (s - t.s[0]) * (t.z[1] - t.z[0])) / det;
        return {1.0 - l1 - l2, l1, l2};
    }

    [[nodiscard]] std::size_t s_cell(double s) const
    {
        const double t = std::clamp(s / s_extent_, 0.0, 1.0);
        return std::min(ns_ - 1, static_cast<std::size_t>(t * static_cast<double>(ns_)));
    }

    [[nodiscard]] std::size_t z_cell(double z) const
    {
        const double t = std::clamp((z - z_min_) / z_extent_, 0.0, 1.0);
        return std::min(nz_ - 1, static_cast<std::size_t>(t * static_cast<double>(nz_)));
    }

    double radius_;
    Vector u1_;
    Vector u2_;
    std::vector<ChartTriangle> triangles_;
    std::vector<std::vector<std::size_t>> grid_;
    std::size_t ns_ = 1;
    std::size_t nz_ = 1;
    double s_extent_ = 1.0;
    double z_min_ = 0.0;
    double z_extent_ = 1.0;
};

} // namespace

std::string_view to_string(StudyCase kind)
{
    switch (kind) {
    case StudyCase::kCap: return "cap";
    case StudyCase::kSphere: return "sphere";
    case StudyCase::kLantern: return "lantern";
    }
    return "unknown";
}

StudyConfig StudyConfig::defaults(StudyCase kind, LanternCoupling coupling)
{
    StudyConfig c;
    c.kind = kind;
    c.coupling = coupling;
    switch (kind) {
    case StudyCase::kCap: c.levels = {8, 16, 32, 64}; break;
    case StudyCase::kSphere: c.levels = {2, 3, 4, 5}; break;
    case StudyCase::kLantern:
        c.levels = coupling == LanternCoupling::kLinear ? std::vector<int>{8, 16, 32, 64} : std::vector<int>{4, 6, 8, 11};
        break;
    }
    return c;
}

void StudyConfig::validate(std::size_t min_levels) const
{
    if (levels.size() < min_levels) {
        raise(ErrorCode::kConfig, fmt::format("need at least {} levels (got {})", min_levels, levels.size()));
    }
    if (!(tol > 0.0 && tol <= 1e-4)) {
        raise(ErrorCode::kConfig, fmt::format("tol must lie in (0, 1e-4] (got {})", tol));
    }
    if (quad_order != 2 && quad_order != 4) {
        raise(ErrorCode::kConfig, fmt::format("quad order must be 2 or 4 (got {})", quad_order));
    }
    if (!(radius > 0.0)) {
        raise(ErrorCode::kConfig, fmt::format("radius must be positive (got {})", radius));
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (levels[i] <= levels[i - 1]) {
            raise(ErrorCode::kConfig, "levels must be strictly increasing");
        }
    }
    switch (kind) {
    case StudyCase::kCap:
        if (!(theta0 > 0.0 && theta0 < std::numbers::pi)) {
            raise(ErrorCode::kConfig, fmt::format("theta0 must lie in (0, pi) (got {})", theta0));
        }
        if (!levels.empty() && levels.front() < 2) {
            raise(ErrorCode::kConfig, "cap ring counts must be >= 2");
        }
        break;
    case StudyCase::kSphere:
        if (degree < 1 || std::abs(order) > degree) {
            raise(ErrorCode::kConfig, fmt::format("need l >= 1 and |m| <= l (got l={}, m={})", degree, order));
        }
        if (!levels.empty() && levels.front() < 0) {
            raise(ErrorCode::kConfig, "subdivision levels must be >= 0");
        }
        break;
    case StudyCase::kLantern:
        if (!(height > 0.0)) {
            raise(ErrorCode::kConfig, fmt::format("height must be positive (got {})", height));
        }
        if (!levels.empty() && (levels.front() < 2 || lantern_equator_count(coupling, levels.front()) < 3)) {
            raise(ErrorCode::kConfig, "lantern axial counts must be >= 2");
        }
        if (reference == LanternReference::kHighResolution && reference_n < 2) {
            raise(ErrorCode::kConfig, "reference_n must be >= 2");
        }
        break;
    }
}

std::string StudyConfig::label() const
{
    if (kind == StudyCase::kLantern) {
        return fmt::format("lantern-{}", to_string(coupling));
    }
    return std::string(to_string(kind));
}

SurfaceCase StudyConfig::surface() const
{
    switch (kind) {
    case StudyCase::kCap: return cap_case(radius, theta0);
    case StudyCase::kSphere: return sphere_case(radius, degree, order);
    case StudyCase::kLantern: return cylinder_case(radius, height);
    }
    raise(ErrorCode::kConfig, "unknown study case");
}

RefinementFamily StudyConfig::family() const
{
    return RefinementFamily{surface(), levels, coupling};
}

MixedSolution solve_biharmonic(const TriMesh& mesh, const NodalField& f, MassMode mass_mode, double tol)
{
    if (mesh.is_closed()) {
        return solve_mixed_closed(mesh, f, tol, mass_mode);
    }
    if (mass_mode == MassMode::kLumped) {
        return solve_mixed_lumped_schur(mesh, f, tol);
    }
    return solve_mixed_dirichlet(mesh, f, tol);
}

LevelResult run_level(const StudyConfig& config, std::size_t level_index, const SurfaceCase& reference)
{
    const RefinementFamily family = config.family();
    TriMesh mesh = family.mesh(level_index);
    const NodalField f = interpolate(mesh, family.surface.exact_f);
    MixedSolution solution = solve_biharmonic(mesh, f, config.mass_mode, config.tol);

    ErrorRecord r;
    r.level = config.levels[level_index];
    r.h = max_edge_length(mesh);
    r.dofs = mesh.num_vertices();
    r.interior_dofs = mesh.num_vertices() - mesh.boundary_vertices().size();
    r.l2_u1 = l2_error(mesh, solution.u1, reference.exact_u, reference, config.quad_order);
    r.h1_u1 = h1_error(mesh, solution.u1, reference.exact_grad_u, reference, config.quad_order);
    r.l2_u2 = l2_error(mesh, solution.u2, reference.exact_lap_u, reference, config.quad_order);
    r.quality = certify_quality(mesh, family.surface);
    return {std::move(mesh), std::move(solution), r};
}

ErrorRecord measure_quality(const StudyConfig& config, std::size_t level_index)
{
    const RefinementFamily family = config.family();
    const TriMesh mesh = family.mesh(level_index);
    ErrorRecord r;
    r.level = config.levels[level_index];
    r.h = max_edge_length(mesh);
    r.dofs = mesh.num_vertices();
    r.interior_dofs = mesh.num_vertices() - mesh.boundary_vertices().size();
    r.quality = certify_quality(mesh, family.surface);
    return r;
}

SurfaceCase interpolated_reference(const SurfaceCase& cylinder, const TriMesh& mesh, const MixedSolution& solution)
{
    if (cylinder.kind != SurfaceKind::kCylinder) {
        raise(ErrorCode::kInvalidInput, "interpolated references are only supported on cylinders");
    }
    auto field = std::make_shared<const CylinderChartField>(mesh, cylinder.radius, solution.u1.values,
                                                            solution.u2.values);
    SurfaceCase ref = cylinder;
    ref.exact_u = [field](const Point3& p) { return field->at(p).u1; };
    ref.exact_lap_u = [field](const Point3& p) { return field->at(p).u2; };
    ref.exact_grad_u = [field](const Point3& p) { return field->at(p).grad_u1; };
    return ref;
}

SurfaceCase study_reference(const StudyConfig& config)
{
    const SurfaceCase surface = config.surface();
    if (config.kind != StudyCase::kLantern || config.reference == LanternReference::kExact) {
        return surface;
    }
    const TriMesh fine = gen_schwarz_lantern(2 * config.reference_n, config.reference_n, config.radius, config.height);
    const MixedSolution solution =
        solve_biharmonic(fine, interpolate(fine, surface.exact_f), config.mass_mode, config.tol);
    return interpolated_reference(surface, fine, solution);
}

unsigned study_threads()
{
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BIHARM_THREADS"); env != nullptr && *env != '\0') {
        try {
            const int requested = std::stoi(env);
            if (requested >= 1) {
                threads = std::min(threads, static_cast<unsigned>(requested));
            }
        } catch (const std::exception&) {
            // Unparseable values leave the default in place.
        }
    }
    return threads;
}

ConvergenceReport run_study(const StudyConfig& config)
{
    config.validate(3);
    const SurfaceCase reference = study_reference(config);
    std::vector<ErrorRecord> records(config.levels.size());
    parallel_for(config.levels.size(), study_threads(),
                 [&](std::size_t i) { records[i] = run_level(config, i, reference).record; });
    return fit_rates(std::move(records), config.label());
}

ConvergenceReport run_quality_study(const StudyConfig& config)
{
    config.validate(3);
    std::vector<ErrorRecord> records(config.levels.size());
    parallel_for(config.levels.size(), study_threads(),
                 [&](std::size_t i) { records[i] = measure_quality(config, i); });
    return fit_rates(std::move(records), config.label());
}

std::vector<GateCheck> acceptance_gate(const StudyConfig& config, const ConvergenceReport& report)
{
    const auto slope = [&](std::string_view norm) { return report.rate(norm).slope; };
    switch (config.kind) {
    case StudyCase::kCap:
        return {
            {"l2_u1", slope("l2_u1"), 0.85, true},
            {"h1_u1", slope("h1_u1"), 0.60, true},
            {"l2_u2", slope("l2_u2"), 0.40, true},
        };
    case StudyCase::kSphere:
        return {
            {"l2_u1", slope("l2_u1"), 1.8, true},
            {"h1_u1", slope("h1_u1"), 0.9, true},
            {"l2_u2", slope("l2_u2"), 1.8, true},
        };
    case StudyCase::kLantern:
        if (config.coupling == LanternCoupling::kLinear) {
            return {
                {"l2_u1", slope("l2_u1"), 0.85, true},
                {"l2_u2", slope("l2_u2"), 0.40, true},
            };
        }
        return {
            {"l2_u2", slope("l2_u2"), kNonConvergentSlope, false},
            {"epsilon", report.epsilon.slope, 0.3, false},
        };
    }
    return {};
}

} // namespace biharm
