#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "biharm/error.hpp"
#include "biharm/svg_plot.hpp"

namespace biharm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

StudyCase parse_case(const std::string& s)
{
    if (s == "cap") return StudyCase::kCap;
    if (s == "sphere") return StudyCase::kSphere;
    if (s == "lantern") return StudyCase::kLantern;
    raise(ErrorCode::kConfig, fmt::format("unknown case '{}' (expected cap, sphere or lantern)", s));
}

LanternCoupling parse_coupling(const std::string& s)
{
    if (s == "linear") return LanternCoupling::kLinear;
    if (s == "quadratic") return LanternCoupling::kQuadratic;
    raise(ErrorCode::kConfig, fmt::format("unknown coupling '{}' (expected linear or quadratic)", s));
}

MassMode parse_mass(const std::string& s)
{
    if (s == "consistent") return MassMode::kConsistent;
    if (s == "lumped") return MassMode::kLumped;
    raise(ErrorCode::kConfig, fmt::format("unknown mass mode '{}' (expected consistent or lumped)", s));
}

LanternReference parse_reference(const std::string& s)
{
    if (s == "exact") return LanternReference::kExact;
    if (s == "highres") return LanternReference::kHighResolution;
    raise(ErrorCode::kConfig, fmt::format("unknown reference '{}' (expected exact or highres)", s));
}

// Switching case or coupling resets the levels to that family's defaults.
void switch_family(StudyConfig& study, StudyCase kind, LanternCoupling coupling)
{
    if (kind != study.kind || coupling != study.coupling) {
        study.levels = StudyConfig::defaults(kind, coupling).levels;
        study.kind = kind;
        study.coupling = coupling;
    }
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        raise(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
    }
    file << content;
    if (!file) {
        raise(ErrorCode::kIo, fmt::format("write failed for '{}'", path.string()));
    }
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        raise(ErrorCode::kIo, fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    }
}

std::string status_of(double slope)
{
    return std::isfinite(slope) && slope > kNonConvergentSlope ? "ok" : "non-convergent";
}

std::string rates_csv(const ConvergenceReport& report)
{
    std::string s = "norm,slope,residual,status\n";
    for (const auto& r : report.fitted_rates) {
        s += fmt::format("{},{:.12g},{:.12g},{}\n", r.norm, r.slope, r.residual, status_of(r.slope));
    }
    for (const RateFit* r : {&report.gamma, &report.epsilon}) {
        s += fmt::format("{},{:.12g},{:.12g},{}\n", r->norm, r->slope, r->residual, status_of(r->slope));
    }
    return s;
}

std::string quality_rates_csv(const ConvergenceReport& report)
{
    return fmt::format("quantity,value,residual\ngamma,{:.12g},{:.12g}\nepsilon,{:.12g},{:.12g}\nsigma,{:.12g},\n",
                       report.gamma.slope, report.gamma.residual, report.epsilon.slope, report.epsilon.residual,
                       report.sigma_estimate);
}

std::vector<double> guide_slopes(StudyCase kind)
{
    if (kind == StudyCase::kCap) {
        return {1.0, 0.75, 0.5};
    }
    return {2.0, 1.0};
}

TriMesh single_mesh(const Options& options)
{
    if (options.mesh_path) {
        return read_obj(*options.mesh_path);
    }
    const StudyConfig& s = options.study;
    int level = 0;
    if (options.resolution) {
        level = *options.resolution;
    } else if (!s.levels.empty()) {
        level = s.levels.back();
    } else {
        raise(ErrorCode::kConfig, "no mesh resolution given");
    }
    RefinementFamily family{s.surface(), {level}, s.coupling};
    return family.mesh(0);
}

NodalField right_hand_side(const Options& options, const TriMesh& mesh)
{
    switch (options.rhs.kind) {
    case RhsSpec::Kind::kConstant:
        return NodalField(Vector::Constant(static_cast<Eigen::Index>(mesh.num_vertices()), options.rhs.value));
    case RhsSpec::Kind::kHarmonic: {
        const int l = options.rhs.degree, m = options.rhs.order;
        return interpolate(mesh, [l, m](const Point3& p) {
            const double r = p.norm();
            return r > 0.0 ? spherical_harmonic(l, m, p / r) : 0.0;
        });
    }
    case RhsSpec::Kind::kExact: break;
    }
    const SurfaceCase surface = options.study.surface();
    return interpolate(mesh, [&surface](const Point3& p) { return surface.exact_f(surface.closest_point(p)); });
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::kNotConverged:
    case ErrorCode::kSingular: return kExitNumerical;
    default: return kExitUsage;
    }
}

} // namespace

RhsSpec parse_rhs(const std::string& text)
{
    RhsSpec spec;
    if (text == "exact") {
        return spec;
    }
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
        std::size_t used = 0;
        if (head == "const" && !tail.empty()) {
            spec.kind = RhsSpec::Kind::kConstant;
            spec.value = std::stod(tail, &used);
            if (used == tail.size() && std::isfinite(spec.value)) {
                return spec;
            }
        } else if (head == "harmonic") {
            const auto comma = tail.find(',');
            if (comma != std::string::npos) {
                spec.kind = RhsSpec::Kind::kHarmonic;
                const std::string ls = tail.substr(0, comma), ms = tail.substr(comma + 1);
                std::size_t used_m = 0;
                spec.degree = std::stoi(ls, &used);
                spec.order = std::stoi(ms, &used_m);
                if (used == ls.size() && used_m == ms.size() && spec.degree >= 0 &&
                    std::abs(spec.order) <= spec.degree) {
                    return spec;
                }
            }
        }
    } catch (const std::exception&) {
        // fall through to the error below
    }
    raise(ErrorCode::kConfig, fmt::format("bad --rhs '{}' (expected exact, const:VALUE or harmonic:l,m)", text));
}

void apply_json_config(Options& options, const fs::path& path)
{
    std::ifstream file(path);
    if (!file) {
        raise(ErrorCode::kConfig, fmt::format("cannot open config file '{}'", path.string()));
    }
    const auto fail = [&](const std::string& what) {
        raise(ErrorCode::kConfig, fmt::format("config file '{}': {}", path.string(), what));
    };
    json doc;
    try {
        doc = json::parse(file);
    } catch (const json::exception& e) {
        fail(e.what());
    }
    if (!doc.is_object()) {
        fail("top level must be an object");
    }

    StudyConfig& s = options.study;
    try {
        StudyCase kind = s.kind;
        LanternCoupling coupling = s.coupling;
        if (doc.contains("case")) kind = parse_case(doc.at("case").get<std::string>());
        if (doc.contains("coupling")) coupling = parse_coupling(doc.at("coupling").get<std::string>());
        switch_family(s, kind, coupling);

        for (const auto& [key, value] : doc.items()) {
            if (key == "case" || key == "coupling") continue;
            if (key == "levels") s.levels = value.get<std::vector<int>>();
            else if (key == "theta0") s.theta0 = value.get<double>();
            else if (key == "degree") s.degree = value.get<int>();
            else if (key == "order") s.order = value.get<int>();
            else if (key == "radius") s.radius = value.get<double>();
            else if (key == "height") s.height = value.get<double>();
            else if (key == "reference") s.reference = parse_reference(value.get<std::string>());
            else if (key == "reference_n") s.reference_n = value.get<int>();
            else if (key == "mass_mode") s.mass_mode = parse_mass(value.get<std::string>());
            else if (key == "tol") s.tol = value.get<double>();
            else if (key == "quad_order") s.quad_order = value.get<int>();
            else if (key == "output_dir") s.output_dir = value.get<std::string>();
            else fail(fmt::format("unknown key '{}'", key));
        }
    } catch (const json::exception& e) {
        fail(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kConfig && std::string_view(e.what()).find(path.string()) != std::string_view::npos) {
            throw;
        }
        fail(e.what());
    }
}

int cmd_solve(const Options& options, std::ostream& out, std::ostream& err)
{
    const StudyConfig& s = options.study;
    s.validate(0);
    const TriMesh mesh = single_mesh(options);
    const NodalField f = right_hand_side(options, mesh);
    const MixedSolution sol = solve_biharmonic(mesh, f, s.mass_mode, s.tol);

    ensure_dir(s.output_dir);
    std::string csv = "vertex,u1,u2\n";
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        const auto i = static_cast<Eigen::Index>(v);
        csv += fmt::format("{},{:.12g},{:.12g}\n", v, sol.u1.values[i], sol.u2.values[i]);
    }
    write_file(s.output_dir / "solution.csv", csv);
    if (options.write_mesh) {
        write_obj(mesh, s.output_dir / "mesh.obj");
    }

    out << fmt::format("{} vertices, {} faces, {}\n", mesh.num_vertices(), mesh.num_faces(),
                       mesh.is_closed() ? "closed" : "with boundary");
    out << fmt::format("max u1 = {:.6g}, max |u2| = {:.6g}, relative residual = {:.3g}\n", sol.u1.values.maxCoeff(),
                       sol.u2.values.cwiseAbs().maxCoeff(), sol.solve_report.relative_residual);
    if (mesh.is_closed() && sol.removed_mean != 0.0) {
        err << fmt::format("note: removed mean {:.6g} from the right-hand side\n", sol.removed_mean);
    }
    return kExitOk;
}

int cmd_converge(const Options& options, std::ostream& out, std::ostream& err)
{
    const StudyConfig& s = options.study;
    const ConvergenceReport report = run_study(s);

    ensure_dir(s.output_dir);
    std::ostringstream csv;
    write_report_csv(csv, report);
    write_file(s.output_dir / "report.csv", csv.str());
    write_file(s.output_dir / "rates.csv", rates_csv(report));
    write_file(s.output_dir / "plot.svg", render_convergence_svg(report, guide_slopes(s.kind)));

    out << fmt::format("{}: ", report.case_name);
    for (const auto& r : report.fitted_rates) {
        out << fmt::format("{} {:.3f} ({})  ", r.norm, r.slope, status_of(r.slope));
    }
    out << '\n';

    if (!options.check) {
        return kExitOk;
    }
    bool all = true;
    for (const GateCheck& g : acceptance_gate(s, report)) {
        out << fmt::format("{} {} = {:.3f} {} {:.2f}\n", g.passed() ? "PASS" : "FAIL", g.name, g.value,
                           g.lower_bound ? ">=" : "<=", g.bound);
        all = all && g.passed();
    }
    if (!all) {
        err << "acceptance gate failed\n";
        return kExitGate;
    }
    return kExitOk;
}

int cmd_quality(const Options& options, std::ostream& out, std::ostream& err)
{
    const StudyConfig& s = options.study;
    s.validate(0);
    ensure_dir(s.output_dir);

    std::vector<ErrorRecord> records;
    std::optional<ConvergenceReport> report;
    if (options.mesh_path) {
        const TriMesh mesh = read_obj(*options.mesh_path);
        ErrorRecord r;
        r.h = max_edge_length(mesh);
        r.dofs = mesh.num_vertices();
        r.quality = certify_quality(mesh, s.surface());
        records.push_back(r);
    } else if (s.levels.size() >= 3) {
        report = run_quality_study(s);
        records = report->records;
    } else {
        for (std::size_t i = 0; i < s.levels.size(); ++i) {
            records.push_back(measure_quality(s, i));
        }
    }

    std::ostringstream csv;
    write_quality_csv(csv, s.label(), records);
    write_file(s.output_dir / "quality.csv", csv.str());
    for (const auto& r : records) {
        out << fmt::format("level {}: kappa_min {:.4f}  K_max {:.4f}  max_dist {:.3e}  max_normal_angle {:.3e}\n",
                           r.level, r.quality.kappa_min, r.quality.K_max, r.quality.max_distance,
                           r.quality.max_normal_angle);
    }
    if (report) {
        write_file(s.output_dir / "quality_rates.csv", quality_rates_csv(*report));
        out << fmt::format("gamma {:.3f}  epsilon {:.3f}  sigma {:.3f}\n", report->gamma.slope, report->epsilon.slope,
                           report->sigma_estimate);
        if (!(report->sigma_estimate >= 1.5)) {
            err << fmt::format("warning: sigma estimate {:.3f} is below 3/2\n", report->sigma_estimate);
        }
    }
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Mixed finite elements for the biharmonic equation on triangulated surfaces", "biharm"};
    app.require_subcommand(1);

    std::optional<std::string> config_path, case_name, coupling, mass, mesh, rhs, reference, out_dir;
    std::vector<int> levels;
    std::optional<double> theta0, tol, radius, height;
    std::optional<int> quad, degree, order, n, rings, subdiv, reference_n;
    bool check = false, write_mesh = false;

    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--case", case_name, "cap | sphere | lantern");
    auto* levels_opt = app.add_option("--levels", levels, "Refinement levels, e.g. 8,16,32")->delimiter(',');
    app.add_option("--theta0", theta0, "Cap opening angle in radians");
    app.add_option("--coupling", coupling, "Lantern coupling: linear (m = 2n) | quadratic (m = n^2)");
    app.add_option("--mass", mass, "consistent | lumped");
    app.add_option("--tol", tol, "Relative residual tolerance");
    app.add_option("--quad", quad, "Error quadrature order (2 or 4)");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--R", radius, "Radius");
    app.add_option("--H", height, "Lantern height");
    app.add_option("--degree,--l", degree, "Sphere harmonic degree");
    app.add_option("--order,--m", order, "Sphere harmonic order");
    app.add_option("--reference", reference, "Lantern reference: exact | highres");
    app.add_option("--reference-n", reference_n, "Axial count of the high-resolution lantern");
    app.add_flag("--check", check, "Exit with 4 if the acceptance gate fails");

    auto* solve = app.add_subcommand("solve", "Solve on one mesh and write solution.csv");
    solve->add_option("--mesh", mesh, "OBJ mesh to solve on");
    solve->add_option("--rhs", rhs, "exact | const:VALUE | harmonic:l,m");
    solve->add_option("--n", n, "Lantern axial count");
    solve->add_option("--rings", rings, "Cap ring count");
    solve->add_option("--subdiv", subdiv, "Icosphere subdivisions");
    solve->add_flag("--write-mesh", write_mesh, "Also write mesh.obj");
    auto* converge = app.add_subcommand("converge", "Refinement study: report.csv, rates.csv, plot.svg");
    auto* quality = app.add_subcommand("quality", "Mesh quality per level: quality.csv");
    quality->add_option("--mesh", mesh, "OBJ mesh to certify against --case");
    for (auto* sub : {solve, converge, quality}) {
        sub->fallthrough();
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Options options;
        options.study = StudyConfig::defaults(StudyCase::kCap);
        if (config_path) {
            apply_json_config(options, *config_path);
        }
        StudyCase kind = case_name ? parse_case(*case_name) : options.study.kind;
        LanternCoupling cp = coupling ? parse_coupling(*coupling) : options.study.coupling;
        switch_family(options.study, kind, cp);

        StudyConfig& s = options.study;
        if (levels_opt->count() > 0) s.levels = levels;
        if (theta0) s.theta0 = *theta0;
        if (mass) s.mass_mode = parse_mass(*mass);
        if (tol) s.tol = *tol;
        if (quad) s.quad_order = *quad;
        if (out_dir) s.output_dir = *out_dir;
        if (radius) s.radius = *radius;
        if (height) s.height = *height;
        if (degree) s.degree = *degree;
        if (order) s.order = *order;
        if (reference) s.reference = parse_reference(*reference);
        if (reference_n) s.reference_n = *reference_n;

        if (mesh) options.mesh_path = *mesh;
        if (rhs) options.rhs = parse_rhs(*rhs);
        options.check = check;
        options.write_mesh = write_mesh;
        if (n && s.kind == StudyCase::kLantern) options.resolution = *n;
        if (rings && s.kind == StudyCase::kCap) options.resolution = *rings;
        if (subdiv && s.kind == StudyCase::kSphere) options.resolution = *subdiv;

        if (app.got_subcommand(solve)) return cmd_solve(options, out, err);
        if (app.got_subcommand(converge)) return cmd_converge(options, out, err);
        return cmd_quality(options, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace biharm::cli
