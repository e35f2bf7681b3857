#include "biharm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "biharm/error.hpp"
#include "biharm/quadrature.hpp"

namespace biharm {

namespace {

constexpr std::string_view kReportHeader =
    "case,level,h,dofs,l2_u1,h1_u1,l2_u2,kappa_min,K_max,max_dist,max_normal_angle";

void check_field(const TriMesh& mesh, const NodalField& u)
{
    if (u.size() != mesh.num_vertices()) {
        raise(ErrorCode::kDimensionMismatch,
              fmt::format("field has {} values, mesh has {} vertices", u.size(), mesh.num_vertices()));
    }
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    return cells;
}

} // namespace

const RateFit& ConvergenceReport::rate(std::string_view norm) const
{
    for (const auto& r : fitted_rates) {
        if (r.norm == norm) {
            return r;
        }
    }
    if (norm == "gamma") {
        return gamma;
    }
    if (norm == "epsilon") {
        return epsilon;
    }
    raise(ErrorCode::kInvalidInput, fmt::format("no fitted rate named '{}'", norm));
}

double l2_error(const TriMesh& mesh, const NodalField& u_h, const SurfaceScalar& exact, const SurfaceCase& surface,
                int quad_order)
{
    check_field(mesh, u_h);
    const auto rule = triangle_rule(quad_order);
    double sum = 0.0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.faces()[f];
        const double area = mesh.geometry(static_cast<Index>(f)).area;
        const Point3& a = mesh.vertex(face[0]);
        const Point3& b = mesh.vertex(face[1]);
        const Point3& c = mesh.vertex(face[2]);
        double face_sum = 0.0;
        for (const auto& q : rule) {
            const Point3 x = barycentric_point(a, b, c, q);
            const double uh = q.barycentric[0] * u_h.values[face[0]] + q.barycentric[1] * u_h.values[face[1]] +
                              q.barycentric[2] * u_h.values[face[2]];
            const double diff = uh - exact(surface.closest_point(x));
            face_sum += q.weight * diff * diff;
        }
        sum += area * face_sum;
    }
    return std::sqrt(sum);
}

double l2_error(const TriMesh& mesh, const NodalField& u_h, const SurfaceCase& surface, int quad_order)
{
    return l2_error(mesh, u_h, surface.exact_u, surface, quad_order);
}

double h1_error(const TriMesh& mesh, const NodalField& u_h, const SurfaceVector& exact_grad,
                const SurfaceCase& surface, int quad_order)
{
    check_field(mesh, u_h);
    const auto rule = triangle_rule(quad_order);
    double sum = 0.0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const auto fi = static_cast<Index>(f);
        const Face& face = mesh.faces()[f];
        const auto& g = mesh.geometry(fi);
        const Point3 grad_h = p1_gradient(mesh, u_h, fi);
        const Point3& a = mesh.vertex(face[0]);
        const Point3& b = mesh.vertex(face[1]);
        const Point3& c = mesh.vertex(face[2]);
        double face_sum = 0.0;
        for (const auto& q : rule) {
            const Point3 x = barycentric_point(a, b, c, q);
            Point3 grad = exact_grad(surface.closest_point(x));
            grad -= grad.dot(g.unit_normal) * g.unit_normal;
            face_sum += q.weight * (grad_h - grad).squaredNorm();
        }
        sum += g.area * face_sum;
    }
    return std::sqrt(sum);
}

double h1_error(const TriMesh& mesh, const NodalField& u_h, const SurfaceCase& surface, int quad_order)
{
    return h1_error(mesh, u_h, surface.exact_grad_u, surface, quad_order);
}

QualityRecord certify_quality(const TriMesh& mesh, const SurfaceCase& surface)
{
    QualityRecord q;
    q.kappa_min = std::numeric_limits<double>::infinity();
    const auto rule = triangle_rule(4);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const auto& g = mesh.geometry(static_cast<Index>(f));
        const double longest = g.longest_edge();
        q.kappa_min = std::min(q.kappa_min, g.inradius / longest);
        q.K_max = std::max(q.K_max, g.circumradius / longest);

        const Face& face = mesh.faces()[f];
        const Point3& a = mesh.vertex(face[0]);
        const Point3& b = mesh.vertex(face[1]);
        const Point3& c = mesh.vertex(face[2]);
        const auto sample = [&](const Point3& x) {
            q.max_distance = std::max(q.max_distance, (x - surface.closest_point(x)).norm());
            const double cosine = std::min(1.0, std::abs(g.unit_normal.dot(surface.normal_at(x))));
            q.max_normal_angle = std::max(q.max_normal_angle, std::acos(cosine));
        };
        for (const auto& qp : rule) {
            sample(barycentric_point(a, b, c, qp));
        }
        sample((a + b + c) / 3.0);
        sample(a);
        sample(b);
        sample(c);
    }
    return q;
}

RateFit fit_power_law(std::string norm, const std::vector<double>& h, const std::vector<double>& values)
{
    if (h.size() != values.size()) {
        raise(ErrorCode::kDimensionMismatch, "fit_power_law: h and values differ in length");
    }
    RateFit fit{std::move(norm), std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    const std::size_t n = h.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(h[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i])) {
            return fit;
        }
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(h[i]);
        my += std::log(values[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(h[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(values[i]) - my);
    }
    fit.slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double predicted = my + fit.slope * (std::log(h[i]) - mx);
        const double r = std::log(values[i]) - predicted;
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

std::size_t fit_window(std::size_t levels)
{
    return std::min(levels, (levels + 1) / 2 + 1);
}

ConvergenceReport fit_rates(std::vector<ErrorRecord> records, std::string case_name)
{
    if (records.size() < 3) {
        raise(ErrorCode::kInsufficientLevels, fmt::format("need at least 3 levels to fit rates (got {})", records.size()));
    }
    // Coarse to fine.
    std::stable_sort(records.begin(), records.end(),
                     [](const ErrorRecord& a, const ErrorRecord& b) { return a.h > b.h; });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].h == records[i - 1].h) {
            raise(ErrorCode::kInvalidInput, fmt::format("two levels share h = {}", records[i].h));
        }
    }

    ConvergenceReport report;
    report.case_name = std::move(case_name);
    report.records = std::move(records);

    const std::size_t window = fit_window(report.records.size());
    const auto first = report.records.end() - static_cast<std::ptrdiff_t>(window);
    std::vector<double> h, l2u1, h1u1, l2u2, dist, angle;
    for (auto it = first; it != report.records.end(); ++it) {
        h.push_back(it->h);
        l2u1.push_back(it->l2_u1);
        h1u1.push_back(it->h1_u1);
        l2u2.push_back(it->l2_u2);
        dist.push_back(it->quality.max_distance);
        angle.push_back(it->quality.max_normal_angle);
    }
    report.fitted_rates = {
        fit_power_law("l2_u1", h, l2u1),
        fit_power_law("h1_u1", h, h1u1),
        fit_power_law("l2_u2", h, l2u2),
    };
    report.gamma = fit_power_law("gamma", h, dist);
    report.epsilon = fit_power_law("epsilon", h, angle);
    report.sigma_estimate = std::min(report.gamma.slope, 2.0 * report.epsilon.slope);
    return report;
}

void write_report_csv(std::ostream& out, const ConvergenceReport& report)
{
    out << kReportHeader << '\n';
    for (const auto& r : report.records) {
        out << fmt::format("{},{},{:.12g},{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n",
                           report.case_name, r.level, r.h, r.dofs, r.l2_u1, r.h1_u1, r.l2_u2, r.quality.kappa_min,
                           r.quality.K_max, r.quality.max_distance, r.quality.max_normal_angle);
    }
}

std::vector<ErrorRecord> read_report_csv(std::istream& in, std::string* case_name)
{
    std::string line;
    if (!std::getline(in, line) || line != kReportHeader) {
        raise(ErrorCode::kIo, "report CSV: missing or unexpected header");
    }
    std::vector<ErrorRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 11) {
            raise(ErrorCode::kIo, fmt::format("report CSV line {}: expected 11 fields, got {}", line_no, cells.size()));
        }
        try {
            ErrorRecord r;
            if (case_name != nullptr) {
                *case_name = cells[0];
            }
            r.level = std::stoi(cells[1]);
            r.h = std::stod(cells[2]);
            r.dofs = static_cast<std::size_t>(std::stoull(cells[3]));
            r.l2_u1 = std::stod(cells[4]);
            r.h1_u1 = std::stod(cells[5]);
            r.l2_u2 = std::stod(cells[6]);
            r.quality.kappa_min = std::stod(cells[7]);
            r.quality.K_max = std::stod(cells[8]);
            r.quality.max_distance = std::stod(cells[9]);
            r.quality.max_normal_angle = std::stod(cells[10]);
            records.push_back(r);
        } catch (const std::exception& e) {
            raise(ErrorCode::kIo, fmt::format("report CSV line {}: {}", line_no, e.what()));
        }
    }
    return records;
}

void write_quality_csv(std::ostream& out, const std::string& case_name, const std::vector<ErrorRecord>& records)
{
    out << "case,level,h,kappa_min,K_max,max_dist,max_normal_angle\n";
    for (const auto& r : records) {
        out << fmt::format("{},{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", case_name, r.level, r.h,
                           r.quality.kappa_min, r.quality.K_max, r.quality.max_distance, r.quality.max_normal_angle);
    }
}

} // namespace biharm
