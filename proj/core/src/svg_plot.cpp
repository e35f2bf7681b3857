#include "biharm/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace biharm {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 60.0;

constexpr std::array<const char*, 3> kColors{"#1f77b4", "#d62728", "#2ca02c"};

struct LogAxes {
    double x_lo, x_hi, y_lo, y_hi; // decades

    [[nodiscard]] double px(double h) const
    {
        return kMarginLeft + (std::log10(h) - x_lo) / (x_hi - x_lo) * (kWidth - kMarginLeft - kMarginRight);
    }
    [[nodiscard]] double py(double v) const
    {
        return kHeight - kMarginBottom -
               (std::log10(v) - y_lo) / (y_hi - y_lo) * (kHeight - kMarginTop - kMarginBottom);
    }
};

double error_of(const ErrorRecord& r, std::size_t norm)
{
    switch (norm) {
    case 0: return r.l2_u1;
    case 1: return r.h1_u1;
    default: return r.l2_u2;
    }
}

} // namespace

std::string render_convergence_svg(const ConvergenceReport& report, const std::vector<double>& guide_slopes)
{
    double h_min = std::numeric_limits<double>::infinity(), h_max = 0.0;
    double e_min = std::numeric_limits<double>::infinity(), e_max = 0.0;
    for (const auto& r : report.records) {
        h_min = std::min(h_min, r.h);
        h_max = std::max(h_max, r.h);
        for (std::size_t k = 0; k < 3; ++k) {
            const double e = error_of(r, k);
            if (e > 0.0) {
                e_min = std::min(e_min, e);
                e_max = std::max(e_max, e);
            }
        }
    }
    if (!(h_min > 0.0) || !(e_min > 0.0) || !std::isfinite(e_min)) {
        h_min = 0.1, h_max = 1.0, e_min = 0.1, e_max = 1.0;
    }
    const LogAxes axes{std::floor(std::log10(h_min)), std::ceil(std::log10(h_max) + 1e-12),
                       std::floor(std::log10(e_min)), std::ceil(std::log10(e_max) + 1e-12)};

    std::string svg;
    svg += fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
                       kMarginLeft, report.case_name);

    // Frame and decade ticks.
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kMarginTop, y1 = kHeight - kMarginBottom;
    svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
                       "stroke=\"black\"/>\n",
                       x0, y0, x1 - x0, y1 - y0);
    for (double d = axes.x_lo; d <= axes.x_hi + 1e-9; d += 1.0) {
        const double x = axes.px(std::pow(10.0, d));
        svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"#ddd\"/>\n", x,
                           y0, y1);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
                           "text-anchor=\"middle\">1e{:.0f}</text>\n",
                           x, y1 + 16, d);
    }
    for (double d = axes.y_lo; d <= axes.y_hi + 1e-9; d += 1.0) {
        const double y = axes.py(std::pow(10.0, d));
        svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#ddd\"/>\n", x0,
                           y, x1);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
                           "text-anchor=\"end\">1e{:.0f}</text>\n",
                           x0 - 6, y + 4, d);
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\" "
                       "text-anchor=\"middle\">h</text>\n",
                       0.5 * (x0 + x1), kHeight - 20);

    // Guides anchored at the coarsest level of the first norm.
    if (!report.records.empty()) {
        const auto coarse = std::max_element(report.records.begin(), report.records.end(),
                                             [](const ErrorRecord& a, const ErrorRecord& b) { return a.h < b.h; });
        for (std::size_t g = 0; g < guide_slopes.size(); ++g) {
            const double anchor = coarse->l2_u1 > 0.0 ? coarse->l2_u1 : e_max;
            const double ya = axes.py(anchor);
            const double yb = axes.py(anchor * std::pow(h_min / coarse->h, guide_slopes[g]));
            svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"gray\" "
                               "stroke-dasharray=\"4 3\"/>\n",
                               axes.px(coarse->h), ya, axes.px(h_min), yb);
            svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" "
                               "fill=\"gray\">slope {:g}</text>\n",
                               axes.px(h_min) + 4, yb, guide_slopes[g]);
        }
    }

    const std::array<const char*, 3> names{"L2(u1)", "H1(u1)", "L2(u2)"};
    for (std::size_t k = 0; k < 3; ++k) {
        std::string points;
        for (const auto& r : report.records) {
            const double e = error_of(r, k);
            if (e > 0.0) {
                points += fmt::format("{:.1f},{:.1f} ", axes.px(r.h), axes.py(e));
            }
        }
        if (!points.empty()) {
            points.pop_back();
        }
        svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", points,
                           kColors[k]);
        const double ly = kMarginTop + 20.0 * static_cast<double>(k + 1);
        svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" "
                           "stroke-width=\"2\"/>\n",
                           x1 + 12, ly, x1 + 36, kColors[k]);
        const double slope = k < report.fitted_rates.size() ? report.fitted_rates[k].slope : 0.0;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\">{} "
                           "({:.2f})</text>\n",
                           x1 + 40, ly + 4, names[k], slope);
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace biharm
