#pragma once

#include <string>
#include <vector>

#include "biharm/analysis.hpp"

namespace biharm {

/// Log-log plot of every error norm against h, one polyline per norm, with
/// dashed reference lines of the given slopes anchored at the coarsest point.
/// Produces a standalone SVG 1.1 document.
std::string render_convergence_svg(const ConvergenceReport& report, const std::vector<double>& guide_slopes);

} // namespace biharm
