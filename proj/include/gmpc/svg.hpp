#pragma once

#include <string>
#include <vector>

#include "gmpc/simkit.hpp"

namespace gmpc {

/// Two-panel line chart: e_p / e_R against time, and the xy path over the reference.
/// Output depends only on its inputs (fixed-precision coordinates).
std::string render_plot_svg(const std::vector<SimRecord> & records, const ReferenceTrajectory & reference);

}  // namespace gmpc
