#pragma once

#include <filesystem>

#include "offroad/ipm.hpp"
#include "offroad/reference.hpp"
#include "offroad/scenario.hpp"
#include "offroad/tunnel.hpp"

namespace offroad {

// Scene plot: obstacle points with their dilation discs, the dashed
// reference trajectory, the tunnel rectangles, the optimized trajectory and
// the start/goal footprints. Null stages are simply omitted.
void write_plan_svg(const std::filesystem::path& path, const Scenario& scenario,
                    const DiscGeometry& g, const ReferenceTrajectory* ref,
                    const TunnelSet* tunnels, const NlpSolution* sol);

}  // namespace offroad
