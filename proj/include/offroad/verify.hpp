#pragma once

#include "offroad/ipm.hpp"
#include "offroad/model.hpp"
#include "offroad/scenario.hpp"
#include "offroad/tunnel.hpp"

namespace offroad {

struct VerificationTolerances {
    double clearance = 1e-6;  // allowed disc penetration below R_c (m)
    double bounds = 1e-6;     // allowed bound overshoot
    double boundary = 1e-4;   // allowed endpoint mismatch (heading wrapped)
    double defect = 1e-6;     // allowed per-component integration defect
    double tunnel = 1e-6;     // allowed halfspace overshoot (m, unit normals)
};

// Independent re-check of a solution against the nominal constraints: disc
// clearance against the raw obstacle points (not the tunnels), variable
// bounds, endpoint conditions, re-integrated dynamics defects, and tunnel
// membership of the assigned nodes.
struct VerificationReport {
    bool clearance_ok = false;
    bool bounds_ok = false;
    bool boundary_ok = false;
    bool defects_ok = false;
    bool tunnel_ok = false;

    double worst_clearance = 0.0;  // min over nodes of (obstacle distance - R_c)
    double worst_bound = 0.0;      // max bound violation (negative = margin)
    double worst_boundary = 0.0;   // max endpoint mismatch
    double worst_defect = 0.0;     // max |defect component|
    double worst_tunnel = 0.0;     // max halfspace value (negative = inside)

    bool all_ok() const {
        return clearance_ok && bounds_ok && boundary_ok && defects_ok && tunnel_ok;
    }
};

VerificationReport verify(const NlpSolution& sol, const Scenario& scenario,
                          const TunnelSet& tunnels, const DiscGeometry& g,
                          const VerificationTolerances& tol = {});

}  // namespace offroad
