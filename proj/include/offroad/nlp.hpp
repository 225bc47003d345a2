#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <limits>
#include <utility>
#include <vector>

#include "offroad/geometry.hpp"
#include "offroad/model.hpp"
#include "offroad/reference.hpp"
#include "offroad/tunnel.hpp"

namespace offroad {

struct NlpOptions {
    int ne = 60;                        // finite elements
    double t_min = 0.1;                 // lower bound keeping h = t_f/ne positive [s]
    double margin = 0.0;                // extra tightening of the tunnel rows [m]
    double smooth_weight = 0.0;         // control regularizer weight (0 = pure time)
    bool pin_boundary_controls = false; // also pin (a, omega) at nodes 0 and ne-1

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Direct transcription of the free-final-time trajectory problem.
//
// Decision vector z (n_vars = 5*(ne+1) + 2*ne + 1):
//   states per node k: (x, y, v, phi, theta) at z[5k .. 5k+4], k = 0..ne
//   controls per element k: (a, omega) at z[5*(ne+1) + 2k ..], k = 0..ne-1
//   t_f at z[n_vars-1]
//
// Equalities (= 0): 5*ne forward-Euler defects (element-major, state order),
// then the 10 boundary pins at nodes 0 and ne, then 4 control pins when
// enabled.
//
// Inequalities (<= 0), in order: speed rows 2*(ne+1), steering rows
// 2*(ne+1), acceleration rows 2*ne (omitted entirely when a_max is
// infinite), steering-rate rows 2*ne, tunnel rows (8 per node-rectangle
// pair: 4 front then 4 rear, pairs ordered rectangle-major with interval
// boundary nodes appearing in both neighbors), and finally t_min - t_f.
// Tunnel halfspaces are rescaled to unit normals.
class NlpProblem {
  public:
    using SpMat = Eigen::SparseMatrix<double>;

    NlpProblem(const VehicleParams& vehicle, const BoundaryState& start,
               const BoundaryState& goal, const TunnelSet& tunnels, const DiscGeometry& g,
               const NlpOptions& opts, double terminal_heading_hint);

    int ne() const { return ne_; }
    int n_rects() const { return n_rects_; }
    int n_vars() const { return n_vars_; }
    int n_eq() const { return n_eq_; }
    int n_ineq() const { return n_ineq_; }
    double t_min() const { return opts_.t_min; }
    bool pin_boundary_controls() const { return opts_.pin_boundary_controls; }
    const BoundaryState& start() const { return start_; }
    const BoundaryState& goal() const { return goal_; }
    const VehicleParams& vehicle() const { return vehicle_; }
    const std::vector<std::pair<int, int>>& node_rect_pairs() const { return pairs_; }

    int idx_x(int k) const { return 5 * k; }
    int idx_y(int k) const { return 5 * k + 1; }
    int idx_v(int k) const { return 5 * k + 2; }
    int idx_phi(int k) const { return 5 * k + 3; }
    int idx_theta(int k) const { return 5 * k + 4; }
    int idx_a(int k) const { return 5 * (ne_ + 1) + 2 * k; }
    int idx_omega(int k) const { return 5 * (ne_ + 1) + 2 * k + 1; }
    int idx_tf() const { return n_vars_ - 1; }

    double objective(const Eigen::VectorXd& z) const;
    void objective_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) const;

    void eq_residuals(const Eigen::VectorXd& z, Eigen::VectorXd& r) const;
    void ineq_residuals(const Eigen::VectorXd& z, Eigen::VectorXd& r) const;
    void eq_jacobian(const Eigen::VectorXd& z, SpMat& jac) const;
    void ineq_jacobian(const Eigen::VectorXd& z, SpMat& jac) const;

    // Hessian of sigma*f + y_eq.c_E + y_ineq.c_I, full symmetric pattern.
    void lagrangian_hessian(const Eigen::VectorXd& z, double sigma,
                            const Eigen::VectorXd& y_eq, const Eigen::VectorXd& y_ineq,
                            SpMat& hess) const;

  private:
    VehicleParams vehicle_;
    BoundaryState start_;
    BoundaryState goal_;  // theta unwrapped near the reference terminal heading
    NlpOptions opts_;
    double front_offset_ = 0.0;
    double rear_offset_ = 0.0;
    int ne_ = 0;
    int n_rects_ = 0;
    int n_vars_ = 0;
    int n_eq_ = 0;
    int n_ineq_ = 0;
    int accel_rows_ = 0;
    std::vector<std::pair<int, int>> pairs_;  // (rect, node), rectangle-major
    std::vector<std::array<HalfspaceCoeffs, 4>> half_f_;  // unit-normal rows
    std::vector<std::array<HalfspaceCoeffs, 4>> half_r_;
};

// Builds the problem from a scenario's pieces. The goal heading is shifted
// by a multiple of 2*pi toward terminal_heading_hint (pass NaN to keep it
// as given). Throws when ne is not a positive multiple of the tunnel count
// or the tunnel set is empty.
NlpProblem transcribe(const VehicleParams& vehicle, const BoundaryState& start,
                      const BoundaryState& goal, const TunnelSet& tunnels,
                      const DiscGeometry& g, const NlpOptions& opts,
                      double terminal_heading_hint = std::numeric_limits<double>::quiet_NaN());

// Packs the reference into a decision vector. A single-sample reference is
// replicated across the grid; t_f starts at max(t_f_bar, t_min + 0.1).
Eigen::VectorXd initial_guess(const NlpProblem& nlp, const ReferenceTrajectory& ref);

}  // namespace offroad
