#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "offroad/model.hpp"
#include "offroad/nlp.hpp"
#include "offroad/reference.hpp"

namespace offroad {

enum class IpmStatus { converged, infeasible, iteration_limit, numerical_failure };

const char* to_string(IpmStatus status);

// Primal-dual interior-point solver settings. Convergence is declared when the
// scaled KKT error (stationarity, primal feasibility, complementarity) drops
// below tol; the barrier parameter follows a monotone schedule mu <- mu/5.
struct IpmOptions {
    double tol = 1e-6;
    int max_iter = 500;
    double mu0 = 0.1;
    double slack_floor = 1e-3;  // initial slacks are shifted to at least this
    std::ostream* iter_log = nullptr;  // optional CSV: iter,mu,objective,primal_inf,dual_inf

    void validate() const;
};

struct NlpSolution {
    IpmStatus status = IpmStatus::numerical_failure;
    double t_f = 0.0;
    std::vector<State> states;      // NE+1 grid nodes
    std::vector<Control> controls;  // NE control intervals
    Eigen::VectorXd z;              // packed decision vector at exit

    double kkt_stationarity = 0.0;  // scaled dual infeasibility
    double kkt_eq = 0.0;            // max |equality residual|
    double kkt_ineq = 0.0;          // max positive inequality residual
    double kkt_comp = 0.0;          // scaled complementarity
    int iterations = 0;
    double wall_time_s = 0.0;

    bool ok() const { return status == IpmStatus::converged; }
};

NlpSolution solve(const NlpProblem& nlp, const Eigen::VectorXd& z0, const IpmOptions& opts = {});

// Warm start from the reference trajectory (must be sampled on the NE+1 grid).
NlpSolution solve(const NlpProblem& nlp, const ReferenceTrajectory& init,
                  const IpmOptions& opts = {});

}  // namespace offroad
