#include "offroad/ipm.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace offroad {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// IPOPT-style scaling of stationarity and complementarity norms: large
// multipliers relax the tolerance instead of stalling the iteration.
double dual_scale(const Eigen::VectorXd& y, const Eigen::VectorXd& lam) {
    const double avg = (y.lpNorm<1>() + lam.lpNorm<1>()) /
                       static_cast<double>(y.size() + lam.size());
    return std::max(100.0, avg) / 100.0;
}

double comp_scale(const Eigen::VectorXd& lam) {
    const double avg = lam.lpNorm<1>() / static_cast<double>(lam.size());
    return std::max(100.0, avg) / 100.0;
}

// Largest step in [0, 1] keeping v + alpha*dv >= (1 - tau) * v.
double fraction_to_boundary(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double tau) {
    double alpha = 1.0;
    for (int i = 0; i < v.size(); ++i) {
        if (dv[i] < 0.0) alpha = std::min(alpha, -tau * v[i] / dv[i]);
    }
    return alpha;
}

}  // namespace

const char* to_string(IpmStatus status) {
    switch (status) {
        case IpmStatus::converged: return "converged";
        case IpmStatus::infeasible: return "infeasible";
        case IpmStatus::iteration_limit: return "iteration-limit";
        case IpmStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

void IpmOptions::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("IpmOptions.tol");
    if (max_iter < 1) throw std::invalid_argument("IpmOptions.max_iter");
    if (!(mu0 > 0.0)) throw std::invalid_argument("IpmOptions.mu0");
    if (!(slack_floor > 0.0)) throw std::invalid_argument("IpmOptions.slack_floor");
}

NlpSolution solve(const NlpProblem& nlp, const Eigen::VectorXd& z0, const IpmOptions& opts) {
    opts.validate();
    const auto t_begin = std::chrono::steady_clock::now();

    const int n = nlp.n_vars();
    const int me = nlp.n_eq();
    const int mi = nlp.n_ineq();
    if (z0.size() != n) throw std::invalid_argument("solve: initial point has wrong dimension");

    NlpSolution sol;
    Eigen::VectorXd z = z0;
    Eigen::VectorXd cE(me), cI(mi), grad(n);
    Eigen::VectorXd s, lam, y;
    double mu = opts.mu0;

    IpmStatus status = IpmStatus::iteration_limit;
    int iter = 0;

    if (z.allFinite()) {
        nlp.ineq_residuals(z, cI);
        s = (-cI.array()).max(opts.slack_floor).matrix();
        // Multipliers centered on slacks floored well away from zero: a warm
        // start riding a bound must not begin with huge dual infeasibility.
        lam = (mu / s.array().max(0.1)).matrix();
        y = Eigen::VectorXd::Zero(me);
    } else {
        status = IpmStatus::numerical_failure;
        s = Eigen::VectorXd::Constant(mi, opts.slack_floor);
        lam = s;
        y = Eigen::VectorXd::Zero(me);
    }

    const double mu_min = std::max(opts.tol / 100.0, 1e-12);
    const double delta_c = 1e-8;
    double nu = 1.0;            // merit penalty weight, reset per barrier stage
    int ls_failures = 0;        // consecutive line-search failures
    double forced_delta = 0.0;  // regularization carried over after a failure

    SpMat JE, JI, H;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    const bool debug = std::getenv("OFFROAD_IPM_DEBUG") != nullptr;

    for (; iter < opts.max_iter && status == IpmStatus::iteration_limit; ++iter) {
        nlp.objective_gradient(z, grad);
        nlp.eq_residuals(z, cE);
        nlp.ineq_residuals(z, cI);
        nlp.eq_jacobian(z, JE);
        nlp.ineq_jacobian(z, JI);

        const Eigen::VectorXd r_d = grad + JE.transpose() * y + JI.transpose() * lam;
        const Eigen::VectorXd r_pI = cI + s;
        const double s_d = dual_scale(y, lam);
        const double s_c = comp_scale(lam);
        const double e_stat = r_d.lpNorm<Eigen::Infinity>() / s_d;
        const double e_eq = cE.lpNorm<Eigen::Infinity>();
        const double e_pI = r_pI.lpNorm<Eigen::Infinity>();
        const Eigen::ArrayXd comp = s.array() * lam.array();
        const double kkt0 = std::max({e_stat, e_eq, e_pI, comp.abs().maxCoeff() / s_c});

        if (opts.iter_log) {
            *opts.iter_log << iter << ',' << mu << ',' << nlp.objective(z) << ','
                           << std::max(e_eq, e_pI) << ',' << e_stat << '\n';
        }
        if (!std::isfinite(kkt0)) {
            status = IpmStatus::numerical_failure;
            break;
        }
        if (kkt0 <= opts.tol) {
            status = IpmStatus::converged;
            break;
        }

        const double kkt_mu =
            std::max({e_stat, e_eq, e_pI, (comp - mu).abs().maxCoeff() / s_c});
        if (kkt_mu <= 10.0 * mu && mu > mu_min) {
            mu = std::max(mu_min, mu / 5.0);
            nu = 1.0;  // fresh merit problem for the new barrier stage
        }

        // Condensed Newton system: eliminate (ds, dlam) against the barrier
        // conditions, leaving [H + J_I^T diag(lam/s) J_I + dw*I, J_E^T; J_E, -dc*I].
        nlp.lagrangian_hessian(z, 1.0, y, lam, H);
        const Eigen::ArrayXd sig = lam.array() / s.array();
        const SpMat JtSJ = JI.transpose() * sig.matrix().asDiagonal() * JI;
        const SpMat Haug = H + JtSJ;

        const Eigen::VectorXd w = (mu / s.array() - lam.array() + sig * r_pI.array()).matrix();
        Eigen::VectorXd rhs(n + me);
        rhs.head(n) = -(r_d + JI.transpose() * w);
        rhs.tail(me) = -cE;

        double delta_w = forced_delta;
        bool factored = false;
        Eigen::VectorXd step;
        while (!factored) {
            std::vector<Triplet> trip;
            trip.reserve(static_cast<std::size_t>(Haug.nonZeros() + 2 * JE.nonZeros()) + n + me);
            for (int col = 0; col < Haug.outerSize(); ++col) {
                for (SpMat::InnerIterator it(Haug, col); it; ++it) {
                    trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                      it.value());
                }
            }
            if (delta_w > 0.0) {
                for (int i = 0; i < n; ++i) trip.emplace_back(i, i, delta_w);
            }
            for (int col = 0; col < JE.outerSize(); ++col) {
                for (SpMat::InnerIterator it(JE, col); it; ++it) {
                    trip.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                      it.value());
                    trip.emplace_back(static_cast<int>(it.col()), n + static_cast<int>(it.row()),
                                      it.value());
                }
            }
            for (int i = 0; i < me; ++i) trip.emplace_back(n + i, n + i, -delta_c);

            SpMat K(n + me, n + me);
            K.setFromTriplets(trip.begin(), trip.end());
            ldlt.compute(K);
            if (ldlt.info() == Eigen::Success) {
                const Eigen::VectorXd d = ldlt.vectorD();
                int pos = 0;
                int neg = 0;
                bool clean = true;
                for (int i = 0; i < d.size() && clean; ++i) {
                    if (!std::isfinite(d[i]) || d[i] == 0.0) {
                        clean = false;
                    } else {
                        ++(d[i] > 0.0 ? pos : neg);
                    }
                }
                if (clean && pos == n && neg == me) {
                    step = ldlt.solve(rhs);
                    if (step.allFinite()) factored = true;
                }
            }
            if (!factored) {
                delta_w = delta_w == 0.0 ? 1e-8 : delta_w * 10.0;
                if (delta_w > 1e40) break;
            }
        }
        if (!factored) {
            status = IpmStatus::numerical_failure;
            break;
        }

        const Eigen::VectorXd dz = step.head(n);
        const Eigen::VectorXd dy = step.tail(me);
        const Eigen::VectorXd ds = -r_pI - JI * dz;
        const Eigen::VectorXd dlam = (mu / s.array() - lam.array() - sig * ds.array()).matrix();

        const double tau = std::max(0.99, 1.0 - mu);
        const double alpha_max = fraction_to_boundary(s, ds, tau);

        // l1 exact-penalty merit with Armijo backtracking on (z, s).
        const double theta = cE.lpNorm<1>() + r_pI.lpNorm<1>();
        const double d0 = grad.dot(dz) - mu * (ds.array() / s.array()).sum();
        double nu_req = 1.0;
        if (theta > 1e-12) nu_req = std::max(1.0, d0 / (0.5 * theta) + 1.0);
        if (nu < nu_req) {
            nu = nu_req;
        } else if (nu > 10.0 * nu_req) {
            // Shed stale penalty weight once feasibility recovers, otherwise the
            // merit term rejects full steps over microscopic violation growth.
            nu = std::max(nu_req, 0.1 * nu);
        }
        const double dphi = d0 - nu * theta;
        const double phi0 = nlp.objective(z) - mu * s.array().log().sum() + nu * theta;

        const auto merit_at = [&](const Eigen::VectorXd& z_t, const Eigen::VectorXd& s_t,
                                  Eigen::VectorXd& cE_t, Eigen::VectorXd& cI_t) {
            nlp.eq_residuals(z_t, cE_t);
            nlp.ineq_residuals(z_t, cI_t);
            return nlp.objective(z_t) - mu * s_t.array().log().sum() +
                   nu * (cE_t.lpNorm<1>() + (cI_t + s_t).lpNorm<1>());
        };

        // Accepted step (primal direction, its alphas, and dual direction).
        double alpha = alpha_max;
        double alpha_dual = fraction_to_boundary(lam, dlam, tau);
        Eigen::VectorXd z_t, s_t, cE_t(me), cI_t(mi);
        const Eigen::VectorXd* use_dy = &dy;
        const Eigen::VectorXd* use_dlam = &dlam;
        Eigen::VectorXd dy_soc, dlam_soc;
        bool accepted = false;

        for (int halvings = 0; halvings <= 30 && !accepted; ++halvings) {
            z_t = z + alpha * dz;
            s_t = s + alpha * ds;
            const double phi_t = merit_at(z_t, s_t, cE_t, cI_t);
            if (std::isfinite(phi_t) && phi_t <= phi0 + 1e-4 * alpha * std::min(dphi, 0.0)) {
                accepted = true;
                break;
            }

            // Second-order corrections from the largest trial only: cancel the
            // constraint curvature picked up along dz, reusing the factored KKT.
            if (halvings == 0) {
                Eigen::VectorXd cE_soc = alpha * cE + cE_t;
                Eigen::VectorXd rI_soc = alpha * r_pI + (cI_t + s_t);
                for (int round = 0; round < 2 && !accepted; ++round) {
                    const Eigen::VectorXd w_soc =
                        (mu / s.array() - lam.array() + sig * rI_soc.array()).matrix();
                    Eigen::VectorXd rhs_soc(n + me);
                    rhs_soc.head(n) = -(r_d + JI.transpose() * w_soc);
                    rhs_soc.tail(me) = -cE_soc;
                    const Eigen::VectorXd step_soc = ldlt.solve(rhs_soc);
                    if (!step_soc.allFinite()) break;
                    const Eigen::VectorXd dz2 = step_soc.head(n);
                    const Eigen::VectorXd ds2 = -rI_soc - JI * dz2;
                    const double alpha2 = fraction_to_boundary(s, ds2, tau);
                    const Eigen::VectorXd z_t2 = z + alpha2 * dz2;
                    const Eigen::VectorXd s_t2 = s + alpha2 * ds2;
                    const double phi_t2 = merit_at(z_t2, s_t2, cE_t, cI_t);
                    if (std::isfinite(phi_t2) &&
                        phi_t2 <= phi0 + 1e-4 * alpha2 * std::min(dphi, 0.0)) {
                        accepted = true;
                        z_t = z_t2;
                        s_t = s_t2;
                        alpha = alpha2;
                        dy_soc = step_soc.tail(me);
                        dlam_soc =
                            (mu / s.array() - lam.array() - sig * ds2.array()).matrix();
                        alpha_dual = fraction_to_boundary(lam, dlam_soc, tau);
                        use_dy = &dy_soc;
                        use_dlam = &dlam_soc;
                        break;
                    }
                    cE_soc = alpha2 * cE_soc + cE_t;
                    rI_soc = alpha2 * rI_soc + (cI_t + s_t2);
                }
                if (accepted) break;
            }
            alpha *= 0.5;
        }

        if (debug) {
            std::fprintf(stderr,
                         "it %3d mu %.2e stat %.2e comp %.2e pI %.2e alpha %.2e amax %.2e "
                         "nu %.2e dphi %.2e soc %d acc %d\n",
                         iter, mu, e_stat, comp.abs().maxCoeff() / s_c, e_pI, alpha, alpha_max,
                         nu, dphi, use_dy != &dy ? 1 : 0, accepted ? 1 : 0);
        }

        if (!accepted) {
            ++ls_failures;
            forced_delta = forced_delta == 0.0 ? 1e-4 : forced_delta * 100.0;
            if (ls_failures >= 3) {
                const double viol = std::max(e_eq, std::max(0.0, cI.maxCoeff()));
                status = viol > 1e-6 ? IpmStatus::infeasible : IpmStatus::numerical_failure;
            }
            continue;
        }
        ls_failures = 0;
        forced_delta = 0.0;

        z = z_t;
        s = s_t;
        y += alpha * (*use_dy);
        lam += alpha_dual * (*use_dlam);
        for (int i = 0; i < mi; ++i) {
            const double center = mu / s[i];
            lam[i] = std::clamp(lam[i], center / 1e10, center * 1e10);
        }
    }

    sol.status = status;
    sol.iterations = iter;
    sol.z = z;
    if (z.allFinite()) {
        nlp.objective_gradient(z, grad);
        nlp.eq_residuals(z, cE);
        nlp.ineq_residuals(z, cI);
        nlp.eq_jacobian(z, JE);
        nlp.ineq_jacobian(z, JI);
        const Eigen::VectorXd r_d = grad + JE.transpose() * y + JI.transpose() * lam;
        sol.kkt_stationarity = r_d.lpNorm<Eigen::Infinity>() / dual_scale(y, lam);
        sol.kkt_eq = cE.lpNorm<Eigen::Infinity>();
        sol.kkt_ineq = std::max(0.0, cI.maxCoeff());
        sol.kkt_comp = (s.array() * lam.array()).abs().maxCoeff() / comp_scale(lam);
        sol.t_f = z[nlp.idx_tf()];
        sol.states.reserve(nlp.ne() + 1);
        sol.controls.reserve(nlp.ne());
        for (int k = 0; k <= nlp.ne(); ++k) {
            sol.states.push_back({z[nlp.idx_x(k)], z[nlp.idx_y(k)], z[nlp.idx_theta(k)],
                                  z[nlp.idx_v(k)], z[nlp.idx_phi(k)]});
            if (k < nlp.ne()) sol.controls.push_back({z[nlp.idx_a(k)], z[nlp.idx_omega(k)]});
        }
    }
    sol.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return sol;
}

NlpSolution solve(const NlpProblem& nlp, const ReferenceTrajectory& init,
                  const IpmOptions& opts) {
    return solve(nlp, initial_guess(nlp, init), opts);
}

}  // namespace offroad
