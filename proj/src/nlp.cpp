#include "offroad/nlp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace offroad {

namespace {
using Triplet = Eigen::Triplet<double>;
}

void NlpOptions::validate() const {
    if (ne < 1) throw std::invalid_argument("NlpOptions.ne");
    if (!(t_min > 0.0)) throw std::invalid_argument("NlpOptions.t_min");
    if (margin < 0.0) throw std::invalid_argument("NlpOptions.margin");
    if (smooth_weight < 0.0) throw std::invalid_argument("NlpOptions.smooth_weight");
}

NlpProblem::NlpProblem(const VehicleParams& vehicle, const BoundaryState& start,
                       const BoundaryState& goal, const TunnelSet& tunnels,
                       const DiscGeometry& g, const NlpOptions& opts,
                       double terminal_heading_hint)
    : vehicle_(vehicle), start_(start), goal_(goal), opts_(opts) {
    vehicle_.validate();
    opts_.validate();
    if (tunnels.n_rects < 1 ||
        tunnels.rects_f.size() != static_cast<std::size_t>(tunnels.n_rects) ||
        tunnels.rects_r.size() != static_cast<std::size_t>(tunnels.n_rects)) {
        throw std::invalid_argument("NlpProblem: empty or inconsistent tunnel set");
    }
    if (opts_.ne % tunnels.n_rects != 0) {
        throw std::invalid_argument("NlpProblem: ne must be a multiple of the tunnel count");
    }

    ne_ = opts_.ne;
    n_rects_ = tunnels.n_rects;
    front_offset_ = g.front_offset;
    rear_offset_ = g.rear_offset;

    if (std::isfinite(terminal_heading_hint)) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        goal_.theta += two_pi * std::round((terminal_heading_hint - goal_.theta) / two_pi);
    }

    half_f_.resize(n_rects_);
    half_r_.resize(n_rects_);
    for (int i = 0; i < n_rects_; ++i) {
        for (auto [src, dst] : {std::pair{&tunnels.rects_f[i], &half_f_[i]},
                                std::pair{&tunnels.rects_r[i], &half_r_[i]}}) {
            if (src->degenerate) {
                throw std::invalid_argument("NlpProblem: degenerate tunnel rectangle");
            }
            for (int j = 0; j < 4; ++j) {
                const HalfspaceCoeffs& h = src->rect.halfspaces[j];
                const double norm = std::hypot(h.a, h.b);
                (*dst)[j] = {h.a / norm, h.b / norm, h.c / norm};
            }
        }
    }

    const int q = ne_ / n_rects_;
    pairs_.reserve(ne_ + n_rects_);
    for (int i = 0; i < n_rects_; ++i) {
        for (int k = i * q; k <= (i + 1) * q; ++k) pairs_.emplace_back(i, k);
    }

    n_vars_ = 5 * (ne_ + 1) + 2 * ne_ + 1;
    n_eq_ = 5 * ne_ + 10 + (opts_.pin_boundary_controls ? 4 : 0);
    accel_rows_ = vehicle_.accel_bounded() ? 2 * ne_ : 0;
    n_ineq_ = 4 * (ne_ + 1) + accel_rows_ + 2 * ne_ +
              8 * static_cast<int>(pairs_.size()) + 1;
}

double NlpProblem::objective(const Eigen::VectorXd& z) const {
    double f = z[idx_tf()];
    if (opts_.smooth_weight > 0.0) {
        double sum = 0.0;
        for (int k = 0; k < ne_; ++k) {
            sum += z[idx_a(k)] * z[idx_a(k)] + z[idx_omega(k)] * z[idx_omega(k)];
        }
        f += opts_.smooth_weight * (z[idx_tf()] / ne_) * sum;
    }
    return f;
}

void NlpProblem::objective_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) const {
    grad.setZero(n_vars_);
    grad[idx_tf()] = 1.0;
    if (opts_.smooth_weight > 0.0) {
        const double w = opts_.smooth_weight;
        const double h = z[idx_tf()] / ne_;
        double sum = 0.0;
        for (int k = 0; k < ne_; ++k) {
            const double a = z[idx_a(k)];
            const double om = z[idx_omega(k)];
            sum += a * a + om * om;
            grad[idx_a(k)] = 2.0 * w * h * a;
            grad[idx_omega(k)] = 2.0 * w * h * om;
        }
        grad[idx_tf()] += w * sum / ne_;
    }
}

void NlpProblem::eq_residuals(const Eigen::VectorXd& z, Eigen::VectorXd& r) const {
    r.resize(n_eq_);
    const double h = z[idx_tf()] / ne_;
    const double L = vehicle_.wheelbase;
    for (int k = 0; k < ne_; ++k) {
        const double v = z[idx_v(k)];
        const double phi = z[idx_phi(k)];
        const double theta = z[idx_theta(k)];
        r[5 * k + 0] = z[idx_x(k + 1)] - z[idx_x(k)] - h * v * std::cos(theta);
        r[5 * k + 1] = z[idx_y(k + 1)] - z[idx_y(k)] - h * v * std::sin(theta);
        r[5 * k + 2] = z[idx_v(k + 1)] - v - h * z[idx_a(k)];
        r[5 * k + 3] = z[idx_phi(k + 1)] - phi - h * z[idx_omega(k)];
        r[5 * k + 4] = z[idx_theta(k + 1)] - theta - h * v * std::tan(phi) / L;
    }
    int row = 5 * ne_;
    r[row++] = z[idx_x(0)] - start_.x;
    r[row++] = z[idx_y(0)] - start_.y;
    r[row++] = z[idx_v(0)] - start_.v;
    r[row++] = z[idx_phi(0)] - start_.phi;
    r[row++] = z[idx_theta(0)] - start_.theta;
    r[row++] = z[idx_x(ne_)] - goal_.x;
    r[row++] = z[idx_y(ne_)] - goal_.y;
    r[row++] = z[idx_v(ne_)] - goal_.v;
    r[row++] = z[idx_phi(ne_)] - goal_.phi;
    r[row++] = z[idx_theta(ne_)] - goal_.theta;
    if (opts_.pin_boundary_controls) {
        r[row++] = z[idx_a(0)] - start_.a;
        r[row++] = z[idx_omega(0)] - start_.omega;
        r[row++] = z[idx_a(ne_ - 1)] - goal_.a;
        r[row++] = z[idx_omega(ne_ - 1)] - goal_.omega;
    }
}

void NlpProblem::ineq_residuals(const Eigen::VectorXd& z, Eigen::VectorXd& r) const {
    r.resize(n_ineq_);
    int row = 0;
    for (int k = 0; k <= ne_; ++k) {
        r[row++] = z[idx_v(k)] - vehicle_.max_speed;
        r[row++] = -z[idx_v(k)] - vehicle_.max_speed;
    }
    for (int k = 0; k <= ne_; ++k) {
        r[row++] = z[idx_phi(k)] - vehicle_.max_steer;
        r[row++] = -z[idx_phi(k)] - vehicle_.max_steer;
    }
    if (accel_rows_ > 0) {
        for (int k = 0; k < ne_; ++k) {
            r[row++] = z[idx_a(k)] - vehicle_.max_accel;
            r[row++] = -z[idx_a(k)] - vehicle_.max_accel;
        }
    }
    for (int k = 0; k < ne_; ++k) {
        r[row++] = z[idx_omega(k)] - vehicle_.max_steer_rate;
        r[row++] = -z[idx_omega(k)] - vehicle_.max_steer_rate;
    }
    for (const auto& [i, k] : pairs_) {
        const double x = z[idx_x(k)];
        const double y = z[idx_y(k)];
        const double theta = z[idx_theta(k)];
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (int j = 0; j < 4; ++j) {
            const HalfspaceCoeffs& hf = half_f_[i][j];
            r[row++] = hf.a * (x + front_offset_ * c) + hf.b * (y + front_offset_ * s) +
                       hf.c + opts_.margin;
        }
        for (int j = 0; j < 4; ++j) {
            const HalfspaceCoeffs& hr = half_r_[i][j];
            r[row++] = hr.a * (x + rear_offset_ * c) + hr.b * (y + rear_offset_ * s) +
                       hr.c + opts_.margin;
        }
    }
    r[row++] = opts_.t_min - z[idx_tf()];
}

void NlpProblem::eq_jacobian(const Eigen::VectorXd& z, SpMat& jac) const {
    std::vector<Triplet> t;
    t.reserve(16 * ne_ + 14);
    const double h = z[idx_tf()] / ne_;
    const double L = vehicle_.wheelbase;
    const int tf = idx_tf();
    for (int k = 0; k < ne_; ++k) {
        const double v = z[idx_v(k)];
        const double phi = z[idx_phi(k)];
        const double theta = z[idx_theta(k)];
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const double tan_phi = std::tan(phi);
        const double sec2 = 1.0 + tan_phi * tan_phi;
        const int row = 5 * k;

        t.emplace_back(row, idx_x(k + 1), 1.0);
        t.emplace_back(row, idx_x(k), -1.0);
        t.emplace_back(row, idx_v(k), -h * c);
        t.emplace_back(row, idx_theta(k), h * v * s);
        t.emplace_back(row, tf, -v * c / ne_);

        t.emplace_back(row + 1, idx_y(k + 1), 1.0);
        t.emplace_back(row + 1, idx_y(k), -1.0);
        t.emplace_back(row + 1, idx_v(k), -h * s);
        t.emplace_back(row + 1, idx_theta(k), -h * v * c);
        t.emplace_back(row + 1, tf, -v * s / ne_);

        t.emplace_back(row + 2, idx_v(k + 1), 1.0);
        t.emplace_back(row + 2, idx_v(k), -1.0);
        t.emplace_back(row + 2, idx_a(k), -h);
        t.emplace_back(row + 2, tf, -z[idx_a(k)] / ne_);

        t.emplace_back(row + 3, idx_phi(k + 1), 1.0);
        t.emplace_back(row + 3, idx_phi(k), -1.0);
        t.emplace_back(row + 3, idx_omega(k), -h);
        t.emplace_back(row + 3, tf, -z[idx_omega(k)] / ne_);

        t.emplace_back(row + 4, idx_theta(k + 1), 1.0);
        t.emplace_back(row + 4, idx_theta(k), -1.0);
        t.emplace_back(row + 4, idx_v(k), -h * tan_phi / L);
        t.emplace_back(row + 4, idx_phi(k), -h * v * sec2 / L);
        t.emplace_back(row + 4, tf, -v * tan_phi / (L * ne_));
    }
    int row = 5 * ne_;
    const int pin_cols[10] = {idx_x(0),  idx_y(0),  idx_v(0),  idx_phi(0),  idx_theta(0),
                              idx_x(ne_), idx_y(ne_), idx_v(ne_), idx_phi(ne_), idx_theta(ne_)};
    for (int j = 0; j < 10; ++j) t.emplace_back(row++, pin_cols[j], 1.0);
    if (opts_.pin_boundary_controls) {
        t.emplace_back(row++, idx_a(0), 1.0);
        t.emplace_back(row++, idx_omega(0), 1.0);
        t.emplace_back(row++, idx_a(ne_ - 1), 1.0);
        t.emplace_back(row++, idx_omega(ne_ - 1), 1.0);
    }
    jac.resize(n_eq_, n_vars_);
    jac.setFromTriplets(t.begin(), t.end());
}

void NlpProblem::ineq_jacobian(const Eigen::VectorXd& z, SpMat& jac) const {
    std::vector<Triplet> t;
    t.reserve(8 * ne_ + 24 * static_cast<int>(pairs_.size()) + 1);
    int row = 0;
    for (int k = 0; k <= ne_; ++k) {
        t.emplace_back(row++, idx_v(k), 1.0);
        t.emplace_back(row++, idx_v(k), -1.0);
    }
    for (int k = 0; k <= ne_; ++k) {
        t.emplace_back(row++, idx_phi(k), 1.0);
        t.emplace_back(row++, idx_phi(k), -1.0);
    }
    if (accel_rows_ > 0) {
        for (int k = 0; k < ne_; ++k) {
            t.emplace_back(row++, idx_a(k), 1.0);
            t.emplace_back(row++, idx_a(k), -1.0);
        }
    }
    for (int k = 0; k < ne_; ++k) {
        t.emplace_back(row++, idx_omega(k), 1.0);
        t.emplace_back(row++, idx_omega(k), -1.0);
    }
    for (const auto& [i, k] : pairs_) {
        const double theta = z[idx_theta(k)];
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (int half = 0; half < 2; ++half) {
            const auto& rows = half == 0 ? half_f_[i] : half_r_[i];
            const double off = half == 0 ? front_offset_ : rear_offset_;
            for (int j = 0; j < 4; ++j) {
                t.emplace_back(row, idx_x(k), rows[j].a);
                t.emplace_back(row, idx_y(k), rows[j].b);
                t.emplace_back(row, idx_theta(k), off * (-rows[j].a * s + rows[j].b * c));
                ++row;
            }
        }
    }
    t.emplace_back(row++, idx_tf(), -1.0);
    jac.resize(n_ineq_, n_vars_);
    jac.setFromTriplets(t.begin(), t.end());
}

void NlpProblem::lagrangian_hessian(const Eigen::VectorXd& z, double sigma,
                                    const Eigen::VectorXd& y_eq, const Eigen::VectorXd& y_ineq,
                                    SpMat& hess) const {
    std::vector<Triplet> t;
    t.reserve(24 * ne_ + 8 * static_cast<int>(pairs_.size()));
    const double h = z[idx_tf()] / ne_;
    const double L = vehicle_.wheelbase;
    const int tf = idx_tf();

    const auto sym = [&t](int i, int j, double val) {
        if (val == 0.0) return;
        t.emplace_back(i, j, val);
        if (i != j) t.emplace_back(j, i, val);
    };

    if (opts_.smooth_weight > 0.0 && sigma != 0.0) {
        const double w = sigma * opts_.smooth_weight;
        for (int k = 0; k < ne_; ++k) {
            sym(idx_a(k), idx_a(k), 2.0 * w * h);
            sym(idx_omega(k), idx_omega(k), 2.0 * w * h);
            sym(idx_a(k), tf, 2.0 * w * z[idx_a(k)] / ne_);
            sym(idx_omega(k), tf, 2.0 * w * z[idx_omega(k)] / ne_);
        }
    }

    for (int k = 0; k < ne_; ++k) {
        const double v = z[idx_v(k)];
        const double phi = z[idx_phi(k)];
        const double theta = z[idx_theta(k)];
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const double tan_phi = std::tan(phi);
        const double sec2 = 1.0 + tan_phi * tan_phi;
        const double yx = y_eq[5 * k + 0];
        const double yy = y_eq[5 * k + 1];
        const double yv = y_eq[5 * k + 2];
        const double yp = y_eq[5 * k + 3];
        const double yt = y_eq[5 * k + 4];

        sym(idx_v(k), idx_theta(k), h * (yx * s - yy * c));
        sym(idx_theta(k), idx_theta(k), h * v * (yx * c + yy * s));
        sym(idx_v(k), tf, (-yx * c - yy * s) / ne_);
        sym(idx_theta(k), tf, v * (yx * s - yy * c) / ne_);

        sym(idx_a(k), tf, -yv / ne_);
        sym(idx_omega(k), tf, -yp / ne_);

        sym(idx_v(k), idx_phi(k), -yt * h * sec2 / L);
        sym(idx_phi(k), idx_phi(k), -yt * h * v * 2.0 * sec2 * tan_phi / L);
        sym(idx_v(k), tf, -yt * tan_phi / (L * ne_));
        sym(idx_phi(k), tf, -yt * v * sec2 / (L * ne_));
    }

    int row = 4 * (ne_ + 1) + accel_rows_ + 2 * ne_;
    for (const auto& [i, k] : pairs_) {
        const double theta = z[idx_theta(k)];
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        double d2 = 0.0;
        for (int half = 0; half < 2; ++half) {
            const auto& rows = half == 0 ? half_f_[i] : half_r_[i];
            const double off = half == 0 ? front_offset_ : rear_offset_;
            for (int j = 0; j < 4; ++j) {
                d2 += y_ineq[row++] * off * (-rows[j].a * c - rows[j].b * s);
            }
        }
        sym(idx_theta(k), idx_theta(k), d2);
    }

    hess.resize(n_vars_, n_vars_);
    hess.setFromTriplets(t.begin(), t.end());
}

NlpProblem transcribe(const VehicleParams& vehicle, const BoundaryState& start,
                      const BoundaryState& goal, const TunnelSet& tunnels,
                      const DiscGeometry& g, const NlpOptions& opts,
                      double terminal_heading_hint) {
    return NlpProblem(vehicle, start, goal, tunnels, g, opts, terminal_heading_hint);
}

Eigen::VectorXd initial_guess(const NlpProblem& nlp, const ReferenceTrajectory& ref) {
    const int ne = nlp.ne();
    if (ref.samples.size() != static_cast<std::size_t>(ne + 1) && ref.samples.size() != 1) {
        throw std::invalid_argument("initial_guess: reference grid does not match ne");
    }
    Eigen::VectorXd z(nlp.n_vars());
    for (int k = 0; k <= ne; ++k) {
        const ReferenceSample& smp =
            ref.samples.size() == 1 ? ref.samples.front() : ref.samples[k];
        z[nlp.idx_x(k)] = smp.state.x;
        z[nlp.idx_y(k)] = smp.state.y;
        z[nlp.idx_v(k)] = smp.state.v;
        z[nlp.idx_phi(k)] = smp.state.phi;
        z[nlp.idx_theta(k)] = smp.state.theta;
        if (k < ne) {
            z[nlp.idx_a(k)] = smp.control.a;
            z[nlp.idx_omega(k)] = smp.control.omega;
        }
    }
    z[nlp.idx_tf()] = std::max(ref.t_f_bar, nlp.t_min() + 0.1);
    return z;
}

}  // namespace offroad
