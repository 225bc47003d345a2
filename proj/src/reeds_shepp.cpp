#include "offroad/reeds_shepp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "offroad/vec2.hpp"

namespace offroad {

namespace {

// Word-family enumeration in normalized coordinates (rho = 1), following the
// classical sufficient set of 48 candidates obtained from the base words by
// timeflip, reflection and reversal.

enum Seg : int { kNop = 0, kLeft, kStraight, kRight };

constexpr Seg kWordTypes[18][5] = {
    {kLeft, kRight, kLeft, kNop, kNop},          // 0
    {kRight, kLeft, kRight, kNop, kNop},         // 1
    {kLeft, kRight, kLeft, kRight, kNop},        // 2
    {kRight, kLeft, kRight, kLeft, kNop},        // 3
    {kLeft, kRight, kStraight, kLeft, kNop},     // 4
    {kRight, kLeft, kStraight, kRight, kNop},    // 5
    {kLeft, kStraight, kRight, kLeft, kNop},     // 6
    {kRight, kStraight, kLeft, kRight, kNop},    // 7
    {kLeft, kRight, kStraight, kRight, kNop},    // 8
    {kRight, kLeft, kStraight, kLeft, kNop},     // 9
    {kRight, kStraight, kRight, kLeft, kNop},    // 10
    {kLeft, kStraight, kLeft, kRight, kNop},     // 11
    {kLeft, kStraight, kRight, kNop, kNop},      // 12
    {kRight, kStraight, kLeft, kNop, kNop},      // 13
    {kLeft, kStraight, kLeft, kNop, kNop},       // 14
    {kRight, kStraight, kRight, kNop, kNop},     // 15
    {kLeft, kRight, kStraight, kLeft, kRight},   // 16
    {kRight, kLeft, kStraight, kRight, kLeft},   // 17
};

constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();

double mod2pi(double x) {
    double v = std::fmod(x, 2.0 * M_PI);
    if (v < -M_PI)
        v += 2.0 * M_PI;
    else if (v > M_PI)
        v -= 2.0 * M_PI;
    return v;
}

void polar(double x, double y, double& r, double& theta) {
    r = std::sqrt(x * x + y * y);
    theta = std::atan2(y, x);
}

void tau_omega(double u, double v, double xi, double eta, double phi, double& tau,
               double& omega) {
    const double delta = mod2pi(u - v);
    const double A = std::sin(u) - std::sin(delta);
    const double B = std::cos(u) - std::cos(delta) - 1.0;
    const double t1 = std::atan2(eta * A - xi * B, xi * A + eta * B);
    const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
    tau = (t2 < 0.0) ? mod2pi(t1 + M_PI) : mod2pi(t1);
    omega = mod2pi(tau - u + v - phi);
}

bool LpSpLp(double x, double y, double phi, double& t, double& u, double& v) {
    polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
    if (t >= -kZero) {
        v = mod2pi(phi - t);
        if (v >= -kZero) return true;
    }
    return false;
}

bool LpSpRp(double x, double y, double phi, double& t, double& u, double& v) {
    double t1, u1;
    polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
    u1 = u1 * u1;
    if (u1 >= 4.0) {
        u = std::sqrt(u1 - 4.0);
        const double theta = std::atan2(2.0, u);
        t = mod2pi(t1 + theta);
        v = mod2pi(t - phi);
        return t >= -kZero && v >= -kZero;
    }
    return false;
}

bool LpRmL(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x - std::sin(phi);
    const double eta = y - 1.0 + std::cos(phi);
    double u1, theta;
    polar(xi, eta, u1, theta);
    if (u1 <= 4.0) {
        u = -2.0 * std::asin(0.25 * u1);
        t = mod2pi(theta + 0.5 * u + M_PI);
        v = mod2pi(phi - t + u);
        return t >= -kZero && u <= kZero;
    }
    return false;
}

bool LpRupLumRm(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x + std::sin(phi);
    const double eta = y - 1.0 - std::cos(phi);
    const double rho = 0.25 * (2.0 + std::sqrt(xi * xi + eta * eta));
    if (rho <= 1.0) {
        u = std::acos(rho);
        tau_omega(u, -u, xi, eta, phi, t, v);
        return t >= -kZero && v <= kZero;
    }
    return false;
}

bool LpRumLumRp(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x + std::sin(phi);
    const double eta = y - 1.0 - std::cos(phi);
    const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
    if (rho >= 0.0 && rho <= 1.0) {
        u = -std::acos(rho);
        if (u >= -0.5 * M_PI) {
            tau_omega(u, u, xi, eta, phi, t, v);
            return t >= -kZero && v >= -kZero;
        }
    }
    return false;
}

bool LpRmSmLm(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x - std::sin(phi);
    const double eta = y - 1.0 + std::cos(phi);
    double rho, theta;
    polar(xi, eta, rho, theta);
    if (rho >= 2.0) {
        const double r = std::sqrt(rho * rho - 4.0);
        u = 2.0 - r;
        t = mod2pi(theta + std::atan2(r, -2.0));
        v = mod2pi(phi - 0.5 * M_PI - t);
        return t >= -kZero && u <= kZero && v <= kZero;
    }
    return false;
}

bool LpRmSmRm(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x + std::sin(phi);
    const double eta = y - 1.0 - std::cos(phi);
    double rho, theta;
    polar(-eta, xi, rho, theta);
    if (rho >= 2.0) {
        t = theta;
        u = 2.0 - rho;
        v = mod2pi(t + 0.5 * M_PI - phi);
        return t >= -kZero && u <= kZero && v <= kZero;
    }
    return false;
}

bool LpRmSLmRp(double x, double y, double phi, double& t, double& u, double& v) {
    const double xi = x + std::sin(phi);
    const double eta = y - 1.0 - std::cos(phi);
    double rho, theta;
    polar(xi, eta, rho, theta);
    if (rho >= 2.0) {
        u = 4.0 - std::sqrt(rho * rho - 4.0);
        if (u <= kZero) {
            t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
            v = mod2pi(t - phi);
            return t >= -kZero && v >= -kZero;
        }
    }
    return false;
}

struct Candidate {
    int word = -1;
    double len[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
    double total = std::numeric_limits<double>::infinity();
};

class Best {
  public:
    void consider(int word, double l0, double l1, double l2, double l3 = 0.0,
                  double l4 = 0.0) {
        const double total =
            std::abs(l0) + std::abs(l1) + std::abs(l2) + std::abs(l3) + std::abs(l4);
        if (total < best_.total) {
            best_.word = word;
            best_.len[0] = l0;
            best_.len[1] = l1;
            best_.len[2] = l2;
            best_.len[3] = l3;
            best_.len[4] = l4;
            best_.total = total;
        }
    }

    const Candidate& get() const { return best_; }

  private:
    Candidate best_;
};

void enumerate_csc(double x, double y, double phi, Best& best) {
    double t, u, v;
    if (LpSpLp(x, y, phi, t, u, v)) best.consider(14, t, u, v);
    if (LpSpLp(-x, y, -phi, t, u, v)) best.consider(14, -t, -u, -v);
    if (LpSpLp(x, -y, -phi, t, u, v)) best.consider(15, t, u, v);
    if (LpSpLp(-x, -y, phi, t, u, v)) best.consider(15, -t, -u, -v);
    if (LpSpRp(x, y, phi, t, u, v)) best.consider(12, t, u, v);
    if (LpSpRp(-x, y, -phi, t, u, v)) best.consider(12, -t, -u, -v);
    if (LpSpRp(x, -y, -phi, t, u, v)) best.consider(13, t, u, v);
    if (LpSpRp(-x, -y, phi, t, u, v)) best.consider(13, -t, -u, -v);
}

void enumerate_ccc(double x, double y, double phi, Best& best) {
    double t, u, v;
    if (LpRmL(x, y, phi, t, u, v)) best.consider(0, t, u, v);
    if (LpRmL(-x, y, -phi, t, u, v)) best.consider(0, -t, -u, -v);
    if (LpRmL(x, -y, -phi, t, u, v)) best.consider(1, t, u, v);
    if (LpRmL(-x, -y, phi, t, u, v)) best.consider(1, -t, -u, -v);

    const double xb = x * std::cos(phi) + y * std::sin(phi);
    const double yb = x * std::sin(phi) - y * std::cos(phi);
    if (LpRmL(xb, yb, phi, t, u, v)) best.consider(0, v, u, t);
    if (LpRmL(-xb, yb, -phi, t, u, v)) best.consider(0, -v, -u, -t);
    if (LpRmL(xb, -yb, -phi, t, u, v)) best.consider(1, v, u, t);
    if (LpRmL(-xb, -yb, phi, t, u, v)) best.consider(1, -v, -u, -t);
}

void enumerate_cccc(double x, double y, double phi, Best& best) {
    double t, u, v;
    if (LpRupLumRm(x, y, phi, t, u, v)) best.consider(2, t, u, -u, v);
    if (LpRupLumRm(-x, y, -phi, t, u, v)) best.consider(2, -t, -u, u, -v);
    if (LpRupLumRm(x, -y, -phi, t, u, v)) best.consider(3, t, u, -u, v);
    if (LpRupLumRm(-x, -y, phi, t, u, v)) best.consider(3, -t, -u, u, -v);

    if (LpRumLumRp(x, y, phi, t, u, v)) best.consider(2, t, u, u, v);
    if (LpRumLumRp(-x, y, -phi, t, u, v)) best.consider(2, -t, -u, -u, -v);
    if (LpRumLumRp(x, -y, -phi, t, u, v)) best.consider(3, t, u, u, v);
    if (LpRumLumRp(-x, -y, phi, t, u, v)) best.consider(3, -t, -u, -u, -v);
}

void enumerate_ccsc(double x, double y, double phi, Best& best) {
    double t, u, v;
    if (LpRmSmLm(x, y, phi, t, u, v)) best.consider(4, t, -0.5 * M_PI, u, v);
    if (LpRmSmLm(-x, y, -phi, t, u, v)) best.consider(4, -t, 0.5 * M_PI, -u, -v);
    if (LpRmSmLm(x, -y, -phi, t, u, v)) best.consider(5, t, -0.5 * M_PI, u, v);
    if (LpRmSmLm(-x, -y, phi, t, u, v)) best.consider(5, -t, 0.5 * M_PI, -u, -v);

    if (LpRmSmRm(x, y, phi, t, u, v)) best.consider(8, t, -0.5 * M_PI, u, v);
    if (LpRmSmRm(-x, y, -phi, t, u, v)) best.consider(8, -t, 0.5 * M_PI, -u, -v);
    if (LpRmSmRm(x, -y, -phi, t, u, v)) best.consider(9, t, -0.5 * M_PI, u, v);
    if (LpRmSmRm(-x, -y, phi, t, u, v)) best.consider(9, -t, 0.5 * M_PI, -u, -v);

    const double xb = x * std::cos(phi) + y * std::sin(phi);
    const double yb = x * std::sin(phi) - y * std::cos(phi);
    if (LpRmSmLm(xb, yb, phi, t, u, v)) best.consider(6, v, u, -0.5 * M_PI, t);
    if (LpRmSmLm(-xb, yb, -phi, t, u, v)) best.consider(6, -v, -u, 0.5 * M_PI, -t);
    if (LpRmSmLm(xb, -yb, -phi, t, u, v)) best.consider(7, v, u, -0.5 * M_PI, t);
    if (LpRmSmLm(-xb, -yb, phi, t, u, v)) best.consider(7, -v, -u, 0.5 * M_PI, -t);

    if (LpRmSmRm(xb, yb, phi, t, u, v)) best.consider(10, v, u, -0.5 * M_PI, t);
    if (LpRmSmRm(-xb, yb, -phi, t, u, v)) best.consider(10, -v, -u, 0.5 * M_PI, -t);
    if (LpRmSmRm(xb, -yb, -phi, t, u, v)) best.consider(11, v, u, -0.5 * M_PI, t);
    if (LpRmSmRm(-xb, -yb, phi, t, u, v)) best.consider(11, -v, -u, 0.5 * M_PI, -t);
}

void enumerate_ccscc(double x, double y, double phi, Best& best) {
    double t, u, v;
    if (LpRmSLmRp(x, y, phi, t, u, v))
        best.consider(16, t, -0.5 * M_PI, u, -0.5 * M_PI, v);
    if (LpRmSLmRp(-x, y, -phi, t, u, v))
        best.consider(16, -t, 0.5 * M_PI, -u, 0.5 * M_PI, -v);
    if (LpRmSLmRp(x, -y, -phi, t, u, v))
        best.consider(17, t, -0.5 * M_PI, u, -0.5 * M_PI, v);
    if (LpRmSLmRp(-x, -y, phi, t, u, v))
        best.consider(17, -t, 0.5 * M_PI, -u, 0.5 * M_PI, -v);
}

}  // namespace

RsPath rs_shortest(const Pose& start, const Pose& goal, double rho_min) {
    if (!(rho_min > 0.0)) {
        throw std::invalid_argument("rs_shortest: rho_min must be positive");
    }
    const double dx = goal.x - start.x;
    const double dy = goal.y - start.y;
    const double c = std::cos(start.theta);
    const double s = std::sin(start.theta);
    const double x = (c * dx + s * dy) / rho_min;
    const double y = (-s * dx + c * dy) / rho_min;
    const double phi = wrap_angle_diff(goal.theta - start.theta);

    Best best;
    enumerate_csc(x, y, phi, best);
    enumerate_ccc(x, y, phi, best);
    enumerate_cccc(x, y, phi, best);
    enumerate_ccsc(x, y, phi, best);
    enumerate_ccscc(x, y, phi, best);

    const Candidate& cand = best.get();
    if (cand.word < 0) {
        throw std::runtime_error("rs_shortest: no word family produced a path");
    }

    RsPath path;
    path.total_length = cand.total * rho_min;
    for (int i = 0; i < 5; ++i) {
        const Seg seg = kWordTypes[cand.word][i];
        if (seg == kNop) break;
        const double len = cand.len[i] * rho_min;
        if (std::abs(len) < 1e-12) continue;
        RsSegment piece;
        piece.type = seg == kLeft    ? RsSegmentType::left
                     : seg == kRight ? RsSegmentType::right
                                     : RsSegmentType::straight;
        piece.length = len;
        path.segments.push_back(piece);
    }
    return path;
}

Pose rs_pose_at(const Pose& start, const RsPath& path, double rho_min, double s) {
    double remaining = std::clamp(s, 0.0, path.total_length);
    Pose p = start;
    for (const RsSegment& seg : path.segments) {
        if (remaining <= 0.0) break;
        const double take = std::min(remaining, std::abs(seg.length));
        const double t = std::copysign(take, seg.length) / rho_min;
        const double th = p.theta;
        switch (seg.type) {
            case RsSegmentType::left:
                p.x += rho_min * (std::sin(th + t) - std::sin(th));
                p.y += rho_min * (-std::cos(th + t) + std::cos(th));
                p.theta = th + t;
                break;
            case RsSegmentType::right:
                p.x += rho_min * (-std::sin(th - t) + std::sin(th));
                p.y += rho_min * (std::cos(th - t) - std::cos(th));
                p.theta = th - t;
                break;
            case RsSegmentType::straight:
                p.x += rho_min * t * std::cos(th);
                p.y += rho_min * t * std::sin(th);
                break;
        }
        remaining -= take;
    }
    return p;
}

}  // namespace offroad
