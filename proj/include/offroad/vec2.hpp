#pragma once

#include <cmath>

namespace offroad {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double squared_norm(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

// Wraps an angle to [0, 2*pi).
inline double wrap_angle_2pi(double a) {
    const double two_pi = 2.0 * M_PI;
    double w = std::fmod(a, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

// Wraps an angle difference to (-pi, pi].
inline double wrap_angle_diff(double a) {
    const double two_pi = 2.0 * M_PI;
    double w = std::fmod(a + M_PI, two_pi);
    if (w <= 0.0) w += two_pi;
    return w - M_PI;
}

}  // namespace offroad
