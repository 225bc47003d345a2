#include "offroad/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace offroad {

namespace {

struct Frame {
    double x_min, y_min, x_max, y_max;  // world rect covered by the drawing
    double scale;

    void grow(Vec2 p) {
        x_min = std::min(x_min, p.x);
        y_min = std::min(y_min, p.y);
        x_max = std::max(x_max, p.x);
        y_max = std::max(y_max, p.y);
    }
    double px(double x) const { return (x - x_min) * scale; }
    double py(double y) const { return (y_max - y) * scale; }  // SVG y grows down
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void polyline(std::ofstream& out, const Frame& f, const std::vector<Vec2>& pts,
              const char* style) {
    if (pts.size() < 2) return;
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (const Vec2& p : pts) out << fmt(f.px(p.x)) << ',' << fmt(f.py(p.y)) << ' ';
    out << "\"/>\n";
}

void quad(std::ofstream& out, const Frame& f, const std::array<Vec2, 4>& v, const char* style) {
    out << "<polygon " << style << " points=\"";
    for (const Vec2& p : v) out << fmt(f.px(p.x)) << ',' << fmt(f.py(p.y)) << ' ';
    out << "\"/>\n";
}

}  // namespace

void write_plan_svg(const std::filesystem::path& path, const Scenario& scenario,
                    const DiscGeometry& g, const ReferenceTrajectory* ref,
                    const TunnelSet* tunnels, const NlpSolution* sol) {
    Frame f{scenario.bounds.x_min, scenario.bounds.y_min, scenario.bounds.x_max,
            scenario.bounds.y_max, 1.0};
    if (ref) {
        for (const ReferenceSample& s : ref->samples) f.grow({s.state.x, s.state.y});
    }
    if (tunnels) {
        for (const auto* side : {&tunnels->rects_f, &tunnels->rects_r}) {
            for (const RectExpansion& r : *side) {
                if (r.degenerate) continue;
                for (const Vec2& v : r.rect.vertices) f.grow(v);
            }
        }
    }
    if (sol) {
        for (const State& s : sol->states) f.grow({s.x, s.y});
    }
    const double margin = 2.0;
    f.x_min -= margin;
    f.y_min -= margin;
    f.x_max += margin;
    f.y_max += margin;
    f.scale = 900.0 / std::max(f.x_max - f.x_min, f.y_max - f.y_min);
    const double w = (f.x_max - f.x_min) * f.scale;
    const double h = (f.y_max - f.y_min) * f.scale;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("svg: cannot open '" + path.string() + "' for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\""
        << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << fmt(f.px(scenario.bounds.x_min)) << "\" y=\""
        << fmt(f.py(scenario.bounds.y_max)) << "\" width=\""
        << fmt(scenario.bounds.width() * f.scale) << "\" height=\""
        << fmt(scenario.bounds.height() * f.scale)
        << "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";

    for (const Vec2& p : scenario.obstacles) {
        out << "<circle cx=\"" << fmt(f.px(p.x)) << "\" cy=\"" << fmt(f.py(p.y)) << "\" r=\""
            << fmt(g.radius * f.scale) << "\" fill=\"#f4a0a0\" fill-opacity=\"0.45\"/>\n";
    }

    if (tunnels) {
        for (const RectExpansion& r : tunnels->rects_f) {
            if (!r.degenerate) {
                quad(out, f, r.rect.vertices,
                     "fill=\"#2b8a3e\" fill-opacity=\"0.05\" stroke=\"#2b8a3e\" "
                     "stroke-width=\"1\"");
            }
        }
        for (const RectExpansion& r : tunnels->rects_r) {
            if (!r.degenerate) {
                quad(out, f, r.rect.vertices,
                     "fill=\"#1864ab\" fill-opacity=\"0.05\" stroke=\"#1864ab\" "
                     "stroke-width=\"1\" stroke-dasharray=\"6 3\"");
            }
        }
    }

    if (ref) {
        std::vector<Vec2> pts;
        pts.reserve(ref->samples.size());
        for (const ReferenceSample& s : ref->samples) pts.push_back({s.state.x, s.state.y});
        polyline(out, f, pts,
                 "stroke=\"#868e96\" stroke-width=\"2\" stroke-dasharray=\"8 5\"");
    }

    if (sol) {
        std::vector<Vec2> pts;
        pts.reserve(sol->states.size());
        for (const State& s : sol->states) pts.push_back({s.x, s.y});
        polyline(out, f, pts, "stroke=\"#c92a2a\" stroke-width=\"2.5\"");
    }

    for (const Vec2& p : scenario.obstacles) {
        out << "<circle cx=\"" << fmt(f.px(p.x)) << "\" cy=\"" << fmt(f.py(p.y))
            << "\" r=\"2\" fill=\"#495057\"/>\n";
    }

    quad(out, f, footprint_vertices(scenario.start.pose(), scenario.vehicle),
         "fill=\"none\" stroke=\"#2b8a3e\" stroke-width=\"2\"");
    quad(out, f, footprint_vertices(scenario.goal.pose(), scenario.vehicle),
         "fill=\"none\" stroke=\"#862e9c\" stroke-width=\"2\"");

    out << "</svg>\n";
    if (!out) throw std::runtime_error("svg: write to '" + path.string() + "' failed");
}

}  // namespace offroad
