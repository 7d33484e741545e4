#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "waffle/arrangement.hpp"
#include "waffle/cubulation.hpp"

// Deterministic SVG figures: disc-model line patterns, Klein-model chamber
// complexes, and 2-skeleton projections of cube complex models.

namespace waffle {

namespace svg_detail {

struct Canvas {
    std::ostringstream body;
    double size = 720.0;

    double X(double x) const { return (x + 1.1) / 2.2 * size; }
    double Y(double y) const { return (1.1 - y) / 2.2 * size; }

    void circle(double cx, double cy, double r, const std::string& style) {
        body << "<circle cx='" << X(cx) << "' cy='" << Y(cy) << "' r='" << r / 2.2 * size
             << "' " << style << "/>\n";
    }
    void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& style,
                  bool close = false) {
        body << (close ? "<polygon points='" : "<polyline points='");
        for (const auto& p : pts) body << X(p[0]) << "," << Y(p[1]) << " ";
        body << "' " << style << "/>\n";
    }
    void text(double x, double y, const std::string& s) {
        body << "<text x='" << X(x) << "' y='" << Y(y) << "' font-size='10' fill='#444'>" << s
             << "</text>\n";
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        require(bool(out), errc::io_error, "cannot write " + path);
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size << "' height='" << size
            << "' viewBox='0 0 " << size << " " << size << "'>\n"
            << "<rect width='100%' height='100%' fill='white'/>\n"
            << body.str() << "</svg>\n";
    }
};

inline std::vector<std::array<double, 2>> disc_samples(const Geodesic& g, int n = 96) {
    // walk the geodesic through the frame (0, infinity) and map to the disc
    MobiusMap frame = mobius_to_vertical(g.a, g.b).inverse();
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < n; ++i) {
        double s = -7.0 + 14.0 * i / (n - 1);
        DiscPoint p = to_disc(apply(frame, HPoint{0.0, std::exp(s)}));
        pts.push_back({p.u, p.v});
    }
    return pts;
}

} // namespace svg_detail

inline void pattern_svg(const LinePattern& pattern, const std::string& path) {
    svg_detail::Canvas canvas;
    canvas.circle(0, 0, 1.0, "fill='none' stroke='black' stroke-width='1.5'");
    for (const auto& line : pattern.lines)
        canvas.polyline(svg_detail::disc_samples(line.geo),
                        "fill='none' stroke='#1a6fb0' stroke-width='1'");
    canvas.write(path);
}

inline void chambers_svg(const ChamberComplex& cc, const std::string& path) {
    svg_detail::Canvas canvas;
    double K = cc.klein_radius;
    for (std::size_t i = 0; i < cc.chambers.size(); ++i) {
        const auto& c = cc.chambers[i];
        canvas.polyline(c.outline,
                        c.bounded ? "fill='#cfe8cf' stroke='none'" : "fill='#f2f2f2' stroke='none'",
                        true);
    }
    canvas.circle(0, 0, K, "fill='none' stroke='black' stroke-width='1.5'");
    for (const auto& ch : cc.chords) {
        double h = std::sqrt(std::max(0.0, K * K - ch.c * ch.c));
        klein::Vec p = ch.at(-h), q = ch.at(h);
        canvas.polyline({{p.x, p.y}, {q.x, q.y}}, "fill='none' stroke='#444' stroke-width='0.8'");
    }
    for (std::size_t i = 0; i < cc.chambers.size(); ++i)
        canvas.text(cc.chambers[i].inner.x, cc.chambers[i].inner.y, std::to_string(i));
    canvas.write(path);
}

inline void skeleton_svg(const CubeComplexModel& model, const ChamberComplex& cc,
                         const std::string& path) {
    // realized vertices sit at their chamber; the rest relax to the average of
    // their neighbours
    std::vector<std::array<double, 2>> pos(model.vertex_count(), {0.0, 0.0});
    std::vector<char> fixed(model.vertex_count(), 0);
    for (std::size_t ch = 0; ch < model.realized.size(); ++ch) {
        pos[model.realized[ch]] = {cc.chambers[ch].inner.x, cc.chambers[ch].inner.y};
        fixed[model.realized[ch]] = 1;
    }
    for (int round = 0; round < 60; ++round) {
        for (std::size_t v = 0; v < model.vertex_count(); ++v) {
            if (fixed[v] || model.adjacency[v].empty()) continue;
            double x = 0, y = 0;
            for (auto [w, u] : model.adjacency[v]) {
                (void)w;
                x += pos[u][0];
                y += pos[u][1];
            }
            pos[v] = {x / model.adjacency[v].size(), y / model.adjacency[v].size()};
        }
    }
    svg_detail::Canvas canvas;
    for (const auto& c : model.cubes) {
        if (c.walls.size() != 2) continue;
        int v0 = c.base;
        int v1 = model.neighbor_across(v0, c.walls[0]);
        int v3 = model.neighbor_across(v0, c.walls[1]);
        int v2 = model.neighbor_across(v1, c.walls[1]);
        canvas.polyline({pos[v0], pos[v1], pos[v2], pos[v3]},
                        c.margin ? "fill='#f6e3c5' opacity='0.6'" : "fill='#dbe7f6' opacity='0.6'",
                        true);
    }
    for (const auto& e : model.edges)
        canvas.polyline({pos[e[0]], pos[e[1]]}, "fill='none' stroke='#333' stroke-width='0.7'");
    for (std::size_t v = 0; v < model.vertex_count(); ++v)
        canvas.circle(pos[v][0], pos[v][1], model.is_realized[v] ? 0.012 : 0.008,
                      model.is_realized[v] ? "fill='#b03030'" : "fill='#777'");
    canvas.write(path);
}

} // namespace waffle
