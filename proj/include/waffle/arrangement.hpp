#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "waffle/config.hpp"
#include "waffle/errors.hpp"
#include "waffle/hyperbolic.hpp"
#include "waffle/pattern.hpp"

// Chamber decomposition of a line-pattern window. All incidence geometry is
// done in the Klein model, where geodesics are straight chords and the window
// ball about the base point is a Euclidean disc about the origin.

namespace waffle {

namespace klein {

struct Vec {
    double x = 0.0, y = 0.0;
};

inline Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
inline Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
inline Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }
inline double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec a, Vec b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec a) { return std::hypot(a.x, a.y); }
inline Vec perp(Vec a) { return {-a.y, a.x}; }

// Chord of the unit circle in normal form dot(n, P) = c with c >= 0.
struct Chord {
    Vec n;      // unit normal pointing at the chord
    double c;   // distance from the origin
    Vec d;      // unit direction along the chord (perp of n)

    Vec at(double t) const { return c * n + t * d; }
    double param(Vec p) const { return dot(p, d); }
    int side(Vec p) const {
        double s = dot(p, n) - c;
        return s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
    }
};

inline Chord chord_of(const Geodesic& g) {
    double a = disc_angle(g.a), b = disc_angle(g.b);
    Vec A{std::cos(a), std::sin(a)}, B{std::cos(b), std::sin(b)};
    Vec M = 0.5 * (A + B);
    Chord ch;
    if (norm(M) < 1e-14) {
        Vec dir = B - A;
        ch.n = (1.0 / norm(dir)) * perp(dir);
        ch.c = 0.0;
    } else {
        ch.n = (1.0 / norm(M)) * M;
        ch.c = dot(ch.n, A);
    }
    if (ch.c < 0.0) {
        ch.n = -1.0 * ch.n;
        ch.c = -ch.c;
    }
    ch.d = perp(ch.n);
    return ch;
}

} // namespace klein

struct ChamberComplex {
    struct Vertex {
        klein::Vec p;
        int line1 = -1, line2 = -1; // crossing lines; -1,-1 for window vertices
        bool on_window = false;
    };
    struct Edge {
        int v0 = -1, v1 = -1;
        int line = -1;            // -1 marks a window arc
        int left = -1, right = -1; // chamber ids (window arcs: left only)
        bool arc_ccw_from_v0 = true;
    };
    struct Chamber {
        std::vector<int> vertices;                  // boundary order
        std::vector<int> edges;
        std::vector<std::array<double, 2>> outline; // sampled polygon, arcs subdivided
        std::vector<std::int8_t> side;              // sign per line
        bool bounded = false;
        klein::Vec inner;                           // representative interior point
    };

    std::vector<Geodesic> lines;      // lines that properly meet the window
    std::vector<klein::Chord> chords; // one per line
    std::vector<std::string> line_labels;
    std::vector<int> skipped_lines;   // pattern indices of tangent-grazing lines
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<Chamber> chambers;
    double window_radius = 0.0; // hyperbolic
    double klein_radius = 0.0;
    int interior_edge_count = 0;

    int line_count() const { return static_cast<int>(lines.size()); }
};

namespace detail {

struct HalfEdge {
    int edge = -1;
    bool forward = true; // v0 -> v1
};

inline int he_index(int edge, bool forward) { return 2 * edge + (forward ? 0 : 1); }

} // namespace detail

inline ChamberComplex arrangement(const LinePattern& pattern, const Window& window,
                                  const Tolerances& tol = default_tolerances()) {
    ChamberComplex cc;
    cc.window_radius = window.radius;
    const double K = std::tanh(window.radius);
    cc.klein_radius = K;

    for (std::size_t i = 0; i < pattern.lines.size(); ++i) {
        klein::Chord ch = klein::chord_of(pattern.lines[i].geo);
        double hh = K * K - ch.c * ch.c;
        if (hh <= 1e-18 || std::sqrt(std::max(0.0, hh)) < 1e-9) {
            cc.skipped_lines.push_back(static_cast<int>(i));
            continue;
        }
        cc.lines.push_back(pattern.lines[i].geo);
        cc.chords.push_back(ch);
        cc.line_labels.push_back(pattern.lines[i].orbit_label);
    }
    const int m = cc.line_count();

    if (m == 0) {
        // single chamber: the whole window
        ChamberComplex::Chamber c;
        c.bounded = false;
        for (int k = 0; k < 64; ++k) {
            double a = 2.0 * pi * k / 64;
            c.outline.push_back({K * std::cos(a), K * std::sin(a)});
        }
        c.inner = {0.0, 0.0};
        cc.chambers.push_back(c);
        return cc;
    }

    // events per chord: crossings inside the window plus the two circle exits
    std::vector<std::vector<std::pair<double, int>>> events(m);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const auto& ci = cc.chords[i];
            const auto& cj = cc.chords[j];
            double det = klein::cross(ci.n, cj.n);
            if (std::abs(det) < 1e-15) continue; // parallel chords
            klein::Vec p{(ci.c * cj.n.y - cj.c * ci.n.y) / det,
                         (ci.n.x * cj.c - cj.n.x * ci.c) / det};
            // crossings essentially on the window circle would create
            // micro-faces; a hair of truncation is hyperbolically negligible
            if (klein::norm(p) >= K - 1e-9) continue;
            require(crossing_angle(cc.lines[i], cc.lines[j]) >= tol.tangency_angle,
                    errc::near_tangency, "two pattern lines cross at a degenerate angle");
            int vid = static_cast<int>(cc.vertices.size());
            cc.vertices.push_back({p, i, j, false});
            events[i].push_back({ci.param(p), vid});
            events[j].push_back({cj.param(p), vid});
        }
    }
    std::vector<int> boundary_vertices;
    for (int i = 0; i < m; ++i) {
        const auto& ch = cc.chords[i];
        double h = std::sqrt(K * K - ch.c * ch.c);
        for (double t : {-h, h}) {
            int vid = static_cast<int>(cc.vertices.size());
            cc.vertices.push_back({ch.at(t), i, -1, true});
            events[i].push_back({t, vid});
            boundary_vertices.push_back(vid);
        }
    }
    // chord edges
    for (int i = 0; i < m; ++i) {
        auto& ev = events[i];
        std::sort(ev.begin(), ev.end());
        for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
            require(ev[k + 1].first - ev[k].first >= tol.vertex_merge, errc::degenerate_arrangement,
                    "coincident arrangement vertices (triple crossing?)");
            cc.edges.push_back({ev[k].second, ev[k + 1].second, i, -1, -1, true});
        }
    }
    cc.interior_edge_count = static_cast<int>(cc.edges.size());
    // window arcs between consecutive boundary vertices
    auto angle_of = [&](int vid) {
        return std::atan2(cc.vertices[vid].p.y, cc.vertices[vid].p.x);
    };
    std::sort(boundary_vertices.begin(), boundary_vertices.end(),
              [&](int a, int b) { return angle_of(a) < angle_of(b); });
    const int nb = static_cast<int>(boundary_vertices.size());
    for (int k = 0; k < nb; ++k) {
        int u = boundary_vertices[k], v = boundary_vertices[(k + 1) % nb];
        cc.edges.push_back({u, v, -1, -1, -1, true});
    }

    // --- half-edge face walk ------------------------------------------------
    const int E = static_cast<int>(cc.edges.size());
    auto origin = [&](int he) { return (he % 2 == 0) ? cc.edges[he / 2].v0 : cc.edges[he / 2].v1; };
    auto target = [&](int he) { return (he % 2 == 0) ? cc.edges[he / 2].v1 : cc.edges[he / 2].v0; };
    auto direction = [&](int he) -> klein::Vec {
        const auto& e = cc.edges[he / 2];
        bool fwd = (he % 2 == 0);
        if (e.line >= 0) {
            klein::Vec d = cc.vertices[target(he)].p - cc.vertices[origin(he)].p;
            return (1.0 / klein::norm(d)) * d;
        }
        // arc edge, stored counterclockwise from v0 to v1
        klein::Vec p = cc.vertices[origin(he)].p;
        klein::Vec t = (1.0 / klein::norm(p)) * klein::perp(p);
        return fwd ? t : -1.0 * t;
    };

    std::vector<std::vector<int>> outgoing(cc.vertices.size());
    for (int he = 0; he < 2 * E; ++he) outgoing[origin(he)].push_back(he);
    std::vector<double> he_angle(2 * E);
    for (int he = 0; he < 2 * E; ++he) {
        klein::Vec d = direction(he);
        he_angle[he] = std::atan2(d.y, d.x);
    }
    for (auto& list : outgoing)
        std::sort(list.begin(), list.end(),
                  [&](int a, int b) { return he_angle[a] < he_angle[b]; });

    // next half-edge: the rotational predecessor of the twin at the target
    auto next_he = [&](int he) {
        int tw = he ^ 1;
        const auto& list = outgoing[origin(tw)];
        auto it = std::find(list.begin(), list.end(), tw);
        std::size_t idx = static_cast<std::size_t>(it - list.begin());
        return list[(idx + list.size() - 1) % list.size()];
    };

    std::vector<int> face_of(2 * E, -1);
    std::vector<std::vector<int>> face_halfedges;
    for (int he = 0; he < 2 * E; ++he) {
        if (face_of[he] >= 0) continue;
        int f = static_cast<int>(face_halfedges.size());
        face_halfedges.push_back({});
        int cur = he;
        int guard = 0;
        do {
            face_of[cur] = f;
            face_halfedges[f].push_back(cur);
            cur = next_he(cur);
            require(++guard <= 4 * E, errc::degenerate_arrangement, "face walk did not close");
        } while (cur != he);
    }

    // --- build chambers ------------------------------------------------------
    struct FaceData {
        std::vector<std::array<double, 2>> outline;
        std::vector<int> vertices, edges;
        std::vector<std::int8_t> bound_side; // per line: side forced by a bounding edge
        double area = 0.0;
        bool has_arc = false;
    };
    std::vector<FaceData> faces(face_halfedges.size());
    for (std::size_t f = 0; f < face_halfedges.size(); ++f) {
        FaceData& fd = faces[f];
        fd.bound_side.assign(m, 0);
        for (int he : face_halfedges[f]) {
            const auto& e = cc.edges[he / 2];
            fd.vertices.push_back(origin(he));
            fd.edges.push_back(he / 2);
            klein::Vec p0 = cc.vertices[origin(he)].p;
            fd.outline.push_back({p0.x, p0.y});
            if (e.line < 0) {
                fd.has_arc = true;
                // subdivide the arc between origin and target along the circle
                double a0 = std::atan2(p0.y, p0.x);
                klein::Vec p1 = cc.vertices[target(he)].p;
                double a1 = std::atan2(p1.y, p1.x);
                bool fwd = (he % 2 == 0); // stored ccw from v0
                double span = a1 - a0;
                if (fwd && span < 0) span += 2.0 * pi;
                if (!fwd && span > 0) span -= 2.0 * pi;
                int steps = std::max(4, static_cast<int>(std::abs(span) / 0.02));
                for (int s = 1; s < steps; ++s) {
                    double a = a0 + span * s / steps;
                    fd.outline.push_back({K * std::cos(a), K * std::sin(a)});
                }
            } else {
                // the face lies to the left of this half-edge, which pins its
                // side of the bounding line exactly
                klein::Vec dir = cc.vertices[target(he)].p - cc.vertices[origin(he)].p;
                bool along = klein::dot(dir, cc.chords[e.line].d) > 0;
                fd.bound_side[e.line] = along ? -1 : 1;
            }
        }
        for (std::size_t k = 0; k < fd.outline.size(); ++k) {
            auto& p = fd.outline[k];
            auto& q = fd.outline[(k + 1) % fd.outline.size()];
            fd.area += 0.5 * (p[0] * q[1] - p[1] * q[0]);
        }
    }

    // drop the outer face: the unique one whose orientation disagrees
    int positive = 0, negative = 0;
    for (auto& fd : faces) (fd.area >= 0 ? positive : negative)++;
    int outer = -1;
    if (negative == 1 || positive == 1) {
        for (std::size_t f = 0; f < faces.size(); ++f) {
            bool minority = (negative == 1) ? faces[f].area < 0 : faces[f].area >= 0;
            if (minority) outer = static_cast<int>(f);
        }
    }
    require(outer >= 0, errc::degenerate_arrangement, "could not identify the outer face");

    std::vector<int> chamber_of_face(faces.size(), -1);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (static_cast<int>(f) == outer) continue;
        const FaceData& fd = faces[f];
        ChamberComplex::Chamber c;
        c.vertices = fd.vertices;
        c.edges = fd.edges;
        c.outline = fd.outline;
        c.bounded = !fd.has_arc;
        // centroid of the sampled polygon
        double cx = 0, cy = 0, aa = 0;
        for (std::size_t k = 0; k < fd.outline.size(); ++k) {
            auto& p = fd.outline[k];
            auto& q = fd.outline[(k + 1) % fd.outline.size()];
            double w = p[0] * q[1] - p[1] * q[0];
            aa += w;
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        c.inner = {cx / (3.0 * aa), cy / (3.0 * aa)};
        c.side.resize(m);
        for (int i = 0; i < m; ++i) {
            // sides of bounding lines come from the face walk; the centroid
            // only decides lines the face does not touch
            if (fd.bound_side[i] != 0) {
                c.side[i] = fd.bound_side[i];
            } else {
                int s = cc.chords[i].side(c.inner);
                c.side[i] = static_cast<std::int8_t>(s == 0 ? 1 : s);
            }
        }
        chamber_of_face[f] = static_cast<int>(cc.chambers.size());
        cc.chambers.push_back(std::move(c));
    }

    // deterministic chamber ids: lexicographic over sorted incident crossing
    // points (window vertices as fallback)
    auto chamber_key = [&](const ChamberComplex::Chamber& c) {
        std::vector<std::array<double, 2>> pts;
        for (int v : c.vertices)
            if (!cc.vertices[v].on_window)
                pts.push_back({std::round(cc.vertices[v].p.x * 1e10) / 1e10,
                               std::round(cc.vertices[v].p.y * 1e10) / 1e10});
        if (pts.empty())
            for (int v : c.vertices)
                pts.push_back({std::round(cc.vertices[v].p.x * 1e10) / 1e10,
                               std::round(cc.vertices[v].p.y * 1e10) / 1e10});
        std::sort(pts.begin(), pts.end());
        return pts;
    };
    std::vector<int> order(cc.chambers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<std::vector<std::array<double, 2>>> keys(cc.chambers.size());
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = chamber_key(cc.chambers[i]);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        // the side vector breaks ties between the two faces of a lens chord
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return cc.chambers[a].side < cc.chambers[b].side;
    });
    std::vector<int> new_id(cc.chambers.size());
    std::vector<ChamberComplex::Chamber> sorted;
    sorted.reserve(cc.chambers.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        new_id[order[rank]] = static_cast<int>(rank);
        sorted.push_back(std::move(cc.chambers[order[rank]]));
    }
    cc.chambers = std::move(sorted);

    // edge -> chamber incidences
    for (int he = 0; he < 2 * E; ++he) {
        int f = face_of[he];
        int cid = (f == outer) ? -1 : new_id[chamber_of_face[f]];
        auto& e = cc.edges[he / 2];
        // the face of a half-edge lies to its left; store per orientation
        if (he % 2 == 0) e.left = cid;
        else e.right = cid;
    }
    // interior edges must separate two chambers
    for (int k = 0; k < cc.interior_edge_count; ++k) {
        require(cc.edges[k].left >= 0 && cc.edges[k].right >= 0 &&
                    cc.edges[k].left != cc.edges[k].right,
                errc::degenerate_arrangement, "interior edge does not separate two chambers");
    }

    // Euler characteristic of the clipped arrangement (outer face removed)
    long long V = static_cast<long long>(cc.vertices.size());
    long long Ecount = static_cast<long long>(cc.edges.size());
    long long F = static_cast<long long>(cc.chambers.size());
    require(V - Ecount + F == 1, errc::degenerate_arrangement,
            "arrangement fails the Euler check");
    return cc;
}

// ---------------------------------------------------------------------------
// Filling

struct FillingReport {
    bool filling = false;
    int witness_chamber = -1; // an unbounded chamber meeting the core region
    int interior_chambers = 0;
    int core_chambers = 0;     // chambers wholly inside the core region
    double margin = 0.0;
    double unbounded_reach = 0.0; // deepest entry of any unbounded chamber, from the window edge
};

namespace detail {

inline double polygon_distance_to_origin(const std::vector<std::array<double, 2>>& poly) {
    // 0 when the origin is inside
    bool inside = true;
    int sign = 0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % poly.size()];
        double cr = p[0] * (q[1] - p[1]) - p[1] * (q[0] - p[0]);
        int s = cr > 0 ? 1 : (cr < 0 ? -1 : 0);
        if (s != 0) {
            if (sign == 0) sign = s;
            else if (s != sign) inside = false;
        }
    }
    if (inside && !poly.empty()) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % poly.size()];
        double dx = q[0] - p[0], dy = q[1] - p[1];
        double len2 = dx * dx + dy * dy;
        double t = len2 > 0 ? std::clamp(-(p[0] * dx + p[1] * dy) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, std::hypot(p[0] + t * dx, p[1] + t * dy));
    }
    return best;
}

} // namespace detail

// A window certifies filling when every chamber that reaches into the core
// region (margin inside the window boundary) is a bounded polygon. The
// witness on failure is a chamber meeting the core yet touching the window.
inline FillingReport filling_check(const ChamberComplex& cc, const Window& window,
                                   double margin = -1.0,
                                   const Tolerances& tol = default_tolerances()) {
    if (margin < 0) margin = tol.filling_margin;
    FillingReport report;
    report.margin = margin;
    double core_radius = window.radius - margin;
    require(core_radius > 0, errc::window_too_small, "margin leaves no interior region");
    double Kcore = std::tanh(core_radius);

    bool all_bounded = true;
    for (std::size_t i = 0; i < cc.chambers.size(); ++i) {
        const auto& c = cc.chambers[i];
        double dist = detail::polygon_distance_to_origin(c.outline);
        bool meets_core = dist < Kcore;
        double far = 0.0;
        for (const auto& p : c.outline) far = std::max(far, std::hypot(p[0], p[1]));
        if (far <= Kcore) report.core_chambers += 1;
        if (!c.bounded) {
            double depth = window.radius - std::atanh(std::min(dist, 1.0 - 1e-16));
            report.unbounded_reach = std::max(report.unbounded_reach, depth);
        }
        if (!meets_core) continue;
        report.interior_chambers += 1;
        if (!c.bounded) {
            all_bounded = false;
            if (report.witness_chamber < 0) report.witness_chamber = static_cast<int>(i);
        }
    }
    require(report.interior_chambers > 0, errc::window_too_small,
            "no chamber meets the interior region");
    if (all_bounded)
        require(report.core_chambers > 0, errc::window_too_small,
                "no chamber lies wholly in the interior region");
    report.filling = all_bounded;
    return report;
}

// ---------------------------------------------------------------------------
// Shadow graph

struct ShadowGraph {
    struct Edge {
        int c1 = -1, c2 = -1;
        int line = -1;
    };
    int chamber_count = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<std::pair<int, int>>> adjacency; // (neighbor, line)
    int max_degree = 0;
    bool connected = false;
};

inline ShadowGraph shadow_graph(const ChamberComplex& cc) {
    ShadowGraph g;
    g.chamber_count = static_cast<int>(cc.chambers.size());
    g.adjacency.resize(g.chamber_count);
    for (int k = 0; k < cc.interior_edge_count; ++k) {
        const auto& e = cc.edges[k];
        g.edges.push_back({e.left, e.right, e.line});
        g.adjacency[e.left].push_back({e.right, e.line});
        g.adjacency[e.right].push_back({e.left, e.line});
    }
    for (const auto& list : g.adjacency)
        g.max_degree = std::max(g.max_degree, static_cast<int>(list.size()));
    // connectivity over the window interior
    if (g.chamber_count > 0) {
        std::vector<char> seen(g.chamber_count, 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [u, line] : g.adjacency[v]) {
                (void)line;
                if (!seen[u]) {
                    seen[u] = 1;
                    ++count;
                    stack.push_back(u);
                }
            }
        }
        g.connected = (count == g.chamber_count);
    }
    return g;
}

} // namespace waffle
