#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <vector>

#include "waffle/cubulation.hpp"

// Transport of consistent orientations along a boundary matching of two wall
// systems: the cube-complex isomorphism induced by a pattern-matching
// boundary bijection, plus its verification.

namespace waffle {

// Boundary data of one wall: canonically ordered endpoints and the chamber
// side that faces the canonical (counterclockwise from first to second) arc.
struct WallBoundary {
    BoundaryPoint e1, e2; // boundary_angle(e1) < boundary_angle(e2)
    int canonical_arc_side = 0;
};

inline WallBoundary wall_boundary(const WallSystem& ws, int wall) {
    require(wall >= 0 && wall < static_cast<int>(ws.wall_geodesics.size()), errc::unknown_wall,
            "wall has no geodesic data");
    const Geodesic& g = ws.wall_geodesics[wall];
    WallBoundary wb;
    wb.e1 = g.a;
    wb.e2 = g.b;
    if (boundary_angle(wb.e1) > boundary_angle(wb.e2)) std::swap(wb.e1, wb.e2);
    // probe the canonical arc's midpoint just inside the disc
    double mid = 0.5 * (boundary_angle(wb.e1) + boundary_angle(wb.e2));
    BoundaryPoint probe =
        (std::abs(mid - pi) < 1e-14 || std::abs(mid + pi) < 1e-14)
            ? BoundaryPoint::infinity()
            : boundary(std::tan(mid / 2.0));
    double a = disc_angle(probe);
    klein::Chord chord = klein::chord_of(g);
    wb.canonical_arc_side = chord.side({0.999 * std::cos(a), 0.999 * std::sin(a)});
    return wb;
}

// A quasimatching of two wall systems: a wall bijection together with, per
// wall, how its two boundary half-arcs are paired with the image wall's.
struct QuasiMatching {
    std::vector<int> wall_bijection; // wall of system 1 -> wall of system 2
    std::vector<std::uint8_t> arc_flip; // canonical arc maps to the image's other arc

    QuasiMatching() = default;

    static QuasiMatching identity(int walls) {
        QuasiMatching m;
        m.wall_bijection.resize(walls);
        for (int w = 0; w < walls; ++w) m.wall_bijection[w] = w;
        m.arc_flip.assign(walls, 0);
        return m;
    }

    QuasiMatching then(const QuasiMatching& second) const {
        QuasiMatching out;
        out.wall_bijection.resize(wall_bijection.size());
        out.arc_flip.resize(wall_bijection.size());
        for (std::size_t w = 0; w < wall_bijection.size(); ++w) {
            out.wall_bijection[w] = second.wall_bijection.at(wall_bijection[w]);
            out.arc_flip[w] =
                static_cast<std::uint8_t>(arc_flip[w] ^ second.arc_flip.at(wall_bijection[w]));
        }
        return out;
    }
};

namespace detail {

// endpoint map induced by the matching under an orientation hypothesis
inline std::vector<std::pair<double, double>> endpoint_map(const WallSystem& ws1,
                                                           const WallSystem& ws2,
                                                           const QuasiMatching& m,
                                                           bool orientation_preserving) {
    std::vector<std::pair<double, double>> pairs; // (angle in system1, image angle)
    for (int w = 0; w < ws1.wall_count; ++w) {
        WallBoundary src = wall_boundary(ws1, w);
        WallBoundary dst = wall_boundary(ws2, m.wall_bijection.at(w));
        bool flip = m.arc_flip.at(w) != 0;
        BoundaryPoint i1, i2; // images of src.e1, src.e2
        if (orientation_preserving) {
            if (!flip) {
                i1 = dst.e1;
                i2 = dst.e2;
            } else {
                i1 = dst.e2;
                i2 = dst.e1;
            }
        } else {
            if (!flip) {
                i1 = dst.e2;
                i2 = dst.e1;
            } else {
                i1 = dst.e1;
                i2 = dst.e2;
            }
        }
        pairs.push_back({boundary_angle(src.e1), boundary_angle(i1)});
        pairs.push_back({boundary_angle(src.e2), boundary_angle(i2)});
    }
    return pairs;
}

inline bool cyclically_monotone(std::vector<std::pair<double, double>> pairs, bool increasing) {
    std::sort(pairs.begin(), pairs.end());
    // image angles must be a rotation of a sorted (or reverse-sorted) list
    const std::size_t n = pairs.size();
    if (n < 3) return true;
    int breaks = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double cur = pairs[k].second, next = pairs[(k + 1) % n].second;
        bool step_up = next > cur;
        if (increasing ? !step_up : step_up) ++breaks;
    }
    return breaks <= 1;
}

} // namespace detail

// Checks the matching is induced by a boundary-circle homeomorphism on the
// finite endpoint set; returns true for orientation-preserving, false for
// orientation-reversing, throws OrderViolation otherwise.
inline bool matching_orientation(const WallSystem& ws1, const WallSystem& ws2,
                                 const QuasiMatching& m) {
    require(m.wall_bijection.size() == static_cast<std::size_t>(ws1.wall_count) &&
                m.arc_flip.size() == m.wall_bijection.size(),
            errc::order_violation, "matching must cover every wall");
    std::vector<char> hit(ws2.wall_count, 0);
    for (int w : m.wall_bijection) {
        require(w >= 0 && w < ws2.wall_count && !hit[w], errc::order_violation,
                "wall bijection is not a bijection");
        hit[w] = 1;
    }
    if (detail::cyclically_monotone(detail::endpoint_map(ws1, ws2, m, true), true)) return true;
    if (detail::cyclically_monotone(detail::endpoint_map(ws1, ws2, m, false), false)) return false;
    fail(errc::order_violation, "matching breaks the cyclic order of wall endpoints");
}

struct CubeIsomorphism {
    std::vector<int> vertex_map; // model1 vertex -> model2 vertex
    std::vector<int> wall_map;   // equals the matching's bijection
    bool orientation_preserving = true;
};

// Transport every consistent orientation of model1 along the matching: each
// wall's chosen half-arc maps to the paired half-arc of the image wall.
inline CubeIsomorphism combinatorialize(const QuasiMatching& m, const WallSystem& ws1,
                                        const CubeComplexModel& model1, const WallSystem& ws2,
                                        const CubeComplexModel& model2) {
    CubeIsomorphism iso;
    iso.orientation_preserving = matching_orientation(ws1, ws2, m);
    iso.wall_map = m.wall_bijection;

    std::vector<WallBoundary> src(ws1.wall_count), dst(ws1.wall_count);
    for (int w = 0; w < ws1.wall_count; ++w) {
        src[w] = wall_boundary(ws1, w);
        dst[w] = wall_boundary(ws2, m.wall_bijection[w]);
    }

    std::unordered_map<OrientationKey, int, detail::KeyHash> index2;
    for (std::size_t v = 0; v < model2.vertex_count(); ++v)
        index2[model2.vertices[v]] = static_cast<int>(v);

    iso.vertex_map.resize(model1.vertex_count());
    OrientationKey key(std::max<std::size_t>(1, (ws2.wall_count + 63) / 64));
    for (std::size_t x = 0; x < model1.vertex_count(); ++x) {
        std::fill(key.begin(), key.end(), 0);
        for (int w = 0; w < ws1.wall_count; ++w) {
            int side = model1.side(static_cast<int>(x), w);
            bool canonical_arc = (side == src[w].canonical_arc_side);
            bool image_canonical = canonical_arc != (m.arc_flip[w] != 0);
            int image_side =
                image_canonical ? dst[w].canonical_arc_side : -dst[w].canonical_arc_side;
            if (image_side > 0) {
                int iw = m.wall_bijection[w];
                key[iw >> 6] |= (std::uint64_t(1) << (iw & 63));
            }
        }
        auto it = index2.find(key);
        require(it != index2.end(), errc::not_consistent,
                "transported orientation is not a vertex of the target waffle");
        iso.vertex_map[x] = it->second;
    }
    return iso;
}

struct IsomorphismReport {
    bool valid = false;
    std::string failure;
    int witness_edge = -1; // edge of model1 violating preservation, if any
};

// Full verification: bijectivity, labelled edge preservation, cube
// preservation, and the desk-scale closeness contract (images of square
// corners stay within max-cube-diameter of both image hyperplane carriers).
inline IsomorphismReport verify_isomorphism(const CubeIsomorphism& iso,
                                            const CubeComplexModel& m1,
                                            const CubeComplexModel& m2) {
    IsomorphismReport report;
    if (iso.vertex_map.size() != m1.vertex_count() || m1.vertex_count() != m2.vertex_count()) {
        report.failure = "vertex counts differ";
        return report;
    }
    std::vector<char> used(m2.vertex_count(), 0);
    for (int img : iso.vertex_map) {
        if (img < 0 || img >= static_cast<int>(m2.vertex_count()) || used[img]) {
            report.failure = "vertex map is not a bijection";
            return report;
        }
        used[img] = 1;
    }
    for (std::size_t e = 0; e < m1.edges.size(); ++e) {
        const auto& edge = m1.edges[e];
        int iv = iso.vertex_map[edge[0]], iu = iso.vertex_map[edge[1]];
        int iw = iso.wall_map.at(edge[2]);
        if (m2.neighbor_across(iv, iw) != iu) {
            report.failure = "edge not preserved with its wall label";
            report.witness_edge = static_cast<int>(e);
            return report;
        }
    }
    std::set<std::pair<int, std::vector<int>>> cubes2;
    for (const auto& c : m2.cubes) cubes2.insert({c.base, c.walls});
    for (const auto& c : m1.cubes) {
        std::vector<int> walls;
        for (int w : c.walls) walls.push_back(iso.wall_map.at(w));
        std::sort(walls.begin(), walls.end());
        int best = -1;
        for (std::uint32_t mask = 0; mask < (1u << c.walls.size()); ++mask) {
            int corner = c.base;
            for (std::size_t b = 0; b < c.walls.size(); ++b)
                if (mask & (1u << b)) corner = m1.neighbor_across(corner, c.walls[b]);
            int img = iso.vertex_map[corner];
            best = best < 0 ? img : std::min(best, img);
        }
        if (!cubes2.count({best, walls})) {
            report.failure = "cube not preserved";
            return report;
        }
    }

    // closeness: combinatorial distance from image vertices to the image
    // hyperplane carriers of the walls of any cube containing the source
    int D = dimension(m1);
    std::vector<std::vector<int>> carrier_dist(m2.wall_count);
    auto bfs_from_carrier = [&](int wall) {
        std::vector<int>& dist = carrier_dist[wall];
        if (!dist.empty()) return;
        dist.assign(m2.vertex_count(), -1);
        std::vector<int> queue;
        for (const auto& e : m2.edges)
            if (e[2] == wall) {
                for (int v : {e[0], e[1]})
                    if (dist[v] < 0) {
                        dist[v] = 0;
                        queue.push_back(v);
                    }
            }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            for (auto [w, u] : m2.adjacency[v]) {
                (void)w;
                if (dist[u] < 0) {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
    };
    for (const auto& c : m1.cubes) {
        if (c.walls.size() != 2) continue;
        for (std::uint32_t mask = 0; mask < 4; ++mask) {
            int corner = c.base;
            if (mask & 1) corner = m1.neighbor_across(corner, c.walls[0]);
            if (mask & 2) corner = m1.neighbor_across(corner, c.walls[1]);
            int img = iso.vertex_map[corner];
            for (int w : c.walls) {
                int iw = iso.wall_map.at(w);
                bfs_from_carrier(iw);
                if (carrier_dist[iw][img] < 0 || carrier_dist[iw][img] > D) {
                    report.failure = "image vertex left the coarse intersection of its carriers";
                    return report;
                }
            }
        }
    }
    report.valid = true;
    return report;
}

// Matching induced by an isometry carrying the lines of one system onto the
// lines of another (endpoints matched within the pattern tolerance).
inline QuasiMatching matching_from_mobius(const WallSystem& ws1, const WallSystem& ws2,
                                          const MobiusMap& g,
                                          const Tolerances& tol = default_tolerances()) {
    require(ws1.wall_count == ws2.wall_count, errc::order_violation, "wall counts differ");
    QuasiMatching m;
    m.wall_bijection.assign(ws1.wall_count, -1);
    m.arc_flip.assign(ws1.wall_count, 0);
    for (int w = 0; w < ws1.wall_count; ++w) {
        WallBoundary src = wall_boundary(ws1, w);
        BoundaryPoint p = apply(g, src.e1), q = apply(g, src.e2);
        int target = -1;
        for (int u = 0; u < ws2.wall_count; ++u) {
            const Geodesic& h = ws2.wall_geodesics[u];
            bool direct = boundary_close(p, h.a, tol.endpoint_dedupe) &&
                          boundary_close(q, h.b, tol.endpoint_dedupe);
            bool swapped = boundary_close(p, h.b, tol.endpoint_dedupe) &&
                           boundary_close(q, h.a, tol.endpoint_dedupe);
            if (direct || swapped) {
                target = u;
                break;
            }
        }
        require(target >= 0, errc::order_violation, "isometry does not match the line patterns");
        m.wall_bijection[w] = target;
        WallBoundary dst = wall_boundary(ws2, target);
        // orientation-preserving maps send the canonical arc (e1 -> e2) to the
        // arc from image(e1) to image(e2)
        bool e1_to_first = boundary_close(p, dst.e1, tol.endpoint_dedupe);
        m.arc_flip[w] = static_cast<std::uint8_t>(e1_to_first ? 0 : 1);
    }
    return m;
}

} // namespace waffle
