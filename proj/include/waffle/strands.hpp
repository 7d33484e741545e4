#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "waffle/config.hpp"
#include "waffle/cubulation.hpp"
#include "waffle/errors.hpp"
#include "waffle/lowpower.hpp"
#include "waffle/quotient.hpp"

// Strands of periodic hyperplane carriers, strand classification, churros and
// clutching ratios.

namespace waffle {

// How the traversal exits a carrier square relative to the entry edge.
enum class Turn : std::int8_t { straight = 0, left = 1, right = -1 };

// One period of a hyperplane carrier: a cyclic strip of unit squares glued
// edge to edge. The period map glues the exit of the last square back to the
// entry of the first.
struct PeriodicCarrier {
    std::vector<Turn> turns;

    int period() const { return static_cast<int>(turns.size()); }
};

namespace detail {

using cplx = std::complex<double>;

struct UnfoldedStrip {
    std::vector<cplx> entry_mid; // entry edge midpoint of square i, size p+1
    std::vector<cplx> entry_dir; // unit direction of travel entering square i, size p+1

    // closure motion g(z) = rot*z + shift mapping frame 0 to frame p
    cplx rot, shift;

    cplx apply(cplx z) const { return rot * z + shift; }
    cplx apply_inverse(cplx z) const { return (z - shift) / rot; }
};

inline UnfoldedStrip unfold(const PeriodicCarrier& carrier) {
    require(carrier.period() >= 1, errc::non_positive_length, "carrier needs at least one square");
    UnfoldedStrip s;
    cplx m(0.0, 0.0), u(1.0, 0.0);
    const cplx i_c(0.0, 1.0);
    s.entry_mid.push_back(m);
    s.entry_dir.push_back(u);
    for (Turn t : carrier.turns) {
        switch (t) {
        case Turn::straight:
            m = m + u;
            break;
        case Turn::left:
            m = m + u * 0.5 + i_c * u * 0.5;
            u = i_c * u;
            break;
        case Turn::right:
            m = m + u * 0.5 - i_c * u * 0.5;
            u = -i_c * u;
            break;
        }
        s.entry_mid.push_back(m);
        s.entry_dir.push_back(u);
    }
    s.rot = s.entry_dir.back();
    s.shift = s.entry_mid.back();
    return s;
}

} // namespace detail

struct StrandModel {
    PeriodicCarrier carrier;
    double tau = 0.0;    // translation length in the piecewise Euclidean (l2) metric
    double tau_l1 = 0.0; // combinatorial diagnostic, never used in ratios
    std::vector<double> offsets; // converged point on each crossing edge, in [-1/2, 1/2]
    std::vector<std::array<double, 2>> polyline; // unfolded coordinates, one period
    int iterations = 0;
};

// Iterative geodesic shortening on one period of the carrier. Points start at
// cube centers and are projected edge by edge until the total length is
// stable.
inline StrandModel strand(const PeriodicCarrier& carrier,
                          const Tolerances& tol = default_tolerances()) {
    using detail::cplx;
    const int p = carrier.period();
    detail::UnfoldedStrip strip = detail::unfold(carrier);
    const cplx i_c(0.0, 1.0);

    // point i lives on the edge between square i and square i+1:
    // P_i(t) = entry_mid[i+1] + t * i_c * entry_dir[i+1]
    auto point = [&](int i, double t) { return strip.entry_mid[i + 1] + t * i_c * strip.entry_dir[i + 1]; };

    std::vector<double> t(p, 0.0);
    auto total_length = [&]() {
        double len = std::abs(point(0, t[0]) - strip.apply_inverse(point(p - 1, t[p - 1])));
        for (int i = 1; i < p; ++i) len += std::abs(point(i, t[i]) - point(i - 1, t[i - 1]));
        return len;
    };

    double len = total_length();
    StrandModel out;
    out.carrier = carrier;
    std::size_t iter = 0;
    bool converged = false;
    for (; iter < tol.shortening_max_iter && !converged; ++iter) {
        for (int i = 0; i < p; ++i) {
            cplx a = (i == 0) ? strip.apply_inverse(point(p - 1, t[p - 1])) : point(i - 1, t[i - 1]);
            cplx b = (i == p - 1) ? strip.apply(point(0, t[0])) : point(i + 1, t[i + 1]);
            // minimize |P(t)-a| + |P(t)-b| over the edge segment: intersect the
            // straight segment a->b with the edge line, then clamp
            cplx e0 = point(i, 0.0), dir = i_c * strip.entry_dir[i + 1];
            // Cramer solve of a + s(b-a) = e0 + tt*dir for the edge parameter tt
            double det = -(b - a).real() * dir.imag() + (b - a).imag() * dir.real();
            if (std::abs(det) >= 1e-15) {
                cplx rhs = e0 - a;
                double tt = ((b - a).real() * rhs.imag() - (b - a).imag() * rhs.real()) / det;
                t[i] = std::clamp(tt, -0.5, 0.5);
            } // else a->b runs parallel to the edge, keep the current point
        }
        double next = total_length();
        converged = (len - next < tol.shortening_tol);
        len = next;
    }
    require(converged, errc::no_convergence, "strand shortening did not converge");

    out.tau = len;
    out.offsets = t;
    out.iterations = static_cast<int>(iter);
    cplx prev = strip.apply_inverse(point(p - 1, t[p - 1]));
    out.polyline.push_back({prev.real(), prev.imag()});
    double l1 = 0.0;
    for (int i = 0; i < p; ++i) {
        cplx cur = point(i, t[i]);
        out.polyline.push_back({cur.real(), cur.imag()});
        l1 += std::abs(cur.real() - prev.real()) + std::abs(cur.imag() - prev.imag());
        prev = cur;
    }
    out.tau_l1 = l1;
    return out;
}

// ---------------------------------------------------------------------------
// Strand classification

enum class StrandTag { Z, dihedral, reflective_Z, reflective_dihedral };

struct StrandType {
    StrandTag tag = StrandTag::Z;

    bool reflective() const {
        return tag == StrandTag::reflective_Z || tag == StrandTag::reflective_dihedral;
    }
};

inline const char* strand_tag_name(StrandTag t) {
    switch (t) {
    case StrandTag::Z: return "Z";
    case StrandTag::dihedral: return "dihedral";
    case StrandTag::reflective_Z: return "reflective-Z";
    case StrandTag::reflective_dihedral: return "reflective-dihedral";
    }
    return "?";
}

// The induced action of a stabilizing automorphism on a strand.
struct StrandSymmetry {
    long long shift = 0;          // translation along the carrier sequence
    bool reverses_ends = false;   // swaps the two ends of the strand
    bool half_space_swap = false; // fixes the strand pointwise, exchanges the wall's sides
    bool nontrivial = false;      // acts nontrivially on the ambient model
};

inline StrandType classify_strand(const std::vector<StrandSymmetry>& generators) {
    bool reflective = false, dihedral = false;
    for (const auto& g : generators) {
        if (g.reverses_ends) dihedral = true;
        if (g.shift == 0 && !g.reverses_ends && g.half_space_swap && g.nontrivial)
            reflective = true;
    }
    StrandType t;
    if (reflective) t.tag = dihedral ? StrandTag::reflective_dihedral : StrandTag::reflective_Z;
    else t.tag = dihedral ? StrandTag::dihedral : StrandTag::Z;
    return t;
}

inline Rational strand_density(const StrandType& t) {
    return t.reflective() ? Rational(1, 2) : Rational(1);
}

// Strand of a wall under a model automorphism acting as the period map. On a
// finite window no automorphism can translate a hyperplane carrier (the
// truncation pins its ends), so this either rejects the map as elliptic or
// rejects it for not stabilizing the wall; periodic carriers are the
// representation that supports genuine translation.
inline StrandModel strand(const CubeComplexModel& model, const WallSystem& ws, int wall,
                          const std::vector<int>& period_map,
                          const Tolerances& tol = default_tolerances());

// The symmetry a model automorphism induces on the strand of a wall. The
// automorphism must stabilize the wall's hyperplane; its end behaviour is read
// off the order of the crossing walls along the wall's geodesic.
inline StrandSymmetry strand_symmetry_of(const CubeComplexModel& model, const WallSystem& ws,
                                         int wall, const std::vector<int>& vertex_perm) {
    require(wall >= 0 && wall < model.wall_count, errc::unknown_wall, "no such wall");

    // induced wall map from the vertex permutation
    std::vector<int> wall_map(model.wall_count, -1);
    for (const auto& e : model.edges) {
        int iv = vertex_perm.at(e[0]), iu = vertex_perm.at(e[1]);
        int iw = -1;
        for (auto [w2, u2] : model.adjacency[iv])
            if (u2 == iu) iw = w2;
        require(iw >= 0, errc::not_stabilizing, "permutation is not a model automorphism");
        require(wall_map[e[2]] < 0 || wall_map[e[2]] == iw, errc::not_stabilizing,
                "permutation induces no consistent wall map");
        wall_map[e[2]] = iw;
    }
    require(wall_map[wall] == wall, errc::not_stabilizing,
            "automorphism does not preserve the hyperplane");

    StrandSymmetry sym;
    for (std::size_t v = 0; v < vertex_perm.size() && !sym.nontrivial; ++v)
        sym.nontrivial = vertex_perm[v] != static_cast<int>(v);

    // pointwise on the strand: every dual edge of the wall maps to itself
    bool pointwise = true, endpoint_swap = false;
    for (const auto& e : model.edges) {
        if (e[2] != wall) continue;
        int iv = vertex_perm[e[0]], iu = vertex_perm[e[1]];
        if ((iv == e[0] && iu == e[1])) continue;
        if (iv == e[1] && iu == e[0]) {
            endpoint_swap = true;
            continue;
        }
        pointwise = false;
    }
    sym.half_space_swap = pointwise && endpoint_swap;

    // order of the crossing walls along the wall's geodesic
    require(wall < static_cast<int>(ws.wall_geodesics.size()), errc::not_stabilizing,
            "end classification needs wall geometry");
    klein::Chord chord = klein::chord_of(ws.wall_geodesics[wall]);
    std::vector<std::pair<double, int>> stations;
    for (int u = 0; u < ws.wall_count; ++u) {
        if (!ws.crossing_in_window[wall][u]) continue;
        auto it = ws.crossing_positions.find({std::min(wall, u), std::max(wall, u)});
        if (it == ws.crossing_positions.end()) continue;
        stations.push_back({chord.param({it->second[0], it->second[1]}), u});
    }
    std::sort(stations.begin(), stations.end());
    if (stations.size() >= 2) {
        std::vector<int> seq_index(ws.wall_count, -1);
        for (std::size_t k = 0; k < stations.size(); ++k) seq_index[stations[k].second] = static_cast<int>(k);
        bool increasing = true, decreasing = true;
        int prev = -1;
        bool first = true;
        for (const auto& [t, u] : stations) {
            (void)t;
            int img = seq_index[wall_map[u]];
            require(img >= 0, errc::not_stabilizing,
                    "automorphism moves a crossing wall off the strand");
            if (!first) {
                increasing = increasing && img > prev;
                decreasing = decreasing && img < prev;
            }
            prev = img;
            first = false;
        }
        require(increasing || decreasing, errc::not_stabilizing,
                "automorphism scrambles the crossing order along the strand");
        sym.reverses_ends = decreasing;
    }
    return sym;
}

inline StrandModel strand(const CubeComplexModel& model, const WallSystem& ws, int wall,
                          const std::vector<int>& period_map, const Tolerances& tol) {
    StrandSymmetry sym = strand_symmetry_of(model, ws, wall, period_map);
    require(sym.shift != 0, errc::not_translating,
            "period map fixes a carrier vertex; it does not translate the strand");
    // unreachable on finite windows; periodic carriers take over from here
    PeriodicCarrier carrier;
    carrier.turns.assign(static_cast<std::size_t>(std::llabs(sym.shift)), Turn::straight);
    return strand(carrier, tol);
}

// ---------------------------------------------------------------------------
// Churros and clutching data

struct ChurroFlap {
    std::string id;
    double tau = 0.0; // strand translation length carried by this flap
};

struct Churro {
    std::string core_label;
    std::vector<ChurroFlap> flaps;

    double tau_core() const {
        require(!flaps.empty(), errc::non_positive_length, "churro needs at least one flap");
        double sum = 0.0;
        for (const auto& f : flaps) {
            require(f.tau > 0.0, errc::non_positive_length, "strand translation lengths are positive");
            sum += f.tau;
        }
        return sum / static_cast<double>(flaps.size());
    }
};

struct ClutchingData {
    std::vector<double> taus;
    double tau_core = 0.0;
    std::vector<double> widths;          // |ln(tau_core / tau_i)| per flap
    std::vector<bool> euclidean_flags;   // tau_core == tau_i within tolerance

    double ratio(std::size_t i, std::size_t j) const { return taus.at(i) / taus.at(j); }
    std::size_t arity() const { return taus.size(); }
};

inline ClutchingData clutching(const Churro& ch, const Tolerances& tol = default_tolerances()) {
    ClutchingData out;
    out.tau_core = ch.tau_core();
    for (const auto& f : ch.flaps) {
        out.taus.push_back(f.tau);
        out.widths.push_back(std::abs(std::log(out.tau_core / f.tau)));
        out.euclidean_flags.push_back(std::abs(out.tau_core - f.tau) <=
                                      tol.tau_equal_rel * std::max(out.tau_core, f.tau));
    }
    return out;
}

struct ClutchingMatch {
    bool ok = true;
    std::size_t witness_i = 0, witness_j = 0; // first mismatching ratio when !ok
};

// Do corresponding clutching ratios agree? `correspondence[i]` is the flap of
// ch2 matched with flap i of ch1.
inline ClutchingMatch clutching_match(const ClutchingData& ch1, const ClutchingData& ch2,
                                      const std::vector<std::size_t>& correspondence,
                                      const Tolerances& tol = default_tolerances()) {
    require(correspondence.size() == ch1.arity() && ch1.arity() == ch2.arity(),
            errc::arity_mismatch, "flap correspondence must be total");
    ClutchingMatch out;
    for (std::size_t i = 0; i < ch1.arity(); ++i) {
        for (std::size_t j = 0; j < ch1.arity(); ++j) {
            if (i == j) continue;
            double r1 = ch1.ratio(i, j);
            double r2 = ch2.ratio(correspondence[i], correspondence[j]);
            if (std::abs(r1 - r2) > tol.ratio_match_rel * std::abs(r1)) {
                out.ok = false;
                out.witness_i = i;
                out.witness_j = j;
                return out;
            }
        }
    }
    return out;
}

} // namespace waffle
