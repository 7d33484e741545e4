#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "waffle/config.hpp"
#include "waffle/errors.hpp"
#include "waffle/hyperbolic.hpp"

// Fuchsian realizations of closed surface groups: side pairings of the
// regular 4g-gon with vertex angle 2pi/4g, curve words, and their matrices.

namespace waffle {

struct SurfaceGroupPresentation {
    int genus = 2;
    std::vector<MobiusMap> generators; // a1, b1, ..., ag, bg
    double relator_defect = 0.0;       // distance of [a1,b1]...[ag,bg] from +-identity

    const MobiusMap& generator(int signed_index) const {
        // 1-based signed indices: +k is generator k-1, -k its inverse
        int k = signed_index > 0 ? signed_index : -signed_index;
        require(k >= 1 && k <= static_cast<int>(generators.size()), errc::index_out_of_range,
                "generator index out of range");
        static thread_local MobiusMap inv;
        if (signed_index > 0) return generators[k - 1];
        inv = generators[k - 1].inverse();
        return inv;
    }
};

struct CurveSpec {
    std::vector<int> word; // signed 1-based generator indices
    std::string label;
};

inline void check_cyclically_reduced(const CurveSpec& c) {
    require(!c.word.empty(), errc::schema_error, "curve words must be nonempty");
    auto cancels = [](int a, int b) { return a == -b; };
    for (std::size_t i = 0; i + 1 < c.word.size(); ++i)
        require(!cancels(c.word[i], c.word[i + 1]), errc::schema_error,
                "curve word is not reduced: " + c.label);
    if (c.word.size() > 1)
        require(!cancels(c.word.back(), c.word.front()), errc::schema_error,
                "curve word is not cyclically reduced: " + c.label);
}

inline MobiusMap evaluate_word(const SurfaceGroupPresentation& surface,
                               const std::vector<int>& word) {
    MobiusMap m = MobiusMap::identity();
    for (int s : word) m = m * surface.generator(s);
    return m.normalized();
}

namespace detail {

inline double defect_from_identity(const MobiusMap& m_in) {
    MobiusMap m = m_in.normalized();
    auto dist = [&](double s) {
        return std::max({std::abs(m.a - s), std::abs(m.b), std::abs(m.c), std::abs(m.d - s)});
    };
    return std::min(dist(1.0), dist(-1.0));
}

} // namespace detail

// Side pairings of the regular 4g-gon centred at i whose vertex angles sum to
// 2pi; sides read a1 b1 a1' b1' a2 ... around the boundary, so the pairings
// satisfy the surface relator [a1,b1]...[ag,bg].
inline SurfaceGroupPresentation standard_generators(int genus) {
    require(genus >= 2, errc::unsupported_genus, "genus must be at least 2");
    require(genus <= 6, errc::unsupported_genus, "desk-scale cap: genus at most 6");
    const int n = 4 * genus;
    // circumradius of the regular n-gon with vertex angle 2pi/n
    const double cot = 1.0 / std::tan(pi / n);
    const double circumradius = std::acosh(cot * cot);
    const double rho = std::tanh(circumradius / 2.0); // Poincare-disc radius

    std::vector<HPoint> vertex(n);
    for (int j = 0; j < n; ++j) {
        double theta = 2.0 * pi * j / n;
        vertex[j] = from_disc(DiscPoint{rho * std::cos(theta), rho * std::sin(theta)});
    }

    SurfaceGroupPresentation out;
    out.genus = genus;
    out.generators.resize(2 * genus);
    for (int t = 0; t < genus; ++t) {
        int sa = 4 * t, sb = 4 * t + 1, sa_inv = 4 * t + 2, sb_inv = 4 * t + 3;
        auto side_start = [&](int s) { return vertex[s % n]; };
        auto side_end = [&](int s) { return vertex[(s + 1) % n]; };
        // each pairing carries the primed side onto the plain side with the
        // boundary orientation reversed; inverting the b-pairings turns the
        // vertex-cycle relation into the standard commutator relator
        out.generators[2 * t] =
            mobius_taking(side_start(sa_inv), side_end(sa_inv), side_end(sa), side_start(sa));
        out.generators[2 * t + 1] =
            mobius_taking(side_start(sb_inv), side_end(sb_inv), side_end(sb), side_start(sb))
                .inverse();
    }

    MobiusMap rel = MobiusMap::identity();
    for (int t = 0; t < genus; ++t) {
        const MobiusMap& a = out.generators[2 * t];
        const MobiusMap& b = out.generators[2 * t + 1];
        rel = rel * a * b * a.inverse() * b.inverse();
    }
    out.relator_defect = detail::defect_from_identity(rel);
    require(out.relator_defect <= 1e-8, errc::invalid_point,
            "surface relator defect too large; construction broken");
    return out;
}

} // namespace waffle
