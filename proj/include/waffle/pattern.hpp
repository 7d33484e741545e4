#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>
#include <string>
#include <utility>
#include <vector>

#include "waffle/config.hpp"
#include "waffle/errors.hpp"
#include "waffle/hyperbolic.hpp"
#include "waffle/surface.hpp"

// Finite windows of line patterns: axes of conjugated curve words meeting a
// ball about the base point, deduplicated by endpoint pair.

namespace waffle {

struct Window {
    double radius = 2.5;     // hyperbolic radius about the base point i
    int word_length_cap = 4; // conjugator words up to this length

    Window() = default;
    Window(double r, int cap) : radius(r), word_length_cap(cap) {
        require(r > 0.0 && cap >= 0, errc::schema_error, "window needs radius > 0 and cap >= 0");
    }
};

struct PatternLine {
    Geodesic geo;
    std::string orbit_label;
    std::vector<int> conjugator; // the word w with line = w * axis(curve) in the group
};

struct LinePattern {
    std::vector<PatternLine> lines;

    std::size_t size() const { return lines.size(); }
};

namespace detail {

// Deduplication index over canonical (sorted) endpoint angle pairs.
class EndpointIndex {
public:
    explicit EndpointIndex(double tol) : tol_(tol) {}

    // returns true when the pair is new and records it
    bool insert(const Geodesic& g) {
        double u = boundary_angle(g.a), v = boundary_angle(g.b);
        if (u > v) std::swap(u, v);
        auto lo = items_.lower_bound(u - tol_);
        auto hi = items_.upper_bound(u + tol_);
        for (auto it = lo; it != hi; ++it)
            if (std::abs(it->second - v) <= tol_) return false;
        // also match across the angle wrap for first coordinates near -pi/pi
        if (u < -pi + tol_ || v > pi - tol_) {
            for (auto& [a, b] : items_) {
                double du = std::min(std::abs(a - u), 2.0 * pi - std::abs(a - u));
                double dv = std::min(std::abs(b - v), 2.0 * pi - std::abs(b - v));
                if (du <= tol_ && dv <= tol_) return false;
            }
        }
        items_.insert({u, v});
        return true;
    }

private:
    double tol_;
    std::multimap<double, double> items_;
};

} // namespace detail

namespace detail {

// Extended-precision 2x2 used only while accumulating conjugator words; the
// boundary action of a long word is ill-conditioned in plain doubles.
struct Mobius80 {
    long double a = 1, b = 0, c = 0, d = 1;

    static Mobius80 from(const MobiusMap& m) { return {m.a, m.b, m.c, m.d}; }

    Mobius80 times(const Mobius80& n) const {
        Mobius80 r = times_raw(n);
        long double s = std::sqrt(r.a * r.d - r.b * r.c);
        r.a /= s;
        r.b /= s;
        r.c /= s;
        r.d /= s;
        return r;
    }

    Mobius80 times_raw(const Mobius80& n) const {
        return {a * n.a + b * n.c, a * n.b + b * n.d, c * n.a + d * n.c, c * n.b + d * n.d};
    }

    long double det() const { return a * d - b * c; }
    long double entry_scale() const {
        return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    }

    // axes of matrices whose entries dwarf the determinant live far outside
    // any desk-scale window, and their det is numerically untrustworthy
    bool axis_is_remote() const {
        long double dd = det();
        return !(dd > 0.0L) || entry_scale() > 1e8L * std::sqrt(dd);
    }

    // boundary fixed points, computed with the numerically stable quadratic;
    // requires a hyperbolic matrix (any positive scaling)
    Geodesic axis() const {
        auto pt = [](long double x) {
            double v = static_cast<double>(x);
            if (!std::isfinite(v)) return BoundaryPoint::infinity();
            return boundary(v);
        };
        long double scale = entry_scale();
        if (std::abs(c) < 1e-30L * scale) {
            return Geodesic(pt(b / (d - a)), BoundaryPoint::infinity());
        }
        long double B = d - a;
        long double disc = (a + d) * (a + d) - 4.0L * det();
        long double root = std::sqrt(disc);
        long double q = -(B + (B >= 0 ? root : -root)) / 2.0L;
        long double x1, x2;
        if (std::abs(q) > 1e-30L * scale) {
            x1 = q / c;
            x2 = -b / q;
        } else {
            x1 = (-B + root) / (2.0L * c);
            x2 = (-B - root) / (2.0L * c);
        }
        return Geodesic(pt(x1), pt(x2));
    }
};

} // namespace detail

// All axes of conjugates w * curve * w^-1 (|w| <= cap) meeting the window
// ball, per curve, deduplicated on endpoint pairs.
inline LinePattern generate_pattern(const SurfaceGroupPresentation& surface,
                                    const std::vector<CurveSpec>& curves, const Window& window,
                                    const Tolerances& tol = default_tolerances()) {
    const HPoint base{0.0, 1.0};
    LinePattern out;
    detail::EndpointIndex seen(tol.endpoint_dedupe);

    std::vector<detail::Mobius80> gens80, inv80;
    for (const auto& g : surface.generators) {
        gens80.push_back(detail::Mobius80::from(g));
        inv80.push_back(detail::Mobius80::from(g.inverse()));
    }
    auto letter = [&](int s) { return s > 0 ? gens80[s - 1] : inv80[-s - 1]; };

    std::vector<detail::Mobius80> curve80;
    for (const auto& c : curves) {
        check_cyclically_reduced(c);
        MobiusMap m = evaluate_word(surface, c.word);
        require(is_hyperbolic(m, tol), errc::non_hyperbolic_curve,
                "curve word is not hyperbolic: " + c.label);
        detail::Mobius80 acc{};
        for (int s : c.word) acc = acc.times(letter(s));
        curve80.push_back(acc);
    }

    // Only conjugators displacing the base point by at most this much can
    // move a curve axis into the window; the slack absorbs fellow-travelling
    // of word prefixes so the breadth-first ball search stays complete.
    double reach = 0.0;
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        Geodesic ax0 = curve80[ci].axis();
        MobiusMap m = evaluate_word(surface, curves[ci].word);
        reach = std::max(reach, distance(base, ax0) +
                                    axis_and_translation_length(m, tol).translation_length / 2.0);
    }
    const double displacement_cap = window.radius + reach + 6.0;

    // breadth-first enumeration of the group ball, deduplicating elements by
    // quantized matrix entries; enumerating elements instead of words keeps
    // conjugator matrices short and their axes numerically sharp
    struct Node {
        detail::Mobius80 w; // normalized, so the inverse is the adjugate
        int parent = -1;
        int letter = 0;
        int depth = 0;
    };
    auto element_key = [](const detail::Mobius80& m) {
        long double sign = 1.0L;
        if (m.a < -1e-7L || (std::abs(m.a) <= 1e-7L &&
                             (m.b < -1e-7L || (std::abs(m.b) <= 1e-7L && m.c < 0)))) {
            sign = -1.0L;
        }
        auto q = [&](long double x) { return llround(static_cast<double>(sign * x) * 3.3e8); };
        return std::array<long long, 4>{q(m.a), q(m.b), q(m.c), q(m.d)};
    };
    struct ElementKeyHash {
        std::size_t operator()(const std::array<long long, 4>& k) const {
            std::size_t h = 1469598103934665603ull;
            for (auto v : k) {
                h ^= static_cast<std::size_t>(v);
                h *= 1099511628211ull;
            }
            return h;
        }
    };
    std::unordered_map<std::array<long long, 4>, int, ElementKeyHash> element_index;
    std::vector<Node> nodes;
    nodes.push_back({detail::Mobius80{}, -1, 0, 0});
    element_index[element_key(nodes[0].w)] = 0;

    auto emit = [&](int node_index) {
        const Node& node = nodes[node_index];
        detail::Mobius80 w_inv{node.w.d, -node.w.b, -node.w.c, node.w.a};
        for (std::size_t ci = 0; ci < curves.size(); ++ci) {
            detail::Mobius80 conj = node.w.times_raw(curve80[ci]).times_raw(w_inv);
            if (conj.axis_is_remote()) continue;
            Geodesic axis = conj.axis();
            if (distance(base, axis) > window.radius) continue;
            if (seen.insert(axis)) {
                std::vector<int> word;
                for (int at = node_index; at > 0; at = nodes[at].parent)
                    word.push_back(nodes[at].letter);
                std::reverse(word.begin(), word.end());
                out.lines.push_back({axis, curves[ci].label, word});
            }
        }
    };

    const int letters = 2 * surface.genus;
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        emit(static_cast<int>(head));
        if (nodes[head].depth == window.word_length_cap) continue;
        int last = nodes[head].letter;
        for (int s = -letters; s <= letters; ++s) {
            if (s == 0 || (last != 0 && s == -last)) continue;
            Node child;
            child.w = nodes[head].w.times(letter(s));
            child.parent = static_cast<int>(head);
            child.letter = s;
            child.depth = nodes[head].depth + 1;
            HPoint moved = apply(MobiusMap{static_cast<double>(child.w.a),
                                           static_cast<double>(child.w.b),
                                           static_cast<double>(child.w.c),
                                           static_cast<double>(child.w.d)},
                                 base);
            if (distance(base, moved) > displacement_cap) continue;
            auto key = element_key(child.w);
            if (element_index.emplace(key, static_cast<int>(nodes.size())).second)
                nodes.push_back(child);
        }
    }
    return out;
}

// Synthetic pattern builders used by tests and the figure tool: a family of
// disjoint geodesics perpendicular to an axis through the base point.
inline std::vector<Geodesic> perpendicular_family(double direction_angle,
                                                  const std::vector<double>& stations) {
    // axis through i in the given direction; perpendicular geodesics at the
    // stated signed distances along it
    std::vector<Geodesic> out;
    for (double s : stations) {
        // build in a normalized chart: axis = imaginary axis, station at (0, e^s);
        // the perpendicular geodesic there is the half circle of radius e^s
        Geodesic perp = geodesic(-std::exp(s), std::exp(s));
        // rotate about i by the direction angle: disc rotation conjugated back
        double t = direction_angle / 2.0;
        MobiusMap rot{std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
        out.push_back(apply(rot, perp));
    }
    return out;
}

} // namespace waffle
