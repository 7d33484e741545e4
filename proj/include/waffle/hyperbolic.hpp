#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "waffle/config.hpp"
#include "waffle/errors.hpp"

// Upper half-plane kernel: points, boundary points, geodesics, Mobius maps,
// horostrips and the visual-metric machinery. All types are immutable values
// and every operation is pure.

namespace waffle {

constexpr double pi = 3.14159265358979323846;

struct HPoint {
    double x = 0.0;
    double y = 1.0; // invariant: y > 0
};

inline void check_point(const HPoint& p) {
    require(p.y > 0.0 && std::isfinite(p.x) && std::isfinite(p.y), errc::invalid_point,
            "upper half-plane point needs y > 0");
}

// Point of the circle at infinity. Infinity carries a dedicated tag.
struct BoundaryPoint {
    double value = 0.0;
    bool at_infinity = false;

    static BoundaryPoint infinity() { return BoundaryPoint{0.0, true}; }
};

inline BoundaryPoint boundary(double x) { return BoundaryPoint{x, false}; }

// Circular coordinate used for all cyclic-order reasoning. Strictly monotone
// along the boundary circle, with infinity pinned at pi (== -pi).
inline double boundary_angle(const BoundaryPoint& p) {
    if (p.at_infinity) return pi;
    return 2.0 * std::atan(p.value);
}

inline bool boundary_close(const BoundaryPoint& a, const BoundaryPoint& b, double tol) {
    if (a.at_infinity || b.at_infinity) {
        if (a.at_infinity && b.at_infinity) return true;
        double t = boundary_angle(a.at_infinity ? b : a);
        return std::min(std::abs(t - pi), std::abs(t + pi)) < tol;
    }
    double d = std::abs(boundary_angle(a) - boundary_angle(b));
    return std::min(d, 2.0 * pi - d) < tol;
}

inline bool operator==(const BoundaryPoint& a, const BoundaryPoint& b) {
    if (a.at_infinity || b.at_infinity) return a.at_infinity && b.at_infinity;
    return a.value == b.value;
}

struct Geodesic {
    BoundaryPoint a, b; // unordered, distinct

    Geodesic() = default;
    Geodesic(BoundaryPoint a_, BoundaryPoint b_) : a(a_), b(b_) {
        require(!(a == b), errc::degenerate_pair, "geodesic endpoints must be distinct");
    }

    bool vertical() const { return a.at_infinity || b.at_infinity; }
    // For a vertical geodesic: the finite foot. Otherwise unspecified.
    double foot() const { return a.at_infinity ? b.value : a.value; }
};

inline Geodesic geodesic(double a, double b) { return Geodesic(boundary(a), boundary(b)); }
inline Geodesic geodesic_to_infinity(double a) {
    return Geodesic(boundary(a), BoundaryPoint::infinity());
}

// -------------------------------------------------------------------------
// Mobius maps (real 2x2, det normalized to 1, identified with the negation)

struct MobiusMap {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    MobiusMap normalized() const {
        double s = det();
        require(s > 0.0, errc::invalid_point, "Mobius map must preserve the upper half-plane");
        double r = std::sqrt(s);
        return MobiusMap{a / r, b / r, c / r, d / r};
    }

    MobiusMap inverse() const { return MobiusMap{d, -b, -c, a}; }

    static MobiusMap identity() { return MobiusMap{}; }
};

inline MobiusMap operator*(const MobiusMap& m, const MobiusMap& n) {
    return MobiusMap{m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                     m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

// Equality in PSL(2,R): matrices identified with their negation.
inline bool mobius_close(const MobiusMap& m, const MobiusMap& n, double tol) {
    auto dist = [&](double s) {
        return std::max({std::abs(m.a - s * n.a), std::abs(m.b - s * n.b),
                         std::abs(m.c - s * n.c), std::abs(m.d - s * n.d)});
    };
    return std::min(dist(1.0), dist(-1.0)) < tol;
}

inline HPoint apply(const MobiusMap& m, const HPoint& p) {
    std::complex<double> z(p.x, p.y);
    std::complex<double> w = (m.a * z + m.b) / (m.c * z + m.d);
    return HPoint{w.real(), w.imag()};
}

inline BoundaryPoint apply(const MobiusMap& m, const BoundaryPoint& p) {
    if (p.at_infinity) {
        if (m.c == 0.0) return BoundaryPoint::infinity();
        return boundary(m.a / m.c);
    }
    double denom = m.c * p.value + m.d;
    double scale = std::max({1.0, std::abs(m.c * p.value), std::abs(m.d)});
    if (std::abs(denom) <= 1e-14 * scale) return BoundaryPoint::infinity();
    return boundary((m.a * p.value + m.b) / denom);
}

inline Geodesic apply(const MobiusMap& m, const Geodesic& g) {
    return Geodesic(apply(m, g.a), apply(m, g.b));
}

// -------------------------------------------------------------------------
// Distances

inline double distance(const HPoint& p, const HPoint& q) {
    double dx = p.x - q.x, dy = p.y - q.y;
    return std::acosh(1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y));
}

// Unique orientation-preserving map sending the geodesic to (0, infinity),
// with `toward` on the positive imaginary axis above the image of `from`...
// here we only need endpoint normalization: e_neg -> 0, e_pos -> infinity.
inline MobiusMap mobius_to_vertical(const BoundaryPoint& e0, const BoundaryPoint& e1) {
    if (e1.at_infinity) return MobiusMap{1.0, -e0.value, 0.0, 1.0}.normalized();
    if (e0.at_infinity) return MobiusMap{0.0, -1.0, 1.0, -e1.value}.normalized();
    double a = e0.value, b = e1.value;
    if (b > a) return MobiusMap{1.0, -a, -1.0, b}.normalized();
    return MobiusMap{1.0, -a, 1.0, -b}.normalized();
}

inline double distance(const HPoint& p, const Geodesic& g) {
    MobiusMap m = mobius_to_vertical(g.a, g.b);
    HPoint w = apply(m, p);
    return std::asinh(std::abs(w.x) / w.y);
}

// Orientation-preserving isometry with m(p1) = p2 sliding the geodesic
// through (p1, q1) onto the geodesic through (p2, q2); requires
// d(p1,q1) == d(p2,q2), in which case q1 -> q2 as well.
inline MobiusMap mobius_taking(const HPoint& p1, const HPoint& q1, const HPoint& p2,
                               const HPoint& q2);

// -------------------------------------------------------------------------
// Crossing and cyclic order

namespace detail {

// true iff t lies strictly inside the counterclockwise open arc (lo, hi)
inline bool in_ccw_arc(double lo, double hi, double t) {
    auto wrap = [](double x) {
        while (x <= -pi) x += 2.0 * pi;
        while (x > pi) x -= 2.0 * pi;
        return x;
    };
    double span = wrap(hi - lo);
    if (span <= 0.0) span += 2.0 * pi;
    double off = wrap(t - lo);
    if (off <= 0.0) off += 2.0 * pi;
    return off > 0.0 && off < span;
}

} // namespace detail

inline bool crossing(const Geodesic& g1, const Geodesic& g2,
                     const Tolerances& tol = default_tolerances()) {
    const BoundaryPoint* es[4] = {&g1.a, &g1.b, &g2.a, &g2.b};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            require(!boundary_close(*es[i], *es[j], tol.shared_endpoint_tol) ||
                        (i == 0 && j == 1) || (i == 2 && j == 3),
                    errc::shared_endpoint, "geodesics share a boundary endpoint");
    double a = boundary_angle(g1.a), b = boundary_angle(g1.b);
    bool in1 = detail::in_ccw_arc(a, b, boundary_angle(g2.a));
    bool in2 = detail::in_ccw_arc(a, b, boundary_angle(g2.b));
    return in1 != in2;
}

// Intersection point of two crossing geodesics.
inline HPoint crossing_point(const Geodesic& g1, const Geodesic& g2) {
    // move g1 to the imaginary axis; g2 becomes a geodesic crossing it
    MobiusMap m = mobius_to_vertical(g1.a, g1.b);
    BoundaryPoint p = apply(m, g2.a), q = apply(m, g2.b);
    HPoint w;
    if (p.at_infinity || q.at_infinity) {
        // g2 image is vertical through its finite foot; it meets x=0 nowhere
        // unless the foot is 0, which means shared endpoints upstream.
        fail(errc::shared_endpoint, "degenerate crossing configuration");
    } else {
        double u = p.value, v = q.value;
        require(u * v < 0.0, errc::degenerate_pair, "geodesics do not cross");
        // half circle over [u,v] meets x=0 at height sqrt(-uv)
        w = HPoint{0.0, std::sqrt(-u * v)};
    }
    return apply(m.inverse(), w);
}

// Angle of intersection (in (0, pi/2]) between two crossing geodesics.
inline double crossing_angle(const Geodesic& g1, const Geodesic& g2) {
    MobiusMap m = mobius_to_vertical(g1.a, g1.b);
    BoundaryPoint p = apply(m, g2.a), q = apply(m, g2.b);
    require(!p.at_infinity && !q.at_infinity, errc::degenerate_pair, "no transverse crossing");
    double u = p.value, v = q.value;
    require(u * v < 0.0, errc::degenerate_pair, "geodesics do not cross");
    // g1 image is the vertical axis, g2 image the half circle over [u,v];
    // at (0, h), h = sqrt(-uv), the circle tangent is (h, c) with c = (u+v)/2
    double c = 0.5 * (u + v), h = std::sqrt(-u * v);
    return std::atan2(h, std::abs(c));
}

// -------------------------------------------------------------------------
// Hyperbolic classification, axes

struct AxisData {
    Geodesic axis;
    double translation_length = 0.0;
};

inline bool is_hyperbolic(const MobiusMap& m_in, const Tolerances& tol = default_tolerances()) {
    MobiusMap m = m_in.normalized();
    return std::abs(m.trace()) > 2.0 + tol.hyperbolic_margin;
}

inline AxisData axis_and_translation_length(const MobiusMap& m_in,
                                            const Tolerances& tol = default_tolerances()) {
    MobiusMap m = m_in.normalized();
    double t = m.trace();
    require(std::abs(t) > 2.0 + tol.hyperbolic_margin, errc::not_hyperbolic,
            "matrix is not a hyperbolic isometry");
    AxisData out;
    out.translation_length = 2.0 * std::acosh(std::abs(t) / 2.0);
    if (m.c == 0.0) {
        // fixed points: infinity and b/(d-a)
        out.axis = Geodesic(boundary(m.b / (m.d - m.a)), BoundaryPoint::infinity());
    } else {
        double disc = std::sqrt(t * t - 4.0);
        double r1 = (m.a - m.d + disc) / (2.0 * m.c);
        double r2 = (m.a - m.d - disc) / (2.0 * m.c);
        out.axis = Geodesic(boundary(r1), boundary(r2));
    }
    return out;
}

inline MobiusMap mobius_taking(const HPoint& p1, const HPoint& q1, const HPoint& p2,
                               const HPoint& q2) {
    auto frame = [](const HPoint& p, const HPoint& q) {
        // boundary endpoints of the geodesic through p, q; e1 is ahead of p->q
        BoundaryPoint e0, e1;
        if (std::abs(p.x - q.x) < 1e-14 * std::max(1.0, std::abs(p.x))) {
            e0 = boundary(p.x);
            e1 = BoundaryPoint::infinity();
            if (q.y < p.y) std::swap(e0, e1);
        } else {
            double c = ((p.x * p.x + p.y * p.y) - (q.x * q.x + q.y * q.y)) / (2.0 * (p.x - q.x));
            double r = std::hypot(p.x - c, p.y);
            e0 = boundary(c - r);
            e1 = boundary(c + r);
            if (q.x < p.x) std::swap(e0, e1);
        }
        MobiusMap m = mobius_to_vertical(e0, e1);
        HPoint w = apply(m, p);
        double s = std::sqrt(w.y);
        return (MobiusMap{1.0 / s, 0.0, 0.0, s} * m).normalized();
    };
    return frame(p2, q2).inverse() * frame(p1, q1);
}

// -------------------------------------------------------------------------
// Gromov products, visual metric ingredients

struct VisualMetricParams {
    double epsilon = 0.3;
    double delta = 1.1;
    HPoint observation_point{0.0, 1.0};

    // the paper-admissibility quantity exp(eps*delta) - 1
    double epsilon_prime() const { return std::exp(epsilon * delta) - 1.0; }
    bool admissible() const { return epsilon_prime() < std::sqrt(2.0) - 1.0; }
};

inline double gromov_product(const HPoint& o, const BoundaryPoint& a, const BoundaryPoint& b,
                             const Tolerances& tol = default_tolerances()) {
    require(!boundary_close(a, b, tol.shared_endpoint_tol), errc::degenerate_pair,
            "Gromov product needs distinct boundary points");
    return distance(o, Geodesic(a, b));
}

inline double visual_q(const VisualMetricParams& params, const BoundaryPoint& a,
                       const BoundaryPoint& b, const Tolerances& tol = default_tolerances()) {
    return std::exp(-params.epsilon * gromov_product(params.observation_point, a, b, tol));
}

// -------------------------------------------------------------------------
// Boundary arcs and o-shadows

// Open arc traversed counterclockwise (increasing boundary_angle) from `from`
// to `to`, endpoints excluded.
struct BoundaryArc {
    BoundaryPoint from, to;

    bool contains(const BoundaryPoint& p) const {
        return detail::in_ccw_arc(boundary_angle(from), boundary_angle(to), boundary_angle(p));
    }
};

inline bool arcs_intersect(const BoundaryArc& u, const BoundaryArc& v) {
    return u.contains(v.from) || u.contains(v.to) || v.contains(u.from) || v.contains(u.to);
}

// Which side of g a point lies on: sign of the "to the left of a->b" test.
inline int side_of(const Geodesic& g, const HPoint& p) {
    MobiusMap m = mobius_to_vertical(g.a, g.b);
    HPoint w = apply(m, p);
    return w.x > 0.0 ? 1 : (w.x < 0.0 ? -1 : 0);
}

// The boundary arc on the far side of g from o.
inline BoundaryArc o_shadow(const Geodesic& g, const HPoint& o,
                            const Tolerances& tol = default_tolerances()) {
    require(distance(o, g) > tol.point_on_geodesic, errc::point_on_geodesic,
            "observation point is on the geodesic");
    // The two complementary arcs are (a -> b) and (b -> a). Decide which one
    // sits on o's far side by probing a point of each arc.
    BoundaryArc ab{g.a, g.b}, ba{g.b, g.a};
    auto probe = [&](const BoundaryArc& arc) {
        double lo = boundary_angle(arc.from), hi = boundary_angle(arc.to);
        double span = hi - lo;
        while (span <= 0) span += 2.0 * pi;
        double mid = lo + span / 2.0;
        while (mid > pi) mid -= 2.0 * pi;
        // convert angle back to a boundary point
        if (std::abs(mid - pi) < 1e-15 || std::abs(mid + pi) < 1e-15)
            return BoundaryPoint::infinity();
        return boundary(std::tan(mid / 2.0));
    };
    int so = side_of(g, o);
    // side of an arc: sign of the image x-coordinate of points limiting to it
    MobiusMap m = mobius_to_vertical(g.a, g.b);
    auto arc_side = [&](const BoundaryArc& arc) {
        BoundaryPoint pr = probe(arc);
        BoundaryPoint w = apply(m, pr);
        if (w.at_infinity) return 0; // should not happen for interior probe
        return w.value > 0.0 ? 1 : -1;
    };
    return arc_side(ab) == -so ? ab : ba;
}

// -------------------------------------------------------------------------
// Horostrips

struct Horostrip {
    double y_low = 1.0, y_high = 2.0;

    Horostrip() = default;
    Horostrip(double lo, double hi) : y_low(lo), y_high(hi) {
        require(0.0 < lo && lo < hi, errc::non_positive_length,
                "horostrip needs 0 < y_low < y_high");
    }

    double width() const { return std::log(y_high / y_low); }
};

inline double horostrip_leaf_length(const Horostrip& s) { return s.width(); }

inline double quadrilateral_relation(double len_alpha, double len_beta) {
    require(len_alpha > 0.0 && len_beta > 0.0, errc::non_positive_length,
            "quadrilateral sides must have positive length");
    return std::abs(std::log(len_alpha / len_beta));
}

// -------------------------------------------------------------------------
// Path length quadrature (the module's independent oracle)

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace detail

// Length of the piecewise-linear path through the samples, measured with the
// hyperbolic line element; each segment is integrated adaptively.
inline double path_length(const std::vector<HPoint>& samples,
                          const Tolerances& tol = default_tolerances()) {
    for (const auto& p : samples) check_point(p);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const HPoint& p = samples[i];
        const HPoint& q = samples[i + 1];
        double dx = q.x - p.x, dy = q.y - p.y;
        double speed = std::hypot(dx, dy);
        if (speed == 0.0) continue;
        auto integrand = [&](double t) { return speed / (p.y + t * dy); };
        total += detail::integrate(integrand, 0.0, 1.0,
                                   tol.quadrature_tol / std::max<std::size_t>(1, samples.size()));
    }
    return total;
}

// Points along the geodesic arc between two interior points; used to feed the
// quadrature oracle.
inline std::vector<HPoint> sample_geodesic(const HPoint& p, const HPoint& q, int n) {
    std::vector<HPoint> out;
    out.reserve(n);
    if (std::abs(p.x - q.x) < 1e-14 * std::max(1.0, std::abs(p.x))) {
        for (int i = 0; i < n; ++i) {
            double t = double(i) / (n - 1);
            out.push_back(HPoint{p.x, p.y * std::pow(q.y / p.y, t)});
        }
        return out;
    }
    double c = ((p.x * p.x + p.y * p.y) - (q.x * q.x + q.y * q.y)) / (2.0 * (p.x - q.x));
    double r = std::hypot(p.x - c, p.y);
    double a0 = std::atan2(p.y, p.x - c), a1 = std::atan2(q.y, q.x - c);
    for (int i = 0; i < n; ++i) {
        double t = a0 + (a1 - a0) * double(i) / (n - 1);
        out.push_back(HPoint{c + r * std::cos(t), r * std::sin(t)});
    }
    return out;
}

// -------------------------------------------------------------------------
// Model conversion (Poincare disc <-> upper half-plane, Cayley map z->(z-i)/(z+i))

struct DiscPoint {
    double u = 0.0, v = 0.0;
};

inline DiscPoint to_disc(const HPoint& p) {
    std::complex<double> z(p.x, p.y);
    std::complex<double> w = (z - std::complex<double>(0, 1)) / (z + std::complex<double>(0, 1));
    return DiscPoint{w.real(), w.imag()};
}

inline HPoint from_disc(const DiscPoint& p) {
    std::complex<double> w(p.u, p.v);
    std::complex<double> z =
        std::complex<double>(0, 1) * (std::complex<double>(1, 0) + w) / (std::complex<double>(1, 0) - w);
    return HPoint{z.real(), z.imag()};
}

// Boundary angle on the actual disc circle (rendering + Klein chords).
inline double disc_angle(const BoundaryPoint& p) {
    if (p.at_infinity) return 0.0; // (x-i)/(x+i) -> 1 as x -> infinity
    std::complex<double> w =
        (std::complex<double>(p.value, 0) - std::complex<double>(0, 1)) /
        (std::complex<double>(p.value, 0) + std::complex<double>(0, 1));
    return std::atan2(w.imag(), w.real());
}

// -------------------------------------------------------------------------
// Coarse intersections

// Diameter (0 when empty) of {x : d(x,g1) <= D and d(x,g2) <= D} sampled on a
// grid over the hyperbolic ball of the given radius around i.
inline double coarse_intersection_diameter(const Geodesic& g1, const Geodesic& g2, double D,
                                           double window_radius,
                                           const Tolerances& tol = default_tolerances()) {
    require(D > 0.0, errc::degenerate_pair, "coarse intersections need D > 0");
    int n = tol.coarse_grid;
    double R = std::tanh(window_radius / 2.0); // Poincare-disc radius of the ball
    std::vector<HPoint> hits;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double u = R * (2.0 * i / (n - 1) - 1.0);
            double v = R * (2.0 * j / (n - 1) - 1.0);
            if (u * u + v * v >= R * R) continue;
            HPoint z = from_disc(DiscPoint{u, v});
            if (distance(z, g1) <= D && distance(z, g2) <= D) hits.push_back(z);
        }
    }
    double diam = 0.0;
    for (std::size_t i = 0; i < hits.size(); ++i)
        for (std::size_t j = i + 1; j < hits.size(); ++j)
            diam = std::max(diam, distance(hits[i], hits[j]));
    return diam;
}

// Minimax centre for a family of geodesics: a point minimizing the largest
// distance to the family, located by coarse-to-fine search in the disc.
struct MinimaxBall {
    HPoint centre;
    double radius = 0.0;
};

inline MinimaxBall minimax_center(const std::vector<Geodesic>& gs, double window_radius) {
    require(!gs.empty(), errc::degenerate_pair, "no geodesics given");
    auto score = [&](const DiscPoint& w) {
        HPoint z = from_disc(w);
        double worst = 0.0;
        for (const auto& g : gs) worst = std::max(worst, distance(z, g));
        return worst;
    };
    DiscPoint best{0.0, 0.0};
    double best_score = score(best);
    double R = std::tanh(window_radius / 2.0);
    double step = R / 8.0;
    DiscPoint centre{0.0, 0.0};
    for (int level = 0; level < 40; ++level) {
        bool improved = false;
        for (int i = -8; i <= 8; ++i) {
            for (int j = -8; j <= 8; ++j) {
                DiscPoint cand{centre.u + step * i, centre.v + step * j};
                if (cand.u * cand.u + cand.v * cand.v >= 0.98 * 0.98) continue;
                double s = score(cand);
                if (s < best_score) {
                    best_score = s;
                    best = cand;
                    improved = true;
                }
            }
        }
        centre = best;
        if (!improved) step *= 0.5;
        if (step < 1e-9) break;
    }
    return MinimaxBall{from_disc(best), best_score};
}

// -------------------------------------------------------------------------
// Chain-infimum approximation of the visual metric over a boundary grid.
// Grid nodes are `samples` equally spaced boundary angles; pair distances are
// shortest chains with q_epsilon weights. Only inequalities against q itself
// are ever asserted downstream.

class VisualChainMetric {
public:
    VisualChainMetric(const VisualMetricParams& params, int samples,
                      const Tolerances& tol = default_tolerances())
        : params_(params), tol_(tol) {
        require(params.admissible(), errc::degenerate_pair,
                "visual metric parameters violate the admissibility bound");
        points_.reserve(samples);
        for (int i = 0; i < samples; ++i) {
            double t = -pi + (2.0 * pi) * (i + 0.5) / samples;
            points_.push_back(boundary(std::tan(t / 2.0)));
        }
    }

    const std::vector<BoundaryPoint>& points() const { return points_; }

    double q(int i, int j) const { return visual_q(params_, points_[i], points_[j], tol_); }

    // single-source shortest chains to every other grid point
    std::vector<double> chain_from(int src) const {
        const std::size_t n = points_.size();
        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        std::vector<char> done(n, 0);
        dist[src] = 0.0;
        // dense Dijkstra: the graph is complete
        for (std::size_t round = 0; round < n; ++round) {
            int u = -1;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k)
                if (!done[k] && dist[k] < best) {
                    best = dist[k];
                    u = int(k);
                }
            if (u < 0) break;
            done[u] = 1;
            for (std::size_t k = 0; k < n; ++k) {
                if (done[k]) continue;
                double w = dist[u] + q(u, int(k));
                if (w < dist[k]) dist[k] = w;
            }
        }
        return dist;
    }

private:
    VisualMetricParams params_;
    Tolerances tol_;
    std::vector<BoundaryPoint> points_;
};

} // namespace waffle
