#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "waffle/hyperbolic.hpp"

using namespace waffle;

namespace {

std::mt19937& rng() {
    static std::mt19937 gen(815123);
    return gen;
}

HPoint random_point(double box = 3.0) {
    std::uniform_real_distribution<double> dx(-box, box), dy(0.05, box);
    return HPoint{dx(rng()), dy(rng())};
}

MobiusMap random_mobius() {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    while (true) {
        MobiusMap m{d(rng()), d(rng()), d(rng()), d(rng())};
        if (m.det() > 0.1) return m.normalized();
    }
}

Geodesic random_geodesic() {
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    while (true) {
        double a = d(rng()), b = d(rng());
        if (std::abs(a - b) > 0.2) return geodesic(a, b);
    }
}

} // namespace

TEST_CASE("distance basics") {
    CHECK(distance(HPoint{0, 1}, HPoint{0, 1}) == 0.0);
    CHECK_THAT(distance(HPoint{0, 1}, HPoint{0, std::exp(1.0)}),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
    // quadrature oracle along the geodesic arc
    HPoint p{0, 1}, q{1, 1};
    double d = distance(p, q);
    auto samples = sample_geodesic(p, q, 10000);
    CHECK_THAT(path_length(samples), Catch::Matchers::WithinAbs(d, 1e-6));
}

TEST_CASE("distance is a Mobius-invariant metric") {
    for (int trial = 0; trial < 200; ++trial) {
        HPoint a = random_point(), b = random_point(), c = random_point();
        double dab = distance(a, b);
        CHECK_THAT(distance(b, a), Catch::Matchers::WithinAbs(dab, 1e-12));
        CHECK(dab + distance(b, c) >= distance(a, c) - 1e-9);
        MobiusMap m = random_mobius();
        CHECK_THAT(distance(apply(m, a), apply(m, b)), Catch::Matchers::WithinAbs(dab, 1e-9));
    }
}

TEST_CASE("apply fixes the advertised points") {
    MobiusMap id = MobiusMap::identity();
    HPoint p = apply(id, HPoint{0, 1});
    CHECK(p.x == 0.0);
    CHECK(p.y == 1.0);

    MobiusMap diag{2.0, 0.0, 0.0, 0.5};
    BoundaryPoint zero = apply(diag, boundary(0.0));
    CHECK_FALSE(zero.at_infinity);
    CHECK(zero.value == 0.0);

    MobiusMap parab{1.0, 1.0, 0.0, 1.0};
    CHECK(apply(parab, BoundaryPoint::infinity()).at_infinity);

    // composition compatibility
    for (int trial = 0; trial < 50; ++trial) {
        MobiusMap m1 = random_mobius(), m2 = random_mobius();
        HPoint x = random_point();
        HPoint lhs = apply(m1 * m2, x);
        HPoint rhs = apply(m1, apply(m2, x));
        CHECK_THAT(lhs.x, Catch::Matchers::WithinAbs(rhs.x, 1e-9));
        CHECK_THAT(lhs.y, Catch::Matchers::WithinAbs(rhs.y, 1e-9));
    }
}

TEST_CASE("axis and translation length") {
    MobiusMap diag{2.0, 0.0, 0.0, 0.5};
    AxisData ax = axis_and_translation_length(diag);
    CHECK_THAT(ax.translation_length, Catch::Matchers::WithinAbs(2.0 * std::log(2.0), 1e-12));
    bool has_zero = (!ax.axis.a.at_infinity && ax.axis.a.value == 0.0) ||
                    (!ax.axis.b.at_infinity && ax.axis.b.value == 0.0);
    bool has_inf = ax.axis.a.at_infinity || ax.axis.b.at_infinity;
    CHECK(has_zero);
    CHECK(has_inf);

    CHECK_THROWS_AS(axis_and_translation_length(MobiusMap::identity()), error);

    for (int trial = 0; trial < 100; ++trial) {
        MobiusMap g = random_mobius();
        MobiusMap conj = g * diag * g.inverse();
        AxisData cx = axis_and_translation_length(conj);
        CHECK_THAT(cx.translation_length, Catch::Matchers::WithinAbs(ax.translation_length, 1e-9));
        Geodesic expected = apply(g, ax.axis);
        bool same =
            (boundary_close(cx.axis.a, expected.a, 1e-7) && boundary_close(cx.axis.b, expected.b, 1e-7)) ||
            (boundary_close(cx.axis.a, expected.b, 1e-7) && boundary_close(cx.axis.b, expected.a, 1e-7));
        CHECK(same);
        // the length agrees with displacement of a point on the axis
        HPoint on_axis = crossing_point(cx.axis, apply(g, geodesic(-1.0, 1.0)));
        (void)on_axis;
    }

    // displacement on the axis equals the translation length
    HPoint p{0, 1};
    CHECK_THAT(distance(p, apply(diag, p)),
               Catch::Matchers::WithinAbs(ax.translation_length, 1e-12));
}

TEST_CASE("crossing by endpoint interleaving") {
    CHECK(crossing(geodesic(-1, 1), geodesic_to_infinity(0)));
    CHECK_FALSE(crossing(geodesic(-2, -1), geodesic(1, 2)));
    CHECK(crossing(geodesic(-1, 1), geodesic(-2, 0)));
    CHECK_THROWS_AS(crossing(geodesic(0, 1), geodesic(0, 2)), error);

    // derived check: the two half-circles of (-1,1) and (-2,0) intersect above
    // the real line
    HPoint w = crossing_point(geodesic(-1, 1), geodesic(-2, 0));
    CHECK(w.y > 0.0);
    CHECK_THAT(std::hypot(w.x, w.y), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(std::hypot(w.x + 1.0, w.y), Catch::Matchers::WithinAbs(1.0, 1e-12));

    for (int trial = 0; trial < 200; ++trial) {
        Geodesic g1 = random_geodesic(), g2 = random_geodesic();
        bool ok = true;
        bool c12 = false, c21 = false;
        try {
            c12 = crossing(g1, g2);
            c21 = crossing(g2, g1);
        } catch (const error&) {
            ok = false;
        }
        if (!ok) continue;
        CHECK(c12 == c21);
        MobiusMap m = random_mobius();
        CHECK(crossing(apply(m, g1), apply(m, g2)) == c12);
    }
}

TEST_CASE("gromov product and visual q") {
    // o on the geodesic
    CHECK_THAT(gromov_product(HPoint{0, 1}, boundary(-1), boundary(1)),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(gromov_product(HPoint{0, 1}, boundary(0), BoundaryPoint::infinity()),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
    // radial distance ln 2 from (0,2) to the unit half-circle
    double gp = gromov_product(HPoint{0, 2}, boundary(-1), boundary(1));
    CHECK_THAT(gp, Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
    VisualMetricParams params;
    params.observation_point = HPoint{0, 2};
    CHECK_THAT(visual_q(params, boundary(-1), boundary(1)),
               Catch::Matchers::WithinAbs(std::pow(2.0, -params.epsilon), 1e-12));
    CHECK_THROWS_AS(gromov_product(HPoint{0, 1}, boundary(2), boundary(2)), error);

    // confirm the radial distance by quadrature
    auto arc = sample_geodesic(HPoint{0, 2}, HPoint{0, 1}, 200);
    CHECK_THAT(path_length(arc), Catch::Matchers::WithinAbs(gp, 1e-8));
}

TEST_CASE("o-shadows") {
    BoundaryArc sh = o_shadow(geodesic(-1, 1), HPoint{0, 2});
    CHECK(sh.contains(boundary(0.0)));
    CHECK_FALSE(sh.contains(boundary(5.0)));
    CHECK_FALSE(sh.contains(BoundaryPoint::infinity()));

    BoundaryArc sh2 = o_shadow(geodesic_to_infinity(0), HPoint{1, 1});
    CHECK(sh2.contains(boundary(-3.0)));
    CHECK_FALSE(sh2.contains(boundary(3.0)));

    CHECK_THROWS_AS(o_shadow(geodesic(-1, 1), HPoint{0, 1}), error);

    // crossing geodesics have intersecting shadows
    for (int trial = 0; trial < 300; ++trial) {
        Geodesic g = random_geodesic(), h = random_geodesic();
        HPoint o = random_point();
        try {
            if (!crossing(g, h)) continue;
            if (distance(o, g) < 1e-3 || distance(o, h) < 1e-3) continue;
            CHECK(arcs_intersect(o_shadow(g, o), o_shadow(h, o)));
        } catch (const error&) {
            continue;
        }
    }
}

TEST_CASE("horostrips and the quadrilateral relation") {
    Horostrip unit(1.0, std::exp(1.0));
    CHECK_THAT(horostrip_leaf_length(unit), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(Horostrip(0.0, 1.0), error);
    CHECK_THROWS_AS(quadrilateral_relation(0.0, 1.0), error);

    // alpha of Euclidean length 2 at y=1 vs beta at y=4
    double alpha = 2.0 / 1.0, beta = 2.0 / 4.0;
    Horostrip s(1.0, 4.0);
    CHECK_THAT(quadrilateral_relation(alpha, beta),
               Catch::Matchers::WithinAbs(s.width(), 1e-12));
    std::vector<HPoint> leaf = {HPoint{0, 1}, HPoint{0, 4}};
    CHECK_THAT(path_length(leaf), Catch::Matchers::WithinAbs(std::log(4.0), 1e-6));

    std::uniform_real_distribution<double> dy(0.1, 5.0), dl(0.2, 8.0);
    for (int trial = 0; trial < 100; ++trial) {
        double lo = dy(rng());
        double hi = lo + dy(rng());
        double L = dl(rng());
        Horostrip strip(lo, hi);
        double a = L / lo, b = L / hi;
        CHECK_THAT(quadrilateral_relation(a, b), Catch::Matchers::WithinAbs(strip.width(), 1e-9));
        std::vector<HPoint> v = {HPoint{0.3, lo}, HPoint{0.3, hi}};
        CHECK_THAT(path_length(v), Catch::Matchers::WithinAbs(strip.width(), 1e-5));
    }
}

TEST_CASE("path length") {
    CHECK(path_length({HPoint{1, 1}, HPoint{1, 1}}) == 0.0);
    CHECK_THAT(path_length({HPoint{0, 1}, HPoint{0, std::exp(1.0)}}),
               Catch::Matchers::WithinAbs(1.0, 1e-8));
}

TEST_CASE("coarse intersection diameter") {
    // widely separated "parallel" geodesics: empty coarse intersection
    double D = 0.4;
    CHECK(coarse_intersection_diameter(geodesic(-100, -99), geodesic(99, 100), D, 3.0) == 0.0);

    Geodesic g1 = geodesic(-1, 1), g2 = geodesic_to_infinity(0);
    double d1 = coarse_intersection_diameter(g1, g2, 1.0, 4.0);
    CHECK(d1 > 0.0);
    // stable once the window already contains the region
    double d2 = coarse_intersection_diameter(g1, g2, 1.0, 5.0);
    CHECK_THAT(d2, Catch::Matchers::WithinAbs(d1, 5e-2));
    // monotone in D
    CHECK(coarse_intersection_diameter(g1, g2, 2.0, 5.0) >= d1);
}

TEST_CASE("visual metric sandwich on a grid") {
    VisualMetricParams params;
    REQUIRE(params.admissible());
    VisualChainMetric metric(params, 256);
    double eps_prime = params.epsilon_prime();
    int violations = 0;
    for (int src = 0; src < 24; ++src) {
        auto d = metric.chain_from(src * 10);
        for (std::size_t j = 0; j < metric.points().size(); ++j) {
            if (int(j) == src * 10) continue;
            double qv = metric.q(src * 10, int(j));
            if (!(d[j] <= qv + 1e-12)) ++violations;
            if (!((1.0 - 2.0 * eps_prime) * qv <= d[j] + 1e-12)) ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("pairwise crossing families meet a common ball") {
    std::uniform_real_distribution<double> d(-4.0, 4.0);
    for (int trial = 0; trial < 10; ++trial) {
        // build up to 6 pairwise crossing geodesics by rejection
        std::vector<Geodesic> fam;
        int guard = 0;
        while (int(fam.size()) < 6 && guard++ < 4000) {
            Geodesic g = random_geodesic();
            bool ok = true;
            try {
                for (const auto& h : fam)
                    if (!crossing(g, h)) { ok = false; break; }
            } catch (const error&) {
                ok = false;
            }
            if (ok) fam.push_back(g);
        }
        if (fam.size() < 3) continue;
        MinimaxBall ball = minimax_center(fam, 6.0);
        CHECK(std::isfinite(ball.radius));
        for (const auto& g : fam) CHECK(distance(ball.centre, g) <= ball.radius + 1e-6);
    }
}

TEST_CASE("mobius_taking moves marked segments") {
    for (int trial = 0; trial < 100; ++trial) {
        HPoint p1 = random_point(), q1 = random_point();
        if (distance(p1, q1) < 0.05) continue;
        MobiusMap g = random_mobius();
        HPoint p2 = apply(g, p1), q2 = apply(g, q1);
        MobiusMap m = mobius_taking(p1, q1, p2, q2);
        HPoint pp = apply(m, p1), qq = apply(m, q1);
        CHECK_THAT(pp.x, Catch::Matchers::WithinAbs(p2.x, 1e-8));
        CHECK_THAT(pp.y, Catch::Matchers::WithinAbs(p2.y, 1e-8));
        CHECK_THAT(qq.x, Catch::Matchers::WithinAbs(q2.x, 1e-8));
        CHECK_THAT(qq.y, Catch::Matchers::WithinAbs(q2.y, 1e-8));
    }
}

TEST_CASE("disc conversions round trip") {
    for (int trial = 0; trial < 100; ++trial) {
        HPoint p = random_point();
        HPoint back = from_disc(to_disc(p));
        CHECK_THAT(back.x, Catch::Matchers::WithinAbs(p.x, 1e-10));
        CHECK_THAT(back.y, Catch::Matchers::WithinAbs(p.y, 1e-10));
    }
    CHECK_THAT(disc_angle(BoundaryPoint::infinity()), Catch::Matchers::WithinAbs(0.0, 1e-15));
}
