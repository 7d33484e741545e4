#include <catch2/catch_amalgamated.hpp>

#include "waffle/arrangement.hpp"
#include "waffle/pattern.hpp"
#include "waffle/surface.hpp"

using namespace waffle;

namespace {

LinePattern from_geodesics(const std::vector<Geodesic>& gs) {
    LinePattern p;
    for (std::size_t i = 0; i < gs.size(); ++i)
        p.lines.push_back({gs[i], "l" + std::to_string(i), {}});
    return p;
}

const SurfaceGroupPresentation& genus2() {
    static SurfaceGroupPresentation s = standard_generators(2);
    return s;
}

} // namespace

TEST_CASE("standard generators") {
    for (int g : {2, 3}) {
        auto s = standard_generators(g);
        CHECK(static_cast<int>(s.generators.size()) == 2 * g);
        CHECK(s.relator_defect <= 1e-8);
        for (const auto& m : s.generators) CHECK(std::abs(m.normalized().trace()) > 2.0);
    }
    CHECK_THROWS_AS(standard_generators(1), error);
    CHECK_THROWS_AS(standard_generators(7), error);
}

TEST_CASE("generate_pattern basics") {
    CHECK(generate_pattern(genus2(), {}, Window(2.0, 3)).size() == 0);

    // cap 0 keeps only curves whose own axis meets the window
    auto pat = generate_pattern(genus2(), {{{1}, "a1"}}, Window(2.0, 0));
    REQUIRE(pat.size() == 1);
    CHECK(pat.lines[0].conjugator.empty());
    auto ax = axis_and_translation_length(genus2().generators[0]).axis;
    CHECK((boundary_close(pat.lines[0].geo.a, ax.a, 1e-9) ||
           boundary_close(pat.lines[0].geo.a, ax.b, 1e-9)));

    CHECK_THROWS_AS(generate_pattern(genus2(), {{{1, 2, -1, -2, 3, 4, -3, -4}, "relator"}},
                                     Window(2.0, 1)),
                    error); // the relator word is the identity, not hyperbolic

    // deduplication: endpoint pairs are pairwise distinct
    auto pair = generate_pattern(genus2(), {{{1, 4}, "c0"}, {{3, 2}, "c1"}}, Window(3.0, 6));
    for (std::size_t i = 0; i < pair.size(); ++i)
        for (std::size_t j = i + 1; j < pair.size(); ++j) {
            bool same =
                (boundary_close(pair.lines[i].geo.a, pair.lines[j].geo.a, 1e-9) &&
                 boundary_close(pair.lines[i].geo.b, pair.lines[j].geo.b, 1e-9)) ||
                (boundary_close(pair.lines[i].geo.a, pair.lines[j].geo.b, 1e-9) &&
                 boundary_close(pair.lines[i].geo.b, pair.lines[j].geo.a, 1e-9));
            CHECK_FALSE(same);
        }
}

TEST_CASE("pattern saturation at the test window") {
    std::vector<CurveSpec> curves = {{{1, 4}, "c0"}, {{3, 2}, "c1"}};
    auto p6 = generate_pattern(genus2(), curves, Window(3.0, 6));
    auto p7 = generate_pattern(genus2(), curves, Window(3.0, 7));
    CHECK(p6.size() == p7.size());
    CHECK(p6.size() >= 10);
}

TEST_CASE("pattern equivariance on the shrunken window") {
    std::vector<CurveSpec> curves = {{{1, 4}, "c0"}, {{3, 2}, "c1"}};
    Window w(4.0, 8);
    auto pat = generate_pattern(genus2(), curves, w);
    const MobiusMap& g = genus2().generators[0];
    double shrink = w.radius - distance(HPoint{0, 1}, apply(g, HPoint{0, 1}));
    REQUIRE(shrink > 0);
    Window small(shrink, 9);
    auto big = generate_pattern(genus2(), curves, Window(w.radius, 9));

    // g-image of every pattern line meeting the shrunken window appears in the
    // regenerated pattern with cap+1
    int checked = 0;
    for (const auto& line : pat.lines) {
        Geodesic moved = apply(g, line.geo);
        if (distance(HPoint{0, 1}, moved) > small.radius) continue;
        ++checked;
        bool found = false;
        for (const auto& other : big.lines) {
            bool same = (boundary_close(moved.a, other.geo.a, 1e-7) &&
                         boundary_close(moved.b, other.geo.b, 1e-7)) ||
                        (boundary_close(moved.a, other.geo.b, 1e-7) &&
                         boundary_close(moved.b, other.geo.a, 1e-7));
            if (same) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }
    CHECK(checked > 0);
}

TEST_CASE("arrangement counts on tiny configurations") {
    Window w(2.5, 0);
    SECTION("one line: two unbounded chambers") {
        auto cc = arrangement(from_geodesics({geodesic(-1, 1)}), w);
        CHECK(cc.chambers.size() == 2);
        CHECK_FALSE(cc.chambers[0].bounded);
        CHECK_FALSE(cc.chambers[1].bounded);
        auto sg = shadow_graph(cc);
        CHECK(sg.edges.size() == 1);
    }
    SECTION("two crossing lines: four chambers around one vertex") {
        auto cc = arrangement(from_geodesics({geodesic(-1, 1), geodesic_to_infinity(0)}), w);
        CHECK(cc.chambers.size() == 4);
        int crossings = 0;
        for (const auto& v : cc.vertices)
            if (!v.on_window) ++crossings;
        CHECK(crossings == 1);
        // shadow graph is the 4-cycle
        auto sg = shadow_graph(cc);
        CHECK(sg.edges.size() == 4);
        for (const auto& adjacency : sg.adjacency) CHECK(adjacency.size() == 2);
        CHECK(sg.connected);
    }
    SECTION("triangle: seven chambers, one bounded of degree three") {
        auto cc = arrangement(
            from_geodesics({geodesic(-1.3, 0.8), geodesic(-0.4, 5.0), geodesic(-6.0, 0.1)}), w);
        CHECK(cc.chambers.size() == 7);
        int bounded = -1;
        for (std::size_t i = 0; i < cc.chambers.size(); ++i)
            if (cc.chambers[i].bounded) {
                CHECK(bounded < 0);
                bounded = static_cast<int>(i);
            }
        REQUIRE(bounded >= 0);
        auto sg = shadow_graph(cc);
        CHECK(sg.adjacency[bounded].size() == 3);

        // brute-force region count by sampling: every sampled point's sign
        // vector appears among the chambers
        std::vector<std::vector<std::int8_t>> seen;
        for (int i = -40; i <= 40; ++i) {
            for (int j = -40; j <= 40; ++j) {
                klein::Vec p{i / 45.0 * cc.klein_radius, j / 45.0 * cc.klein_radius};
                if (klein::norm(p) >= cc.klein_radius * 0.999) continue;
                std::vector<std::int8_t> sig;
                bool on_line = false;
                for (const auto& ch : cc.chords) {
                    int s = ch.side(p);
                    if (s == 0 || std::abs(klein::dot(ch.n, p) - ch.c) < 1e-3) on_line = true;
                    sig.push_back(static_cast<std::int8_t>(s));
                }
                if (on_line) continue;
                if (std::find(seen.begin(), seen.end(), sig) == seen.end()) seen.push_back(sig);
            }
        }
        CHECK(seen.size() == cc.chambers.size());
        for (const auto& sig : seen) {
            bool found = false;
            for (const auto& ch : cc.chambers) found = found || ch.side == sig;
            CHECK(found);
        }
    }
}

TEST_CASE("arrangement rejects near tangencies") {
    auto g1 = geodesic(-1.0, 1.0);
    auto g2 = geodesic(-1.0 - 1e-9, 1.0 - 1e-9); // crosses g1 at a tiny angle
    REQUIRE(crossing(g1, g2));
    CHECK_THROWS_AS(arrangement(from_geodesics({g1, g2}), Window(2.5, 0)), error);
}

TEST_CASE("Euler check and edge incidences on a surface window") {
    std::vector<CurveSpec> curves = {{{1, 4}, "c0"}, {{3, 2}, "c1"}};
    Window w(3.4, 6);
    auto pat = generate_pattern(genus2(), curves, w);
    auto cc = arrangement(pat, w); // arrangement() itself asserts Euler
    CHECK(cc.chambers.size() > 10);
    auto sg = shadow_graph(cc);
    CHECK(sg.connected);
    // shadow degree equals the number of polygon sides (interior edges)
    for (std::size_t i = 0; i < cc.chambers.size(); ++i) {
        int sides = 0;
        for (int e : cc.chambers[i].edges)
            if (cc.edges[e].line >= 0) ++sides;
        CHECK(static_cast<int>(sg.adjacency[i].size()) == sides);
    }
}

TEST_CASE("filling detection") {
    SECTION("empty pattern is not filling") {
        auto cc = arrangement(LinePattern{}, Window(3.0, 0));
        auto rep = filling_check(cc, Window(3.0, 0));
        CHECK_FALSE(rep.filling);
        CHECK(rep.witness_chamber == 0); // the whole window, unbounded
    }
    SECTION("single simple closed curve never fills") {
        Window w(5.0, 12);
        auto pat = generate_pattern(genus2(), {{{1}, "a1"}}, w);
        auto cc = arrangement(pat, w);
        auto rep = filling_check(cc, w, 3.0);
        CHECK_FALSE(rep.filling);
        CHECK(rep.witness_chamber >= 0);
        CHECK_FALSE(cc.chambers[rep.witness_chamber].bounded);
    }
    SECTION("filling pair certifies on the saturated window") {
        std::vector<CurveSpec> curves = {{{1, 4}, "c0"}, {{3, 2}, "c1"}};
        Window w(6.2, 16);
        auto pat = generate_pattern(genus2(), curves, w);
        auto cc = arrangement(pat, w);
        auto rep = filling_check(cc, w, 4.5);
        CHECK(rep.filling);
        CHECK(rep.margin > rep.unbounded_reach);
        // monotone: adding a curve keeps it filling
        std::vector<CurveSpec> more = curves;
        more.push_back({{1}, "a1"});
        auto pat2 = generate_pattern(genus2(), more, w);
        auto cc2 = arrangement(pat2, w);
        CHECK(filling_check(cc2, w, 4.5).filling);
    }
}
