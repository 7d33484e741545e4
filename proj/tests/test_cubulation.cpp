#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "waffle/strands.hpp"

using namespace waffle;

namespace {

LinePattern from_geodesics(const std::vector<Geodesic>& gs) {
    LinePattern p;
    for (std::size_t i = 0; i < gs.size(); ++i)
        p.lines.push_back({gs[i], "l" + std::to_string(i), {}});
    return p;
}

struct Built {
    ChamberComplex cc;
    WallSystem ws;
    CubeComplexModel model;
};

Built build(const std::vector<Geodesic>& gs, double radius = 2.5) {
    Built b;
    b.cc = arrangement(from_geodesics(gs), Window(radius, 0));
    b.ws = wall_system(b.cc);
    b.model = cubulate(b.ws);
    return b;
}

Built hexagonal(double radius = 2.2) {
    std::vector<Geodesic> gs;
    for (double ang : {0.0, pi / 3, 2 * pi / 3}) {
        auto fam = perpendicular_family(ang, {-0.83, 0.11, 0.9});
        gs.insert(gs.end(), fam.begin(), fam.end());
    }
    return build(gs, radius);
}

std::vector<Geodesic> triangle_lines() {
    return {geodesic(-1.3, 0.8), geodesic(-0.4, 5.0), geodesic(-6.0, 0.1)};
}

void check_model_invariants(const Built& b) {
    const auto& model = b.model;
    // chamber -> vertex map is injective and a graph homomorphism matching
    // edge labels exactly
    std::set<int> images(model.realized.begin(), model.realized.end());
    CHECK(images.size() == model.realized.size());
    auto sg = shadow_graph(b.cc);
    for (const auto& e : sg.edges) {
        int v = model.realized[e.c1], u = model.realized[e.c2];
        int found_wall = -1;
        for (auto [w, n] : model.adjacency[v])
            if (n == u) found_wall = w;
        CHECK(found_wall == e.line);
    }
    // edges differ on exactly the labelled wall
    for (const auto& e : model.edges) {
        int diff = 0, wall = -1;
        for (int w = 0; w < model.wall_count; ++w)
            if (model.side(e[0], w) != model.side(e[1], w)) {
                ++diff;
                wall = w;
            }
        CHECK(diff == 1);
        CHECK(wall == e[2]);
    }
    // every vertex reachable from a realized one (flip completeness)
    std::vector<char> seen(model.vertex_count(), 0);
    std::vector<int> stack(model.realized.begin(), model.realized.end());
    for (int v : stack) seen[v] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto [w, u] : model.adjacency[v]) {
            (void)w;
            if (!seen[u]) {
                seen[u] = 1;
                stack.push_back(u);
            }
        }
    }
    for (std::size_t v = 0; v < model.vertex_count(); ++v) CHECK(seen[v] == 1);
    // cube faces: the 2k facets of every cube are cubes
    std::set<std::pair<int, std::vector<int>>> cubes;
    for (const auto& c : model.cubes) cubes.insert({c.base, c.walls});
    for (const auto& c : model.cubes) {
        if (c.walls.size() < 3) continue;
        for (std::size_t k = 0; k < c.walls.size(); ++k) {
            std::vector<int> face = c.walls;
            face.erase(face.begin() + k);
            int other = model.neighbor_across(c.base, c.walls[k]);
            REQUIRE(other >= 0);
            // min corners of the two parallel facets
            for (int base : {c.base, other}) {
                int best = base;
                for (std::uint32_t mask = 1; mask < (1u << face.size()); ++mask) {
                    int corner = base;
                    for (std::size_t bindex = 0; bindex < face.size(); ++bindex)
                        if (mask & (1u << bindex)) corner = model.neighbor_across(corner, face[bindex]);
                    best = std::min(best, corner);
                }
                CHECK(cubes.count({best, face}) == 1);
            }
        }
    }
    // dimension equals the maximal crossing clique
    CHECK(dimension(b.model) == max_crossing_clique(b.ws));
}

} // namespace

TEST_CASE("wall systems from arrangements") {
    SECTION("one wall") {
        auto b = build({geodesic(-1, 1)});
        CHECK(b.ws.wall_count == 1);
        std::set<std::vector<std::int8_t>> sides(b.ws.chamber_sides.begin(),
                                                 b.ws.chamber_sides.end());
        CHECK(sides.size() == 2);
    }
    SECTION("two crossing walls realize all four side patterns") {
        auto b = build({geodesic(-1, 1), geodesic_to_infinity(0)});
        CHECK(b.ws.crossing_in_window[0][1] == 1);
        CHECK(b.ws.combo_mask[0][1] == 0xF);
    }
    SECTION("triangle: all three pairs cross") {
        auto b = build(triangle_lines());
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) CHECK(b.ws.crossing_in_window[i][j] == 1);
    }
}

TEST_CASE("cubulation of small windows") {
    SECTION("two crossing walls give a single square") {
        auto b = build({geodesic(-1, 1), geodesic_to_infinity(0)});
        CHECK(b.model.vertex_count() == 4);
        CHECK(b.model.edges.size() == 4);
        REQUIRE(b.model.cubes.size() == 1);
        CHECK(b.model.cubes[0].walls.size() == 2);
        CHECK(dimension(b.model) == 2);
        check_model_invariants(b);
    }
    SECTION("triangle: seven realized chambers plus one completion, one 3-cube") {
        auto b = build(triangle_lines());
        CHECK(b.model.realized.size() == 7);
        CHECK(b.model.vertex_count() == 8);
        int nonrealized = 0;
        for (auto f : b.model.is_realized)
            if (!f) ++nonrealized;
        CHECK(nonrealized == 1);
        int threes = 0;
        for (const auto& c : b.model.cubes)
            if (c.walls.size() == 3) ++threes;
        CHECK(threes == 1);
        CHECK(dimension(b.model) == 3);
        check_model_invariants(b);

        // enumerate all 2^3 orientations independently: exactly eight are
        // pairwise witnessed
        int consistent = 0;
        for (int mask = 0; mask < 8; ++mask) {
            bool ok = true;
            for (int i = 0; i < 3 && ok; ++i)
                for (int j = i + 1; j < 3 && ok; ++j)
                    ok = b.ws.combo_ok(i, j, (mask >> i) & 1 ? 1 : -1, (mask >> j) & 1 ? 1 : -1);
            if (ok) ++consistent;
        }
        CHECK(consistent == 8);
    }
    SECTION("hexagonal-style window has dimension three") {
        auto b = hexagonal();
        CHECK(dimension(b.model) == 3);
        CHECK(max_crossing_clique(b.ws) == 3);
        check_model_invariants(b);
    }
    SECTION("surface pattern window") {
        auto s = standard_generators(2);
        std::vector<CurveSpec> curves = {{{1, 4}, "c0"}, {{3, 2}, "c1"}};
        Window w(3.4, 6);
        auto pat = generate_pattern(s, curves, w);
        Built b;
        b.cc = arrangement(pat, w);
        b.ws = wall_system(b.cc);
        b.model = cubulate(b.ws);
        CHECK(b.model.vertex_count() >= b.cc.chambers.size());
        check_model_invariants(b);
    }
}

TEST_CASE("consistency overflow guard") {
    // many pairwise-crossing walls: the flip closure is the full hypercube
    int walls = 24;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < walls; ++i)
        for (int j = i + 1; j < walls; ++j) pairs.push_back({i, j});
    std::vector<std::vector<std::int8_t>> chambers = {std::vector<std::int8_t>(walls, -1)};
    auto ws = synthetic_wall_system(walls, chambers, pairs);
    Tolerances tol;
    tol.vertex_cap = 1000;
    CHECK_THROWS_AS(cubulate(ws, tol), error);
}

TEST_CASE("hyperplane records") {
    auto square = build({geodesic(-1, 1), geodesic_to_infinity(0)});
    for (int w : {0, 1}) {
        auto h = hyperplane(square.model, square.ws, w);
        CHECK(h.dual_edges.size() == 2);
        CHECK(h.carrier_vertices.size() == 4);
        REQUIRE(h.endpoints.has_value());
    }
    auto tri = build(triangle_lines());
    for (int w : {0, 1, 2}) CHECK(hyperplane(tri.model, tri.ws, w).dual_edges.size() == 4);
    CHECK_THROWS_AS(hyperplane(tri.model, tri.ws, 5), error);

    // independent edge-label scan on the hexagonal window
    auto hex = hexagonal();
    for (int w = 0; w < hex.ws.wall_count; ++w) {
        auto h = hyperplane(hex.model, hex.ws, w);
        std::size_t count = 0;
        for (const auto& e : hex.model.edges)
            if (e[2] == w) ++count;
        CHECK(h.dual_edges.size() == count);
    }
}

TEST_CASE("automorphisms") {
    SECTION("a single square has the eight symmetries") {
        auto b = build({geodesic(-1, 1), geodesic_to_infinity(0)});
        auto autos = automorphisms(b.model, {});
        CHECK(autos.size() == 8);
    }
    SECTION("fixing a square pointwise leaves only the identity") {
        for (auto b : {build(triangle_lines()), hexagonal()}) {
            auto sq = some_square(b.model);
            REQUIRE(sq.has_value());
            SearchConstraints cons;
            for (int v : *sq) cons.vertex_pins.push_back({v, v});
            auto autos = automorphisms(b.model, cons);
            REQUIRE(autos.size() == 1);
            for (std::size_t v = 0; v < b.model.vertex_count(); ++v)
                CHECK(autos[0][v] == static_cast<int>(v));
        }
    }
    SECTION("triangle 3-cube: flag-preserving subgroup of the 48 cube symmetries") {
        auto b = build(triangle_lines());
        auto autos = automorphisms(b.model, {});
        // the stabilizer of the unique non-realized corner of the 3-cube
        CHECK(autos.size() == 6);
        SearchConstraints label_free;
        label_free.preserve_realized = false;
        CHECK(automorphisms(b.model, label_free).size() == 48);
    }
    SECTION("vertex cap") {
        auto b = build(triangle_lines());
        Tolerances tol;
        tol.automorphism_cap = 3;
        CHECK_THROWS_AS(automorphisms(b.model, {}, tol), error);
    }
}

TEST_CASE("window automorphisms never translate a strand") {
    auto b = hexagonal();
    auto autos = automorphisms(b.model, {});
    REQUIRE(!autos.empty());
    for (const auto& a : autos) {
        try {
            strand(b.model, b.ws, 1, a);
            FAIL("expected NotTranslating or NotStabilizing");
        } catch (const error& e) {
            CHECK((e.code() == errc::not_translating || e.code() == errc::not_stabilizing));
        }
    }
}

TEST_CASE("strand symmetries from model automorphisms") {
    auto b = hexagonal();
    // central wall of the first family
    int wall = 1; // station 0.11 of family at angle 0
    auto autos = automorphisms(b.model, {});
    REQUIRE(autos.size() >= 2);
    std::vector<StrandSymmetry> syms;
    for (const auto& a : autos) {
        try {
            syms.push_back(strand_symmetry_of(b.model, b.ws, wall, a));
        } catch (const error& e) {
            CHECK(e.code() == errc::not_stabilizing);
        }
    }
    REQUIRE(!syms.empty());
    auto type = classify_strand(syms);
    INFO("tag " << strand_tag_name(type.tag));
    // the window is mirror symmetric across the family axis: the strand is
    // reflective, and the brute-force check agrees pointwise
    bool has_pointwise = false;
    for (const auto& s : syms) has_pointwise = has_pointwise || s.half_space_swap;
    CHECK(has_pointwise == type.reflective());
}
