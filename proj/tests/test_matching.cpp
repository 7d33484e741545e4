#include <catch2/catch_amalgamated.hpp>

#include "waffle/matching.hpp"
#include "waffle/pattern.hpp"

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

std::vector<Geodesic> hexagonal_lines() {
    std::vector<Geodesic> gs;
    for (double ang : {0.0, pi / 3, 2 * pi / 3}) {
        auto fam = perpendicular_family(ang, {-0.83, 0.11, 0.9});
        gs.insert(gs.end(), fam.begin(), fam.end());
    }
    return gs;
}

MobiusMap rotation_about_base(double angle) {
    double t = angle / 2.0;
    return MobiusMap{std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
}

} // namespace

TEST_CASE("identity matching gives the identity isomorphism") {
    auto b = build({geodesic(-1, 1), geodesic_to_infinity(0)});
    auto m = QuasiMatching::identity(b.ws.wall_count);
    auto iso = combinatorialize(m, b.ws, b.model, b.ws, b.model);
    for (std::size_t v = 0; v < b.model.vertex_count(); ++v)
        CHECK(iso.vertex_map[v] == static_cast<int>(v));
    CHECK(verify_isomorphism(iso, b.model, b.model).valid);
}

TEST_CASE("arc swap on every wall of a square flips the square") {
    auto b = build({geodesic(-1, 1), geodesic_to_infinity(0)});
    QuasiMatching m = QuasiMatching::identity(b.ws.wall_count);
    m.arc_flip.assign(b.ws.wall_count, 1);
    // on four endpoints this matching is realized both ways around the circle
    CHECK_NOTHROW(matching_orientation(b.ws, b.ws, m));
    auto iso = combinatorialize(m, b.ws, b.model, b.ws, b.model);
    auto report = verify_isomorphism(iso, b.model, b.model);
    CHECK(report.valid);
    // it is an involution and not the identity
    bool nontrivial = false;
    for (std::size_t v = 0; v < b.model.vertex_count(); ++v) {
        nontrivial = nontrivial || iso.vertex_map[v] != static_cast<int>(v);
        CHECK(iso.vertex_map[iso.vertex_map[v]] == static_cast<int>(v));
    }
    CHECK(nontrivial);
    // enumerate all vertex maps by brute force and confirm membership
    SearchConstraints cons;
    cons.wall_map = iso.wall_map;
    auto all = find_isomorphisms(b.model, b.model, cons);
    CHECK(std::find(all.begin(), all.end(), iso.vertex_map) != all.end());
}

TEST_CASE("rotation matchings reproduce the brute-force isomorphism") {
    auto lines = hexagonal_lines();
    auto b1 = build(lines, 2.2);
    MobiusMap rot = rotation_about_base(0.4);
    std::vector<Geodesic> rotated;
    for (const auto& g : lines) rotated.push_back(apply(rot, g));
    auto b2 = build(rotated, 2.2);
    REQUIRE(b1.model.vertex_count() == b2.model.vertex_count());

    auto m = matching_from_mobius(b1.ws, b2.ws, rot);
    CHECK(matching_orientation(b1.ws, b2.ws, m) == true);
    auto iso = combinatorialize(m, b1.ws, b1.model, b2.ws, b2.model);
    auto report = verify_isomorphism(iso, b1.model, b2.model);
    CHECK(report.valid);

    SearchConstraints cons;
    cons.wall_map = iso.wall_map;
    auto all = find_isomorphisms(b1.model, b2.model, cons);
    REQUIRE(all.size() == 1);
    CHECK(all[0] == iso.vertex_map);
}

TEST_CASE("functoriality of combinatorialization") {
    auto lines = hexagonal_lines();
    auto b1 = build(lines, 2.2);
    MobiusMap r1 = rotation_about_base(0.3), r2 = rotation_about_base(0.5);
    std::vector<Geodesic> lines2, lines3;
    for (const auto& g : lines) lines2.push_back(apply(r1, g));
    for (const auto& g : lines2) lines3.push_back(apply(r2, g));
    auto b2 = build(lines2, 2.2);
    auto b3 = build(lines3, 2.2);

    auto m1 = matching_from_mobius(b1.ws, b2.ws, r1);
    auto m2 = matching_from_mobius(b2.ws, b3.ws, r2);
    auto iso1 = combinatorialize(m1, b1.ws, b1.model, b2.ws, b2.model);
    auto iso2 = combinatorialize(m2, b2.ws, b2.model, b3.ws, b3.model);
    auto iso12 = combinatorialize(m1.then(m2), b1.ws, b1.model, b3.ws, b3.model);
    for (std::size_t v = 0; v < b1.model.vertex_count(); ++v)
        CHECK(iso12.vertex_map[v] == iso2.vertex_map[iso1.vertex_map[v]]);

    // identity law
    auto id = QuasiMatching::identity(b1.ws.wall_count);
    auto iso_id = combinatorialize(id, b1.ws, b1.model, b1.ws, b1.model);
    for (std::size_t v = 0; v < b1.model.vertex_count(); ++v)
        CHECK(iso_id.vertex_map[v] == static_cast<int>(v));

    // hyperplane transport: dual edges of w map onto dual edges of its image
    for (int w = 0; w < b1.ws.wall_count; ++w) {
        auto h1 = hyperplane(b1.model, b1.ws, w);
        auto h2 = hyperplane(b2.model, b2.ws, m1.wall_bijection[w]);
        std::set<std::pair<int, int>> target;
        for (int e : h2.dual_edges) {
            target.insert({b2.model.edges[e][0], b2.model.edges[e][1]});
        }
        for (int e : h1.dual_edges) {
            int iv = iso1.vertex_map[b1.model.edges[e][0]];
            int iu = iso1.vertex_map[b1.model.edges[e][1]];
            CHECK(target.count({std::min(iv, iu), std::max(iv, iu)}) == 1);
        }
    }
}

TEST_CASE("verification catches mutations") {
    auto b = build(hexagonal_lines(), 2.2);
    auto iso = combinatorialize(QuasiMatching::identity(b.ws.wall_count), b.ws, b.model, b.ws,
                                b.model);
    REQUIRE(verify_isomorphism(iso, b.model, b.model).valid);
    // swap two images
    std::swap(iso.vertex_map[0], iso.vertex_map[1]);
    auto report = verify_isomorphism(iso, b.model, b.model);
    CHECK_FALSE(report.valid);
    CHECK(report.witness_edge >= 0);
}

TEST_CASE("order violations are rejected") {
    auto b = build(hexagonal_lines(), 2.2);
    QuasiMatching m = QuasiMatching::identity(b.ws.wall_count);
    std::swap(m.wall_bijection[0], m.wall_bijection[2]); // two parallel walls
    CHECK_THROWS_AS(combinatorialize(m, b.ws, b.model, b.ws, b.model), error);
}

TEST_CASE("transport onto a mismatched window fails consistency") {
    // two walls crossing inside the window vs the same walls with the
    // crossing far outside a smaller window
    auto near = build({geodesic(-1.0, 1.0), geodesic(-0.9, 30.0)}, 2.5);
    auto far = build({geodesic(-1.0, 1.0), geodesic(-0.9, 30.0)}, 1.0);
    REQUIRE(near.ws.crossing_in_window[0][1] == 1);
    REQUIRE(far.ws.crossing_in_window[0][1] == 0);
    REQUIRE(near.model.vertex_count() == 4);
    REQUIRE(far.model.vertex_count() == 3);
    auto m = QuasiMatching::identity(2);
    CHECK_THROWS_AS(combinatorialize(m, near.ws, near.model, far.ws, far.model), error);
}
