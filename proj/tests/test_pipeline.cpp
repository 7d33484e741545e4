#include <catch2/catch_amalgamated.hpp>

#include "waffle/pipeline.hpp"

using namespace waffle;

namespace {

json minimal_synthetic() {
    return json::parse(R"({
      "churros": [
        {"id": "c0", "core": "Z", "flaps": [
          {"edge": "e0", "family_size": 2, "tau": 2.0},
          {"edge": "e1", "family_size": 3, "tau": 3.0}]}
      ],
      "edges": [
        {"id": "e0", "waffle": "w0", "churro": "c0", "coweight": "derive"},
        {"id": "e1", "waffle": "w1", "churro": "c0", "reflective": true, "coweight": "derive"}
      ],
      "surfaces": [
        {"id": "w0", "genus": 2, "curves": []},
        {"id": "w1", "genus": 2, "curves": []}
      ]
    })");
}

json unbalanced_cycle() {
    return json::parse(R"({
      "churros": [
        {"id": "c0", "core": "Z", "flaps": [
          {"edge": "e0", "family_size": 2, "tau": 1.0},
          {"edge": "e3", "family_size": 1, "tau": 1.0}]},
        {"id": "c1", "core": "Z", "flaps": [
          {"edge": "e1", "family_size": 1, "tau": 1.0},
          {"edge": "e2", "family_size": 1, "tau": 1.0}]}
      ],
      "edges": [
        {"id": "e0", "waffle": "w0", "churro": "c0", "coweight": "derive"},
        {"id": "e1", "waffle": "w0", "churro": "c1", "coweight": "derive"},
        {"id": "e2", "waffle": "w1", "churro": "c1", "coweight": "derive"},
        {"id": "e3", "waffle": "w1", "churro": "c0", "coweight": "derive"}
      ],
      "surfaces": [
        {"id": "w0", "genus": 2, "curves": []},
        {"id": "w1", "genus": 2, "curves": []}
      ]
    })");
}

} // namespace

TEST_CASE("parsing accepts the minimal document") {
    auto spec = parse_input(minimal_synthetic());
    CHECK(spec.graph.vertex_count() == 3);
    CHECK(spec.graph.edge_count() == 2);
    CHECK(spec.graph.edges[0].coweight == 2);
    CHECK(spec.graph.edges[1].reflective);
}

TEST_CASE("parsing rejects malformed documents") {
    SECTION("unknown field is named") {
        json j = minimal_synthetic();
        j["surfaces"][0]["genur"] = 3;
        try {
            parse_input(j);
            FAIL("expected a schema error");
        } catch (const error& e) {
            CHECK(e.code() == errc::schema_error);
            CHECK(std::string(e.what()).find("genur") != std::string::npos);
        }
    }
    SECTION("churro in the waffle slot") {
        json j = minimal_synthetic();
        j["edges"][0]["waffle"] = "c0";
        j["edges"][0]["churro"] = "w0";
        try {
            parse_input(j);
            FAIL("expected an orientation violation");
        } catch (const error& e) {
            CHECK(e.code() == errc::orientation_violation);
        }
    }
    SECTION("unknown endpoint id") {
        json j = minimal_synthetic();
        j["edges"][0]["waffle"] = "nope";
        try {
            parse_input(j);
            FAIL("expected a bipartite violation");
        } catch (const error& e) {
            CHECK(e.code() == errc::bipartite_violation);
        }
    }
    SECTION("derive without a flap entry") {
        json j = minimal_synthetic();
        j["churros"][0]["flaps"][0]["edge"] = "e9";
        CHECK_THROWS_AS(parse_input(j), error);
    }
}

TEST_CASE("synthetic tree certifies with exit code 0") {
    auto spec = parse_input(minimal_synthetic());
    auto result = run_pipeline(spec, {Stage::certify});
    CHECK(result.exit_code == 0);
    CHECK(result.report.at("result") == "certificate");
    CHECK(result.report.at("stages").at("group").at("success") == true);
    // deterministic: a second run produces the identical document
    auto again = run_pipeline(spec, {Stage::certify});
    CHECK(result.report.dump() == again.report.dump());
}

TEST_CASE("unbalanced cycle reports the obstruction with exit code 2") {
    auto spec = parse_input(unbalanced_cycle());
    auto result = run_pipeline(spec, {Stage::certify});
    CHECK(result.exit_code == 2);
    CHECK(result.report.at("result") == "obstruction");
    auto& cycle = result.report.at("stages").at("group").at("obstruction").at(0);
    CHECK(cycle.at("cycle").size() == 4);
    // balance stage shows the same products
    CHECK(result.report.at("stages").at("balance").at("balanced") == false);
}

TEST_CASE("mismatched clutching data fails certification") {
    json j = minimal_synthetic();
    j["edges"][0]["tau"] = 2.0;
    j["edges"][1]["tau"] = 4.0; // flap side says 3.0: ratios disagree
    auto spec = parse_input(j);
    auto result = run_pipeline(spec, {Stage::certify});
    CHECK(result.exit_code == 3);
    CHECK(result.report.at("result") == "failure");

    j["edges"][0]["tau"] = 4.0;
    j["edges"][1]["tau"] = 6.0; // scaled copy of (2,3): ratios agree
    auto ok = run_pipeline(parse_input(j), {Stage::certify});
    CHECK(ok.exit_code == 0);
    CHECK(ok.report.at("stages").at("clutching").at(0).at("match") == true);
}

TEST_CASE("geometric stages run on a small window") {
    json j = json::parse(R"({
      "churros": [
        {"id": "c0", "core": "Z", "flaps": [
          {"edge": "e0", "family_size": 1},
          {"edge": "e1", "family_size": 1}]}
      ],
      "edges": [
        {"id": "e0", "waffle": "w0", "churro": "c0", "coweight": "derive"},
        {"id": "e1", "waffle": "w0", "churro": "c0", "coweight": "derive"}
      ],
      "surfaces": [
        {"id": "w0", "genus": 2, "curves": [
          {"edge": "e0", "word": [1, 4], "label": "c0"},
          {"edge": "e1", "word": [3, 2], "label": "c1"}]}
      ],
      "window": {"radius": 3.0, "cap": 6}
    })");
    auto spec = parse_input(j);
    auto result = run_pipeline(spec, {Stage::cubulate, Stage::strands}, "", true);
    REQUIRE(result.exit_code == 0);
    const auto& model_stage = result.report.at("stages").at("cubulate").at(0);
    CHECK(model_stage.at("dimension") == model_stage.at("max_crossing_clique"));
    CHECK(model_stage.at("vertices").get<std::size_t>() > 0);
    // serialized model: sorted vertices, consistent counts
    const auto& model = model_stage.at("model");
    CHECK(model.at("vertices").size() == model_stage.at("vertices").get<std::size_t>());
    CHECK(model.at("edges").size() == model_stage.at("edges").get<std::size_t>());
    auto prev = model.at("vertices").at(0).get<std::vector<int>>();
    for (std::size_t i = 1; i < model.at("vertices").size(); ++i) {
        auto cur = model.at("vertices").at(i).get<std::vector<int>>();
        CHECK(prev < cur);
        prev = cur;
    }
    // strand translation lengths came from the window combinatorics
    for (const auto& entry : result.report.at("stages").at("strands")) {
        CHECK(entry.at("mode") == "l1-combinatorial");
        CHECK(entry.at("tau").get<double>() > 0);
    }
}

TEST_CASE("matching files round trip") {
    QuasiMatching m;
    m.wall_bijection = {2, 0, 1};
    m.arc_flip = {1, 0, 1};
    auto back = matching_from_json(matching_to_json(m));
    CHECK(back.wall_bijection == m.wall_bijection);
    CHECK(back.arc_flip == m.arc_flip);
    json bad = json::parse(R"({"pairs": [{"from": 0, "to": 1, "arc_flip": false}], "extra": 1})");
    CHECK_THROWS_AS(matching_from_json(bad), error);
}

TEST_CASE("non-filling geometric input fails check-filling with exit code 3") {
    json j = json::parse(R"({
      "churros": [
        {"id": "c0", "core": "Z", "flaps": [{"edge": "e0", "family_size": 1}]}
      ],
      "edges": [
        {"id": "e0", "waffle": "w0", "churro": "c0", "coweight": "derive"}
      ],
      "surfaces": [
        {"id": "w0", "genus": 2, "curves": [
          {"edge": "e0", "word": [1], "label": "a1"}]}
      ],
      "window": {"radius": 3.0, "cap": 6, "margin": 1.0}
    })");
    auto spec = parse_input(j);
    auto result = run_pipeline(spec, {Stage::check_filling});
    CHECK(result.exit_code == 3);
    CHECK(result.report.at("result") == "failure");
    CHECK(result.report.at("stages").at("check-filling").at(0).contains("witness_chamber"));
}
