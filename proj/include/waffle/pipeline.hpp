#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "waffle/matching.hpp"
#include "waffle/strands.hpp"
#include "waffle/svg.hpp"

// Input parsing and pipeline orchestration: curves -> pattern -> waffle ->
// clutching -> quotient graph -> grouping certificate, with a deterministic
// JSON report.

namespace waffle {

using json = nlohmann::json;

struct CurveOnEdge {
    std::string edge;
    CurveSpec curve;
};

struct SurfaceInput {
    std::string id;
    int genus = 2;
    std::vector<CurveOnEdge> curves;
};

struct FlapInput {
    std::string edge;
    unsigned long long family_size = 1;
    std::optional<double> tau;
};

struct ChurroInput {
    std::string id;
    CoreFactor core = CoreFactor::Z;
    std::vector<FlapInput> flaps;
};

struct EdgeInput {
    std::string id;
    std::string waffle, churro;
    bool reflective = false;
    std::optional<unsigned long long> coweight; // absent means "derive"
    std::optional<double> tau;                  // strand-side translation length
};

struct InputSpec {
    std::vector<SurfaceInput> surfaces;
    std::vector<ChurroInput> churros;
    std::vector<EdgeInput> edges;
    Window window{3.0, 6};
    double margin = -1.0; // negative: use the tolerance default
    Tolerances tolerances;

    // resolved quotient graph: waffle vertices first, then churros
    QuotientGraph graph;
    std::map<std::string, int> vertex_index;
    std::map<std::string, int> edge_index;
};

namespace detail {

inline void check_fields(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    require(j.is_object(), errc::schema_error, where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        require(allowed.count(it.key()) == 1, errc::schema_error,
                "unknown field \"" + it.key() + "\" in " + where);
}

template <typename T>
T field(const json& j, const std::string& key, const std::string& where) {
    require(j.contains(key), errc::schema_error, where + " is missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(errc::schema_error, where + " has a malformed \"" + key + "\"");
    }
}

} // namespace detail

inline InputSpec parse_input(const json& j) {
    InputSpec spec;
    detail::check_fields(
        j, {"surfaces", "churros", "edges", "window", "tolerances", "margin"}, "input");

    if (j.contains("window")) {
        detail::check_fields(j.at("window"), {"radius", "cap", "margin"}, "window");
        double radius = detail::field<double>(j.at("window"), "radius", "window");
        int cap = detail::field<int>(j.at("window"), "cap", "window");
        spec.window = Window(radius, cap);
        if (j.at("window").contains("margin"))
            spec.margin = j.at("window").at("margin").get<double>();
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        detail::check_fields(t,
                             {"endpoint_dedupe", "tangency_angle", "shortening_tol",
                              "ratio_match_rel", "tau_equal_rel", "vertex_cap",
                              "automorphism_cap", "epsilon", "delta", "boundary_samples"},
                             "tolerances");
        auto& tol = spec.tolerances;
        if (t.contains("endpoint_dedupe")) tol.endpoint_dedupe = t.at("endpoint_dedupe");
        if (t.contains("tangency_angle")) tol.tangency_angle = t.at("tangency_angle");
        if (t.contains("shortening_tol")) tol.shortening_tol = t.at("shortening_tol");
        if (t.contains("ratio_match_rel")) tol.ratio_match_rel = t.at("ratio_match_rel");
        if (t.contains("tau_equal_rel")) tol.tau_equal_rel = t.at("tau_equal_rel");
        if (t.contains("vertex_cap")) tol.vertex_cap = t.at("vertex_cap").get<std::size_t>();
        if (t.contains("automorphism_cap"))
            tol.automorphism_cap = t.at("automorphism_cap").get<std::size_t>();
        if (t.contains("epsilon")) tol.epsilon = t.at("epsilon");
        if (t.contains("delta")) tol.delta = t.at("delta");
        if (t.contains("boundary_samples")) tol.boundary_samples = t.at("boundary_samples");
    }

    std::set<std::string> ids;
    if (j.contains("surfaces")) {
        for (const auto& js : j.at("surfaces")) {
            detail::check_fields(js, {"id", "genus", "curves"}, "surface");
            SurfaceInput s;
            s.id = detail::field<std::string>(js, "id", "surface");
            s.genus = detail::field<int>(js, "genus", "surface " + s.id);
            if (js.contains("curves")) {
                for (const auto& jc : js.at("curves")) {
                    detail::check_fields(jc, {"edge", "word", "label"}, "curve");
                    CurveOnEdge c;
                    c.edge = detail::field<std::string>(jc, "edge", "curve");
                    c.curve.word = detail::field<std::vector<int>>(jc, "word", "curve");
                    c.curve.label =
                        jc.contains("label") ? jc.at("label").get<std::string>() : c.edge;
                    s.curves.push_back(c);
                }
            }
            require(ids.insert(s.id).second, errc::schema_error, "duplicate id " + s.id);
            spec.surfaces.push_back(s);
        }
    }
    require(j.contains("churros"), errc::schema_error, "input is missing \"churros\"");
    for (const auto& jc : j.at("churros")) {
        detail::check_fields(jc, {"id", "core", "flaps"}, "churro");
        ChurroInput c;
        c.id = detail::field<std::string>(jc, "id", "churro");
        std::string core = detail::field<std::string>(jc, "core", "churro " + c.id);
        require(core == "Z" || core == "dihedral", errc::schema_error,
                "churro core must be \"Z\" or \"dihedral\"");
        c.core = core == "Z" ? CoreFactor::Z : CoreFactor::ZxZ2;
        for (const auto& jf : jc.at("flaps")) {
            detail::check_fields(jf, {"edge", "family_size", "tau"}, "flap");
            FlapInput f;
            f.edge = detail::field<std::string>(jf, "edge", "flap");
            f.family_size = detail::field<unsigned long long>(jf, "family_size", "flap");
            if (jf.contains("tau")) f.tau = jf.at("tau").get<double>();
            c.flaps.push_back(f);
        }
        require(ids.insert(c.id).second, errc::schema_error, "duplicate id " + c.id);
        spec.churros.push_back(c);
    }
    require(j.contains("edges"), errc::schema_error, "input is missing \"edges\"");
    for (const auto& je : j.at("edges")) {
        detail::check_fields(je, {"id", "waffle", "churro", "reflective", "coweight", "tau"},
                             "edge");
        EdgeInput e;
        e.id = detail::field<std::string>(je, "id", "edge");
        e.waffle = detail::field<std::string>(je, "waffle", "edge " + e.id);
        e.churro = detail::field<std::string>(je, "churro", "edge " + e.id);
        if (je.contains("reflective")) e.reflective = je.at("reflective").get<bool>();
        if (je.contains("coweight") && !je.at("coweight").is_string())
            e.coweight = je.at("coweight").get<unsigned long long>();
        else if (je.contains("coweight"))
            require(je.at("coweight").get<std::string>() == "derive", errc::schema_error,
                    "coweight must be a positive integer or \"derive\"");
        if (je.contains("tau")) e.tau = je.at("tau").get<double>();
        spec.edges.push_back(e);
    }

    // resolve the quotient graph: waffles first, then churros
    for (const auto& s : spec.surfaces) {
        spec.vertex_index[s.id] = spec.graph.vertex_count();
        spec.graph.kinds.push_back(VertexKind::waffle);
    }
    for (const auto& c : spec.churros) {
        spec.vertex_index[c.id] = spec.graph.vertex_count();
        spec.graph.kinds.push_back(VertexKind::churro);
    }
    for (const auto& e : spec.edges) {
        require(spec.edge_index.emplace(e.id, spec.graph.edge_count()).second, errc::schema_error,
                "duplicate edge id " + e.id);
        auto wit = spec.vertex_index.find(e.waffle);
        auto cit = spec.vertex_index.find(e.churro);
        require(wit != spec.vertex_index.end() && cit != spec.vertex_index.end(),
                errc::bipartite_violation, "edge " + e.id + " references an unknown vertex");
        require(spec.graph.kinds[wit->second] == VertexKind::waffle,
                errc::orientation_violation,
                "edge " + e.id + " lists a churro in its waffle slot");
        require(spec.graph.kinds[cit->second] == VertexKind::churro, errc::bipartite_violation,
                "edge " + e.id + " does not end at a churro");
        QuotientEdge qe;
        qe.waffle = wit->second;
        qe.churro = cit->second;
        qe.reflective = e.reflective;
        // coweight: supplied, or derived from the churro flap family
        if (e.coweight) {
            qe.coweight = *e.coweight;
        } else {
            bool found = false;
            for (const auto& c : spec.churros) {
                if (spec.vertex_index.at(c.id) != cit->second) continue;
                for (const auto& f : c.flaps)
                    if (f.edge == e.id) {
                        qe.coweight = f.family_size;
                        found = true;
                    }
            }
            require(found, errc::schema_error,
                    "edge " + e.id + " derives its coweight from a missing flap entry");
        }
        spec.graph.edges.push_back(qe);
    }
    spec.graph.validate();
    return spec;
}

inline InputSpec parse(const std::string& path) {
    std::ifstream in(path);
    require(bool(in), errc::io_error, "cannot read " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& err) {
        fail(errc::schema_error, std::string("JSON parse error: ") + err.what());
    }
    return parse_input(j);
}

// ---------------------------------------------------------------------------
// Matching files: a list of wall-id pairs with an arc-orientation bit

inline json matching_to_json(const QuasiMatching& m) {
    json pairs = json::array();
    for (std::size_t w = 0; w < m.wall_bijection.size(); ++w)
        pairs.push_back({{"from", w},
                         {"to", m.wall_bijection[w]},
                         {"arc_flip", m.arc_flip[w] != 0}});
    return json{{"pairs", pairs}};
}

inline QuasiMatching matching_from_json(const json& j) {
    detail::check_fields(j, {"pairs"}, "matching");
    QuasiMatching m;
    std::size_t n = j.at("pairs").size();
    m.wall_bijection.assign(n, -1);
    m.arc_flip.assign(n, 0);
    for (const auto& p : j.at("pairs")) {
        detail::check_fields(p, {"from", "to", "arc_flip"}, "matching pair");
        std::size_t from = detail::field<std::size_t>(p, "from", "matching pair");
        require(from < n, errc::schema_error, "matching pair index out of range");
        m.wall_bijection[from] = detail::field<int>(p, "to", "matching pair");
        if (p.contains("arc_flip")) m.arc_flip[from] = p.at("arc_flip").get<bool>() ? 1 : 0;
    }
    for (int w : m.wall_bijection)
        require(w >= 0, errc::schema_error, "matching does not cover every wall");
    return m;
}

// ---------------------------------------------------------------------------
// Model serialization (documented form: vertices as sorted side-choice
// vectors, cubes as base index plus wall list)

inline json model_to_json(const CubeComplexModel& model) {
    std::vector<std::vector<int>> sides(model.vertex_count());
    for (std::size_t v = 0; v < model.vertex_count(); ++v)
        for (int w = 0; w < model.wall_count; ++w)
            sides[v].push_back(model.side(static_cast<int>(v), w) > 0 ? 1 : 0);
    std::vector<int> order(model.vertex_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return sides[a] < sides[b]; });
    std::vector<int> rank(model.vertex_count());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);

    json out;
    out["walls"] = model.wall_labels;
    json verts = json::array();
    for (int v : order) verts.push_back(sides[v]);
    out["vertices"] = verts;
    json edges = json::array();
    std::vector<std::array<int, 3>> sorted_edges;
    for (const auto& e : model.edges) {
        int a = rank[e[0]], b = rank[e[1]];
        sorted_edges.push_back({std::min(a, b), std::max(a, b), e[2]});
    }
    std::sort(sorted_edges.begin(), sorted_edges.end());
    for (const auto& e : sorted_edges) edges.push_back({e[0], e[1], e[2]});
    out["edges"] = edges;
    json cubes = json::array();
    std::vector<std::pair<int, std::vector<int>>> sorted_cubes;
    for (const auto& c : model.cubes) {
        int best = rank[c.base];
        // the minimal corner in the serialized order
        for (std::uint32_t mask = 1; mask < (1u << c.walls.size()); ++mask) {
            int corner = c.base;
            for (std::size_t b = 0; b < c.walls.size(); ++b)
                if (mask & (1u << b)) corner = model.neighbor_across(corner, c.walls[b]);
            best = std::min(best, rank[corner]);
        }
        sorted_cubes.push_back({best, c.walls});
    }
    std::sort(sorted_cubes.begin(), sorted_cubes.end());
    for (const auto& [base, walls] : sorted_cubes) {
        json c;
        c["base"] = base;
        c["walls"] = walls;
        cubes.push_back(c);
    }
    out["cubes"] = cubes;
    json realized = json::array();
    std::vector<int> rr;
    for (int v : model.realized) rr.push_back(rank[v]);
    std::sort(rr.begin(), rr.end());
    for (int v : rr) realized.push_back(v);
    out["realized"] = realized;
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline

enum class Stage { check_filling, cubulate, strands, clutching, balance, group, certify };

inline std::optional<Stage> stage_from_name(const std::string& name) {
    if (name == "check-filling") return Stage::check_filling;
    if (name == "cubulate") return Stage::cubulate;
    if (name == "strands") return Stage::strands;
    if (name == "clutching") return Stage::clutching;
    if (name == "balance") return Stage::balance;
    if (name == "group") return Stage::group;
    if (name == "certify") return Stage::certify;
    return std::nullopt;
}

struct PipelineResult {
    json report;
    int exit_code = 0; // 0 certificate, 2 obstruction, 3 precondition failure, 1 internal
};

namespace detail {

struct BuiltSurface {
    LinePattern pattern;
    ChamberComplex cc;
    WallSystem ws;
    CubeComplexModel model;
    std::map<std::string, double> tau_by_edge; // combinatorial counts
};

// combinatorial translation length: pattern lines crossing one period of the
// curve's own axis
inline double combinatorial_tau(const LinePattern& pattern, const MobiusMap& element,
                                const Tolerances& tol) {
    AxisData ax = axis_and_translation_length(element, tol);
    MobiusMap frame = mobius_to_vertical(ax.axis.a, ax.axis.b);
    HPoint base_image = apply(frame, HPoint{0.0, 1.0});
    double t0 = std::log(std::hypot(base_image.x, base_image.y));
    int count = 0;
    for (const auto& line : pattern.lines) {
        Geodesic g = apply(frame, line.geo);
        if (g.vertical()) continue; // shares no crossing with the axis
        double u = g.a.value, v = g.b.value;
        if (u * v >= 0) continue; // does not cross the axis
        double t = std::log(std::sqrt(-u * v));
        double offset = t - t0;
        if (offset >= -ax.translation_length / 2 && offset < ax.translation_length / 2) ++count;
    }
    return static_cast<double>(count);
}

} // namespace detail

inline PipelineResult run_pipeline(const InputSpec& spec, const std::vector<Stage>& stages_in,
                                   const std::string& figures_dir = "",
                                   bool emit_models = false) {
    const Tolerances& tol = spec.tolerances;
    PipelineResult out;
    json& report = out.report;

    std::set<Stage> stages;
    for (Stage s : stages_in) {
        if (s == Stage::certify) {
            for (Stage t : {Stage::check_filling, Stage::cubulate, Stage::strands,
                            Stage::clutching, Stage::balance, Stage::group})
                stages.insert(t);
        }
        stages.insert(s);
    }
    bool geometric = false;
    for (const auto& s : spec.surfaces) geometric = geometric || !s.curves.empty();

    report["config"]["window"] = {{"radius", spec.window.radius},
                                  {"cap", spec.window.word_length_cap}};
    double margin = spec.margin >= 0 ? spec.margin : tol.filling_margin;
    report["config"]["margin"] = margin;
    report["config"]["tolerances"] = {{"endpoint_dedupe", tol.endpoint_dedupe},
                                      {"tangency_angle", tol.tangency_angle},
                                      {"shortening_tol", tol.shortening_tol},
                                      {"ratio_match_rel", tol.ratio_match_rel},
                                      {"tau_equal_rel", tol.tau_equal_rel}};
    report["config"]["mode"] = geometric ? "geometric" : "synthetic";

    std::map<std::string, detail::BuiltSurface> built;

    try {
        // ---- geometric stages ------------------------------------------------
        if (geometric &&
            (stages.count(Stage::check_filling) || stages.count(Stage::cubulate) ||
             stages.count(Stage::strands))) {
            json stage_filling = json::array();
            json stage_models = json::array();
            for (const auto& s : spec.surfaces) {
                if (s.curves.empty()) continue;
                auto surface = standard_generators(s.genus);
                std::vector<CurveSpec> curves;
                for (const auto& c : s.curves) curves.push_back(c.curve);
                detail::BuiltSurface b;
                b.pattern = generate_pattern(surface, curves, spec.window, tol);
                b.cc = arrangement(b.pattern, spec.window, tol);

                if (stages.count(Stage::check_filling)) {
                    auto rep = filling_check(b.cc, spec.window, margin, tol);
                    json jf = {{"id", s.id},
                               {"filling", rep.filling},
                               {"lines", b.pattern.size()},
                               {"chambers", b.cc.chambers.size()},
                               {"interior_chambers", rep.interior_chambers},
                               {"unbounded_reach", rep.unbounded_reach},
                               {"margin", rep.margin}};
                    if (!rep.filling) jf["witness_chamber"] = rep.witness_chamber;
                    stage_filling.push_back(jf);
                    if (!rep.filling) {
                        report["stages"]["check-filling"] = stage_filling;
                        report["result"] = "failure";
                        report["failure"] = "surface " + s.id + " is not filling";
                        out.exit_code = 3;
                        return out;
                    }
                }
                if (stages.count(Stage::cubulate) || stages.count(Stage::strands)) {
                    b.ws = wall_system(b.cc, tol);
                    b.model = cubulate(b.ws, tol);
                    int dim = dimension(b.model);
                    int clique = max_crossing_clique(b.ws);
                    require(dim == clique, errc::degenerate_arrangement,
                            "cube dimension disagrees with the crossing clique");
                    int squares = 0;
                    for (const auto& c : b.model.cubes)
                        if (c.walls.size() == 2) ++squares;
                    json jm = {{"id", s.id},
                               {"walls", b.ws.wall_count},
                               {"vertices", b.model.vertex_count()},
                               {"edges", b.model.edges.size()},
                               {"squares", squares},
                               {"dimension", dim},
                               {"max_crossing_clique", clique},
                               {"margin_pairs", b.ws.margin_pairs.size()}};
                    if (emit_models) jm["model"] = model_to_json(b.model);
                    stage_models.push_back(jm);
                }
                if (stages.count(Stage::strands)) {
                    auto surface_group = standard_generators(s.genus);
                    for (const auto& c : s.curves) {
                        MobiusMap element = evaluate_word(surface_group, c.curve.word);
                        b.tau_by_edge[c.edge] = detail::combinatorial_tau(b.pattern, element, tol);
                    }
                }
                if (!figures_dir.empty()) {
                    pattern_svg(b.pattern, figures_dir + "/" + s.id + "_pattern.svg");
                    chambers_svg(b.cc, figures_dir + "/" + s.id + "_chambers.svg");
                    if (!b.model.vertices.empty() && b.model.vertex_count() < 20000)
                        skeleton_svg(b.model, b.cc, figures_dir + "/" + s.id + "_skeleton.svg");
                }
                built[s.id] = std::move(b);
            }
            if (stages.count(Stage::check_filling) && !stage_filling.empty())
                report["stages"]["check-filling"] = stage_filling;
            if (stages.count(Stage::cubulate) && !stage_models.empty())
                report["stages"]["cubulate"] = stage_models;
        }

        // ---- strand translation lengths -------------------------------------
        std::map<std::string, std::pair<double, std::string>> tau_of_edge; // value, mode
        if (stages.count(Stage::strands) || stages.count(Stage::clutching)) {
            json jt = json::array();
            for (const auto& e : spec.edges) {
                std::optional<double> tau;
                std::string mode;
                const ChurroInput* churro = nullptr;
                for (const auto& c : spec.churros)
                    if (c.id == e.churro) churro = &c;
                if (churro)
                    for (const auto& f : churro->flaps)
                        if (f.edge == e.id && f.tau) {
                            tau = *f.tau;
                            mode = "supplied-flap";
                        }
                if (!tau && e.tau) {
                    tau = *e.tau;
                    mode = "supplied-strand";
                }
                if (!tau) {
                    auto it = built.find(e.waffle);
                    if (it != built.end()) {
                        auto jt2 = it->second.tau_by_edge.find(e.id);
                        if (jt2 != it->second.tau_by_edge.end()) {
                            tau = jt2->second;
                            mode = "l1-combinatorial";
                        }
                    }
                }
                if (tau) {
                    tau_of_edge[e.id] = {*tau, mode};
                    jt.push_back({{"edge", e.id}, {"tau", *tau}, {"mode", mode}});
                } else {
                    jt.push_back({{"edge", e.id}, {"tau", nullptr}, {"mode", "unavailable"}});
                }
            }
            if (stages.count(Stage::strands)) report["stages"]["strands"] = jt;
        }

        // ---- clutching --------------------------------------------------------
        if (stages.count(Stage::clutching)) {
            json jc = json::array();
            for (const auto& c : spec.churros) {
                // flap-side and strand-side tau vectors over the incident edges
                std::vector<std::string> incident;
                for (const auto& e : spec.edges)
                    if (e.churro == c.id) incident.push_back(e.id);
                Churro flap_side, strand_side;
                bool have_flap = !incident.empty(), have_strand = !incident.empty();
                for (const auto& eid : incident) {
                    std::optional<double> ft, st;
                    for (const auto& f : c.flaps)
                        if (f.edge == eid && f.tau) ft = f.tau;
                    for (const auto& e : spec.edges)
                        if (e.id == eid && e.tau) st = e.tau;
                    if (!st) {
                        auto it = tau_of_edge.find(eid);
                        if (it != tau_of_edge.end() && it->second.second == "l1-combinatorial")
                            st = it->second.first;
                    }
                    if (ft) flap_side.flaps.push_back({eid, *ft});
                    else have_flap = false;
                    if (st) strand_side.flaps.push_back({eid, *st});
                    else have_strand = false;
                }
                const Churro* use = have_flap ? &flap_side : (have_strand ? &strand_side : nullptr);
                json entry;
                entry["id"] = c.id;
                if (!use) {
                    if (!incident.empty()) {
                        entry["status"] = "no translation lengths available";
                        jc.push_back(entry);
                        continue;
                    }
                    entry["status"] = "no flaps";
                    jc.push_back(entry);
                    continue;
                }
                auto data = clutching(*use, tol);
                entry["tau_core"] = data.tau_core;
                json widths = json::array(), taus = json::array(), flags = json::array();
                for (std::size_t i = 0; i < data.arity(); ++i) {
                    taus.push_back(data.taus[i]);
                    widths.push_back(data.widths[i]);
                    flags.push_back(static_cast<bool>(data.euclidean_flags[i]));
                }
                entry["taus"] = taus;
                entry["widths"] = widths;
                entry["euclidean_flaps"] = flags;
                if (have_flap && have_strand && data.arity() >= 2) {
                    auto other = clutching(strand_side, tol);
                    std::vector<std::size_t> corr(data.arity());
                    for (std::size_t i = 0; i < corr.size(); ++i) corr[i] = i;
                    auto match = clutching_match(data, other, corr, tol);
                    entry["match"] = match.ok;
                    if (!match.ok)
                        entry["match_witness"] = {incident[match.witness_i],
                                                  incident[match.witness_j]};
                    if (!match.ok) {
                        report["stages"]["clutching"] = jc;
                        report["result"] = "failure";
                        report["failure"] =
                            "clutching ratios disagree across churro " + c.id;
                        out.exit_code = 3;
                        return out;
                    }
                } else {
                    entry["match"] = "vacuous";
                }
                // core-vertex alignment note: are all ratios rational-looking
                bool aligned = true;
                for (std::size_t i = 0; i + 1 < data.arity(); ++i) {
                    double r = data.ratio(i, i + 1);
                    double nearest = std::round(r * 840.0) / 840.0;
                    aligned = aligned && std::abs(r - nearest) < 1e-9;
                }
                entry["core_vertices_aligned"] = aligned;
                jc.push_back(entry);
            }
            report["stages"]["clutching"] = jc;
        }

        // ---- balance ----------------------------------------------------------
        if (stages.count(Stage::balance)) {
            auto balance = cycle_balance(spec.graph);
            json jb;
            jb["balanced"] = balance.balanced;
            json cycles = json::array();
            for (const auto& c : balance.cycles) {
                json jc2;
                json edge_names = json::array();
                for (int id : c.edge_ids) edge_names.push_back(spec.edges[id].id);
                jc2["edges"] = edge_names;
                jc2["products"] = {c.lhs, c.rhs};
                jc2["balanced"] = (c.lhs == c.rhs);
                cycles.push_back(jc2);
            }
            jb["cycles"] = cycles;
            report["stages"]["balance"] = jb;
        }

        // ---- grouping ----------------------------------------------------------
        if (stages.count(Stage::group)) {
            auto grouping = augment_graph(spec.graph);
            json jg;
            jg["success"] = grouping.success;
            if (grouping.success) {
                json cert;
                json tree = json::array();
                for (int id : grouping.certificate.tree_edges)
                    tree.push_back(spec.edges[id].id);
                cert["spanning_tree"] = tree;
                json augs = json::array();
                for (const auto& a : grouping.certificate.augmentations) {
                    std::string vid;
                    for (const auto& [name, idx] : spec.vertex_index)
                        if (idx == a.vertex) vid = name;
                    augs.push_back({{"vertex", vid},
                                    {"flap_order", a.flap_order},
                                    {"reflector_bank", a.reflector_bank}});
                }
                cert["augmentations"] = augs;
                json chords = json::array();
                for (const auto& chord : grouping.certificate.chords) {
                    chords.push_back({{"edge", spec.edges[chord.edge_id].id},
                                      {"waffle_side", chord.waffle_lp.to_string()},
                                      {"churro_side", chord.churro_lp.to_string()},
                                      {"tau", chord.tau_flag},
                                      {"matched", chord.matched}});
                }
                cert["chords"] = chords;
                cert["flatness"] = grouping.certificate.flatness_witness;
                // sheet numbers on the balanced graph
                auto sheets = solve_sheets(spec.graph);
                if (sheets.ok) {
                    json js = json::object();
                    for (const auto& [name, idx] : spec.vertex_index)
                        js[name] = sheets.sheets.by_vertex[idx];
                    cert["sheet_numbers"] = js;
                }
                jg["certificate"] = cert;
                report["result"] = "certificate";
                out.exit_code = 0;
            } else {
                json obstruction = json::array();
                for (const auto& w : grouping.obstruction) {
                    json jw;
                    json edge_names = json::array();
                    for (int id : w.edge_ids) edge_names.push_back(spec.edges[id].id);
                    jw["cycle"] = edge_names;
                    jw["products"] = {w.lhs, w.rhs};
                    obstruction.push_back(jw);
                }
                jg["obstruction"] = obstruction;
                report["result"] = "obstruction";
                out.exit_code = 2;
            }
            report["stages"]["group"] = jg;
        }

        if (!report.contains("result")) {
            report["result"] = "ok";
            out.exit_code = 0;
        }
    } catch (const error& e) {
        report["result"] = "failure";
        report["failure"] = e.what();
        out.exit_code = (e.code() == errc::window_too_small || e.code() == errc::schema_error ||
                         e.code() == errc::non_hyperbolic_curve)
                             ? 3
                             : 1;
    }
    return out;
}

} // namespace waffle
