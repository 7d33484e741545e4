// Command-line front end: pipeline stages, certification, oracles, figures.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "waffle/pipeline.hpp"

using namespace waffle;

namespace {

struct CommonOpts {
    std::string input;
    std::string output;
    std::string figures;
    std::string config;
    long long seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-i,--input", opts.input, "pipeline input JSON")->required();
    cmd->add_option("-o,--output", opts.output, "report destination (default: stdout)");
    cmd->add_option("--figures", opts.figures, "directory for SVG figures");
    cmd->add_option("--config", opts.config, "tolerance override JSON");
    cmd->add_option("--seed", opts.seed, "seed echoed into the report for sampled checks");
}

void apply_config(InputSpec& spec, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    require(bool(in), errc::io_error, "cannot read " + path);
    json j = json::parse(in);
    json wrapped;
    wrapped["churros"] = json::array();
    wrapped["edges"] = json::array();
    wrapped["tolerances"] = j.contains("tolerances") ? j.at("tolerances") : j;
    InputSpec dummy = parse_input(wrapped);
    spec.tolerances = dummy.tolerances;
}

int emit(const PipelineResult& result, const CommonOpts& opts) {
    std::string text = result.report.dump(2) + "\n";
    if (opts.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opts.output);
        if (!out) {
            std::cerr << "cannot write " << opts.output << "\n";
            return 1;
        }
        out << text;
    }
    return result.exit_code;
}

int run_stage(const CommonOpts& opts, Stage stage, bool emit_models) {
    try {
        InputSpec spec = parse(opts.input);
        apply_config(spec, opts.config);
        PipelineResult result = run_pipeline(spec, {stage}, opts.figures, emit_models);
        result.report["config"]["seed"] = opts.seed;
        return emit(result, opts);
    } catch (const error& e) {
        std::cerr << e.what() << "\n";
        errc c = e.code();
        return (c == errc::schema_error || c == errc::bipartite_violation ||
                c == errc::orientation_violation || c == errc::io_error)
                   ? 3
                   : 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

int run_oracle(const std::string& mode, const CommonOpts& opts) {
    try {
        std::ifstream in(opts.input);
        require(bool(in), errc::io_error, "cannot read " + opts.input);
        json j = json::parse(in);
        json out;
        if (mode == "quadrature") {
            std::vector<HPoint> samples;
            if (j.contains("path")) {
                for (const auto& p : j.at("path"))
                    samples.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            } else if (j.contains("geodesic")) {
                const auto& g = j.at("geodesic");
                HPoint from{g.at("from").at(0).get<double>(), g.at("from").at(1).get<double>()};
                HPoint to{g.at("to").at(0).get<double>(), g.at("to").at(1).get<double>()};
                int n = g.contains("samples") ? g.at("samples").get<int>() : 1024;
                samples = sample_geodesic(from, to, n);
                out["closed_form"] = distance(from, to);
            } else {
                fail(errc::schema_error, "oracle quadrature needs \"path\" or \"geodesic\"");
            }
            out["length"] = path_length(samples);
        } else if (mode == "clique" || mode == "automorphisms") {
            InputSpec spec = parse(opts.input);
            apply_config(spec, opts.config);
            json per_surface = json::array();
            for (const auto& s : spec.surfaces) {
                if (s.curves.empty()) continue;
                auto surface = standard_generators(s.genus);
                std::vector<CurveSpec> curves;
                for (const auto& c : s.curves) curves.push_back(c.curve);
                auto pattern = generate_pattern(surface, curves, spec.window, spec.tolerances);
                auto cc = arrangement(pattern, spec.window, spec.tolerances);
                auto ws = wall_system(cc, spec.tolerances);
                json entry = {{"id", s.id}};
                if (mode == "clique") {
                    entry["max_crossing_clique"] = max_crossing_clique(ws);
                } else {
                    auto model = cubulate(ws, spec.tolerances);
                    entry["automorphisms"] = automorphisms(model, {}, spec.tolerances).size();
                    if (auto sq = some_square(model)) {
                        SearchConstraints cons;
                        for (int v : *sq) cons.vertex_pins.push_back({v, v});
                        entry["square_pointwise_stabilizer"] =
                            automorphisms(model, cons, spec.tolerances).size();
                    }
                }
                per_surface.push_back(entry);
            }
            out["surfaces"] = per_surface;
        } else {
            fail(errc::schema_error, "unknown oracle mode " + mode);
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    } catch (const error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == errc::schema_error || e.code() == errc::io_error ? 3 : 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"line-pattern cubulation and grouping certificates"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        Stage stage;
        bool models;
    };
    const std::vector<Sub> subs = {
        {"check-filling", "certify that every curve system fills its window", Stage::check_filling,
         false},
        {"cubulate", "build waffles and serialize the cube complex models", Stage::cubulate, true},
        {"clutching", "compute strand translation lengths and clutching ratios", Stage::clutching,
         false},
        {"balance", "evaluate the cycle balance condition", Stage::balance, false},
        {"group", "attempt the flat discrete grouping", Stage::group, false},
        {"certify", "run the full pipeline and emit certificate or obstruction", Stage::certify,
         false},
    };
    std::vector<CommonOpts> opts(subs.size());
    std::vector<CLI::App*> cmds;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
        add_common(cmd, opts[i]);
        cmds.push_back(cmd);
    }

    CommonOpts oracle_opts;
    std::string oracle_mode;
    CLI::App* oracle = app.add_subcommand("oracle", "independent oracles for test provenance");
    oracle->add_option("mode", oracle_mode, "quadrature | clique | automorphisms")->required();
    add_common(oracle, oracle_opts);

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i)
        if (cmds[i]->parsed()) return run_stage(opts[i], subs[i].stage, subs[i].models);
    if (oracle->parsed()) return run_oracle(oracle_mode, oracle_opts);
    return 1;
}
