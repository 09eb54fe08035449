// hfl — desk-scale laboratory for discrete harmonic maps, affine actions,
// expander graphs and the spectral fixed-point criteria.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "hfl/graph.hpp"
#include "hfl/harmonic.hpp"
#include "hfl/json_io.hpp"
#include "hfl/labelling.hpp"
#include "hfl/report.hpp"
#include "hfl/rng.hpp"
#include "hfl/spectral.hpp"
#include "hfl/suite.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOptions {
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out;
};

hfl::json report_envelope(const hfl::json& config, const hfl::json& results) {
    hfl::json report;
    report["artifact"] = "hfl";
    report["config"] = config;
    report["config_hash"] = hfl::config_hash_hex(config);
    report["results"] = results;
    return report;
}

std::optional<std::string> cache_path_for(const hfl::json& config) {
    const char* dir = std::getenv("HFL_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    return std::string(dir) + "/" + hfl::config_hash_hex(config) + ".json";
}

// Emits the report: cache lookup first, stdout always, --out and cache files
// on success. Returns the emitted report.
hfl::json emit_report(const GlobalOptions& global, const hfl::json& config, const std::function<hfl::json()>& compute) {
    auto cache = cache_path_for(config);
    if (cache && std::filesystem::exists(*cache)) {
        std::string text = hfl::read_text_file(*cache);
        std::cout << text;
        if (!global.out.empty()) hfl::write_text_file(global.out, text);
        return hfl::json::parse(text);
    }
    hfl::json report = report_envelope(config, compute());
    std::string text = hfl::canonical_json(report);
    std::cout << text;
    if (!global.out.empty()) hfl::write_text_file(global.out, text);
    if (cache) {
        std::filesystem::create_directories(std::filesystem::path(*cache).parent_path());
        hfl::write_text_file(*cache, text);
    }
    return report;
}

Eigen::VectorXd parse_vector(const std::string& text, int dim) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    if (text.empty()) return v;
    std::istringstream is(text);
    std::string part;
    int i = 0;
    while (std::getline(is, part, ',')) {
        if (i >= dim) throw std::invalid_argument("base vector has more entries than the action dimension");
        v(i++) = std::stod(part);
    }
    if (i != dim) throw std::invalid_argument("base vector has fewer entries than the action dimension");
    return v;
}

hfl::json vector_to_json(const Eigen::VectorXd& v) {
    hfl::json a = hfl::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

struct ActionInputs {
    std::string group_path;
    std::string action_path;

    hfl::GroupContext load_group() const { return hfl::group_from_json(hfl::load_json_file(group_path)); }
    hfl::AffineAction load_action(const hfl::GroupContext& ctx) const {
        return hfl::action_from_json(hfl::load_json_file(action_path), ctx);
    }
    hfl::json config_fragment() const {
        hfl::json j;
        j["group"] = hfl::load_json_file(group_path);
        j["action"] = hfl::load_json_file(action_path);
        return j;
    }
};

void add_action_inputs(CLI::App* cmd, ActionInputs& inputs) {
    cmd->add_option("--group", inputs.group_path, "group JSON file")->required();
    cmd->add_option("--action", inputs.action_path, "affine action JSON file")->required();
}

hfl::json flow_verdict_json(const hfl::StabilityVerdict& v, const hfl::GroupContext& ctx) {
    hfl::json j;
    j["kind"] = hfl::to_string(v.kind);
    j["lambda"] = v.lambda;
    j["i0"] = v.i0;
    j["ball_radius"] = v.ball_radius;
    j["iteration_cap"] = v.iteration_cap;
    j["equality_seen"] = v.equality_seen;
    j["delta_constant_on_ball"] = v.delta_constant_on_ball;
    if (v.kind == hfl::Stability::Unstable) {
        j["witness_iteration"] = v.witness_iteration;
        j["witness_point"] = ctx.format(v.witness_point);
    }
    return j;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"desk-scale harmonic-map / expander / fixed-point laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--seed", global.seed, "random seed (default 0)");
    app.add_option("--jobs", global.jobs, "worker threads for independent work items");
    app.add_option("--out", global.out, "write the JSON report to this file");

    // ---- flow ----
    auto* flow = app.add_subcommand("flow", "tension-contracting flow and the harmonic solver");
    flow->require_subcommand(1);
    ActionInputs flow_inputs;
    std::string flow_base, flow_csv;
    int flow_radius = 4, flow_cap = 10'000;
    double flow_tol = 1e-8;
    auto* flow_run = flow->add_subcommand("run", "iterate f_{i+1} = H f_i and classify stability");
    add_action_inputs(flow_run, flow_inputs);
    flow_run->add_option("--base", flow_base, "f(e) as comma-separated numbers (default zero)");
    flow_run->add_option("--radius", flow_radius, "ball radius for the stability certificate");
    flow_run->add_option("--cap", flow_cap, "iteration cap");
    flow_run->add_option("--tol", flow_tol, "harmonicity tolerance");
    flow_run->add_option("--csv", flow_csv, "write per-iterate Laplacian norms as CSV");
    flow_run->callback([&]() {
        hfl::json config = flow_inputs.config_fragment();
        config["command"] = "flow run";
        config["version"] = kVersion;
        config["base"] = flow_base;
        config["radius"] = flow_radius;
        config["cap"] = flow_cap;
        config["tol"] = flow_tol;
        emit_report(global, config, [&]() {
            hfl::GroupContext ctx = flow_inputs.load_group();
            hfl::AffineAction action = flow_inputs.load_action(ctx);
            hfl::EquivariantMap f(action, parse_vector(flow_base, action.dim()));
            hfl::FlowOptions opt;
            opt.ball_radius = flow_radius;
            opt.max_iterations = flow_cap;
            opt.harmonic_tol = flow_tol;
            hfl::FlowResult result = hfl::run_flow(f, ctx, opt);
            if (!flow_csv.empty()) {
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < result.trace.laplacian_norm_at_e.size(); ++i)
                    rows.push_back({static_cast<double>(i), result.trace.laplacian_norm_at_e[i],
                                    result.trace.laplacian_norm_ball_max[i]});
                hfl::write_text_file(flow_csv, hfl::to_csv({"i", "laplacian_norm_e", "laplacian_norm_ball_max"}, rows));
            }
            hfl::json results;
            results["verdict"] = flow_verdict_json(result.verdict, ctx);
            results["iterations"] = static_cast<int>(result.trace.iterates.size()) - 1;
            results["final_base"] = vector_to_json(result.trace.iterates.back());
            results["laplacian_norm_e"] = result.trace.laplacian_norm_at_e;
            results["laplacian_norm_ball_max"] = result.trace.laplacian_norm_ball_max;
            results["step_ratio"] = result.trace.step_ratio;
            return results;
        });
    });

    auto* flow_solve = flow->add_subcommand("solve", "solve v = T v for harmonic base vectors");
    ActionInputs solve_inputs;
    add_action_inputs(flow_solve, solve_inputs);
    flow_solve->callback([&]() {
        hfl::json config = solve_inputs.config_fragment();
        config["command"] = "flow solve";
        config["version"] = kVersion;
        emit_report(global, config, [&]() {
            hfl::GroupContext ctx = solve_inputs.load_group();
            hfl::AffineAction action = solve_inputs.load_action(ctx);
            hfl::HarmonicSolution sol = hfl::solve_harmonic(action);
            hfl::json results;
            results["residual"] = sol.residual;
            switch (sol.kind) {
                case hfl::HarmonicSolution::Kind::NoSolution:
                    results["kind"] = "no_solution";
                    break;
                case hfl::HarmonicSolution::Kind::Unique:
                    results["kind"] = "unique";
                    results["vector"] = vector_to_json(sol.particular);
                    break;
                case hfl::HarmonicSolution::Kind::AffineFamily: {
                    results["kind"] = "affine_family";
                    results["vector"] = vector_to_json(sol.particular);
                    hfl::json basis = hfl::json::array();
                    for (int c = 0; c < sol.kernel.cols(); ++c) basis.push_back(vector_to_json(sol.kernel.col(c)));
                    results["kernel_basis"] = basis;
                    break;
                }
            }
            if (sol.kind != hfl::HarmonicSolution::Kind::NoSolution) {
                hfl::EquivariantMap f(action, sol.particular);
                results["laplacian_norm_at_solution"] = hfl::laplacian(f, ctx, ctx.identity()).norm();
            }
            return results;
        });
    });

    // ---- energy ----
    auto* energy = app.add_subcommand("energy", "local and n-step energies of an equivariant map");
    energy->require_subcommand(1);
    ActionInputs energy_inputs;
    std::string energy_base, energy_x = "e", energy_csv;
    int energy_n = 1;
    auto add_energy_common = [&](CLI::App* cmd) {
        add_action_inputs(cmd, energy_inputs);
        cmd->add_option("--base", energy_base, "f(e) as comma-separated numbers (default zero)");
        cmd->add_option("--x", energy_x, "base point (word like \"g0 g1^-1\", or element index)");
    };
    auto* energy_local = energy->add_subcommand("local", "E(f)(x)");
    add_energy_common(energy_local);
    energy_local->callback([&]() {
        hfl::json config = energy_inputs.config_fragment();
        config["command"] = "energy local";
        config["version"] = kVersion;
        config["base"] = energy_base;
        config["x"] = energy_x;
        emit_report(global, config, [&]() {
            hfl::GroupContext ctx = energy_inputs.load_group();
            hfl::AffineAction action = energy_inputs.load_action(ctx);
            hfl::EquivariantMap f(action, parse_vector(energy_base, action.dim()));
            hfl::json results;
            results["energy"] = hfl::local_energy(f, ctx, ctx.parse(energy_x));
            return results;
        });
    });
    auto* energy_nstep = energy->add_subcommand("nstep", "E^(n)(f)(x) for n = 0..N");
    add_energy_common(energy_nstep);
    energy_nstep->add_option("--n", energy_n, "largest n")->required();
    energy_nstep->add_option("--csv", energy_csv, "write (n, E^(n), E^(n)/E) rows as CSV");
    energy_nstep->callback([&]() {
        hfl::json config = energy_inputs.config_fragment();
        config["command"] = "energy nstep";
        config["version"] = kVersion;
        config["base"] = energy_base;
        config["x"] = energy_x;
        config["n"] = energy_n;
        emit_report(global, config, [&]() {
            hfl::GroupContext ctx = energy_inputs.load_group();
            hfl::AffineAction action = energy_inputs.load_action(ctx);
            hfl::EquivariantMap f(action, parse_vector(energy_base, action.dim()));
            hfl::Element x = ctx.parse(energy_x);
            double base_energy = hfl::local_energy(f, ctx, x);
            std::vector<double> energies;
            for (int n = 0; n <= energy_n; ++n) energies.push_back(hfl::n_step_energy(f, ctx, x, n));
            if (!energy_csv.empty()) {
                std::vector<std::vector<double>> rows;
                for (int n = 0; n <= energy_n; ++n)
                    rows.push_back({static_cast<double>(n), energies[static_cast<std::size_t>(n)],
                                    base_energy > 0.0 ? energies[static_cast<std::size_t>(n)] / base_energy : 0.0});
                hfl::write_text_file(energy_csv, hfl::to_csv({"n", "energy_n", "energy_ratio"}, rows));
            }
            hfl::json results;
            results["local_energy"] = base_energy;
            results["n_step_energy"] = energies;
            return results;
        });
    });

    // ---- fixedpoint ----
    auto* fixedpoint = app.add_subcommand("fixedpoint", "solve rho(s) v = v over all generators");
    ActionInputs fp_inputs;
    add_action_inputs(fixedpoint, fp_inputs);
    fixedpoint->callback([&]() {
        hfl::json config = fp_inputs.config_fragment();
        config["command"] = "fixedpoint";
        config["version"] = kVersion;
        emit_report(global, config, [&]() {
            hfl::GroupContext ctx = fp_inputs.load_group();
            hfl::AffineAction action = fp_inputs.load_action(ctx);
            auto v = hfl::find_fixed_point(action);
            hfl::json results;
            results["found"] = v.has_value();
            if (v) {
                results["vector"] = vector_to_json(*v);
                results["displacement"] = hfl::displacement(action, *v);
            }
            return results;
        });
    });

    // ---- delta ----
    auto* delta = app.add_subcommand("delta", "displacement function and near-critical search");
    delta->require_subcommand(1);
    ActionInputs delta_inputs;
    std::string delta_start;
    double delta_j = 2.0;
    int delta_cap = 64, delta_samples = 64;
    auto* delta_search = delta->add_subcommand("search", "halve delta within j-balls until near-critical");
    add_action_inputs(delta_search, delta_inputs);
    delta_search->add_option("--start", delta_start, "starting vector, comma-separated (default zero)");
    delta_search->add_option("--j", delta_j, "ball radius multiplier (>= 1)");
    delta_search->add_option("--cap", delta_cap, "move cap");
    delta_search->add_option("--samples", delta_samples, "random proposals per move");
    delta_search->callback([&]() {
        hfl::json config = delta_inputs.config_fragment();
        config["command"] = "delta search";
        config["version"] = kVersion;
        config["start"] = delta_start;
        config["j"] = delta_j;
        config["cap"] = delta_cap;
        config["samples"] = delta_samples;
        config["seed"] = global.seed;
        emit_report(global, config, [&]() {
            hfl::GroupContext ctx = delta_inputs.load_group();
            hfl::AffineAction action = delta_inputs.load_action(ctx);
            Eigen::VectorXd start = parse_vector(delta_start, action.dim());
            hfl::NearCriticalOptions opt;
            opt.max_moves = delta_cap;
            opt.samples = delta_samples;
            opt.seed = global.seed;
            Eigen::VectorXd v = hfl::near_critical_search(action, start, delta_j, opt);
            hfl::json results;
            results["start_delta"] = hfl::displacement(action, start);
            results["terminal"] = vector_to_json(v);
            results["terminal_delta"] = hfl::displacement(action, v);
            return results;
        });
    });

    // ---- graph ----
    auto* graph_cmd = app.add_subcommand("graph", "expander statistics and graph energies");
    graph_cmd->require_subcommand(1);
    std::string graph_path, graph_out;
    int graph_vertices = 50, graph_degree = 4, graph_n = 2, graph_maps = 10;
    auto* graph_gen = graph_cmd->add_subcommand("gen", "random regular graph (pairing model)");
    graph_gen->add_option("--vertices", graph_vertices, "vertex count")->required();
    graph_gen->add_option("--degree", graph_degree, "degree")->required();
    graph_gen->add_option("--edges-out", graph_out, "write the edge list here")->required();
    graph_gen->callback([&]() {
        hfl::json config;
        config["command"] = "graph gen";
        config["version"] = kVersion;
        config["vertices"] = graph_vertices;
        config["degree"] = graph_degree;
        config["seed"] = global.seed;
        emit_report(global, config, [&]() {
            hfl::Graph g = hfl::random_regular(graph_vertices, graph_degree, global.seed);
            hfl::write_text_file(graph_out, hfl::graph_to_edge_list(g));
            hfl::ExpanderStats stats = hfl::graph_stats(g);
            hfl::json results;
            results["vertices"] = g.vertex_count();
            results["edges"] = g.edge_count();
            results["lambda1"] = stats.lambda1;
            results["girth"] = stats.girth;
            results["diameter"] = stats.diameter;
            return results;
        });
    });
    auto* graph_stats_cmd = graph_cmd->add_subcommand("stats", "lambda1, girth and diameter");
    graph_stats_cmd->add_option("--graph", graph_path, "edge list file")->required();
    graph_stats_cmd->callback([&]() {
        hfl::json config;
        config["command"] = "graph stats";
        config["version"] = kVersion;
        config["edges"] = hfl::read_text_file(graph_path);
        emit_report(global, config, [&]() {
            hfl::Graph g = hfl::graph_from_edge_list(config["edges"].get<std::string>());
            hfl::ExpanderStats stats = hfl::graph_stats(g);
            hfl::json results;
            results["vertices"] = g.vertex_count();
            results["edges"] = g.edge_count();
            results["lambda1"] = stats.lambda1;
            results["girth"] = stats.girth;
            results["diameter"] = stats.diameter;
            return results;
        });
    });
    auto* graph_ineq = graph_cmd->add_subcommand("energy-ineq", "n-step energy inequality on random maps");
    graph_ineq->add_option("--graph", graph_path, "edge list file")->required();
    graph_ineq->add_option("--n", graph_n, "walk steps");
    graph_ineq->add_option("--maps", graph_maps, "number of random maps");
    graph_ineq->callback([&]() {
        hfl::json config;
        config["command"] = "graph energy-ineq";
        config["version"] = kVersion;
        config["edges"] = hfl::read_text_file(graph_path);
        config["n"] = graph_n;
        config["maps"] = graph_maps;
        config["seed"] = global.seed;
        emit_report(global, config, [&]() {
            hfl::Graph g = hfl::graph_from_edge_list(config["edges"].get<std::string>());
            hfl::Rng rng(global.seed);
            bool all_pass = true;
            double min_margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < graph_maps; ++i) {
                std::vector<Eigen::VectorXd> phi;
                for (int u = 0; u < g.vertex_count(); ++u) {
                    Eigen::VectorXd p(2);
                    p << rng.next_double(-1.0, 1.0), rng.next_double(-1.0, 1.0);
                    phi.push_back(p);
                }
                hfl::EnergyInequalityReport rep = hfl::check_energy_inequality(g, phi, graph_n);
                all_pass = all_pass && rep.pass;
                min_margin = std::min(min_margin, rep.rhs - rep.lhs);
            }
            hfl::json results;
            results["all_pass"] = all_pass;
            results["min_margin"] = min_margin;
            results["lambda1"] = hfl::graph_stats(g).lambda1;
            return results;
        });
    });

    // ---- gmodel ----
    auto* gmodel = app.add_subcommand("gmodel", "graph-model labellings and pushforward walks");
    gmodel->require_subcommand(1);
    std::string gm_graph, gm_x = "e", gm_csv, gm_presentation_out;
    int gm_m = 2, gm_n = 1, gm_samples = 1000, gm_root = 0;
    auto add_gm_common = [&](CLI::App* cmd) {
        cmd->add_option("--graph", gm_graph, "edge list file")->required();
        cmd->add_option("--m", gm_m, "free rank m (labels from 2m tokens)");
    };
    auto* gm_sample = gmodel->add_subcommand("sample", "sample an S-labelling");
    add_gm_common(gm_sample);
    gm_sample->callback([&]() {
        hfl::json config;
        config["command"] = "gmodel sample";
        config["version"] = kVersion;
        config["edges"] = hfl::read_text_file(gm_graph);
        config["m"] = gm_m;
        config["seed"] = global.seed;
        emit_report(global, config, [&]() {
            hfl::Graph g = hfl::graph_from_edge_list(config["edges"].get<std::string>());
            hfl::SLabelling lab = hfl::sample_labelling(g, gm_m, global.seed);
            hfl::GroupContext fm = hfl::GroupContext::free_group(gm_m);
            hfl::json results;
            results["m"] = gm_m;
            results["labelling_count"] = hfl::labelling_count(g, gm_m);
            hfl::json tokens = hfl::json::array();
            for (int e = 0; e < g.edge_count(); ++e)
                tokens.push_back(fm.gens().name(lab.edge_token[static_cast<std::size_t>(e)]));
            results["edge_tokens"] = tokens;
            return results;
        });
    });
    auto* gm_push = gmodel->add_subcommand("pushforward", "mu_{G,alpha}^n as a word measure");
    add_gm_common(gm_push);
    gm_push->add_option("--x", gm_x, "base point word");
    gm_push->add_option("--n", gm_n, "walk steps (must satisfy n < girth/2)");
    gm_push->add_option("--csv", gm_csv, "write the (length, mass) histogram as CSV");
    gm_push->callback([&]() {
        hfl::json config;
        config["command"] = "gmodel pushforward";
        config["version"] = kVersion;
        config["edges"] = hfl::read_text_file(gm_graph);
        config["m"] = gm_m;
        config["n"] = gm_n;
        config["x"] = gm_x;
        config["seed"] = global.seed;
        emit_report(global, config, [&]() {
            hfl::Graph g = hfl::graph_from_edge_list(config["edges"].get<std::string>());
            hfl::GroupContext fm = hfl::GroupContext::free_group(gm_m);
            hfl::SLabelling lab = hfl::sample_labelling(g, gm_m, global.seed);
            hfl::ExpanderStats stats = hfl::graph_stats(g);
            hfl::WalkMeasure mu = hfl::pushforward_walk(g, lab, fm, fm.parse(gm_x), gm_n, stats.girth);
            if (!gm_csv.empty()) {
                hfl::Element base = fm.parse(gm_x);
                std::vector<double> by_length(static_cast<std::size_t>(gm_n) + 1, 0.0);
                for (const auto& [w, mass] : mu.mass) {
                    int len = fm.word_length(fm.multiply(fm.inverse(base), w));
                    by_length[static_cast<std::size_t>(len)] += mass;
                }
                std::vector<std::vector<double>> rows;
                for (int l = 0; l <= gm_n; ++l) rows.push_back({static_cast<double>(l), by_length[static_cast<std::size_t>(l)]});
                hfl::write_text_file(gm_csv, hfl::to_csv({"length", "mass"}, rows));
            }
            hfl::json results;
            results["girth"] = stats.girth;
            results["measure"] = hfl::measure_to_json(fm, mu);
            results["total_mass"] = mu.total_mass();
            return results;
        });
    });
    auto* gm_fit = gmodel->add_subcommand("fit-mixture", "fit the labelling expectation by convolution powers");
    add_gm_common(gm_fit);
    gm_fit->add_option("--n", gm_n, "walk steps");
    gm_fit->add_option("--samples", gm_samples, "Monte-Carlo labelling samples");
    gm_fit->add_option("--csv", gm_csv, "write (l, w_l) rows as CSV");
    gm_fit->callback([&]() {
        hfl::json config;
        config["command"] = "gmodel fit-mixture";
        config["version"] = kVersion;
        config["edges"] = hfl::read_text_file(gm_graph);
        config["m"] = gm_m;
        config["n"] = gm_n;
        config["samples"] = gm_samples;
        config["seed"] = global.seed;
        emit_report(global, config, [&]() {
            hfl::Graph g = hfl::graph_from_edge_list(config["edges"].get<std::string>());
            hfl::MixtureFit fit = hfl::fit_mixture(g, gm_m, gm_n, gm_samples, global.seed, global.jobs);
            if (!gm_csv.empty()) {
                std::vector<std::vector<double>> rows;
                for (std::size_t l = 0; l < fit.weights.size(); ++l)
                    rows.push_back({static_cast<double>(l), fit.weights[l]});
                hfl::write_text_file(gm_csv, hfl::to_csv({"l", "w_l"}, rows));
            }
            hfl::json results;
            results["weights"] = fit.weights;
            results["residual_tv"] = fit.residual_tv;
            results["tail_mass"] = fit.tail_mass;
            return results;
        });
    });
    auto* gm_conc = gmodel->add_subcommand("concentration", "pointwise concentration of the pushforward walks");
    add_gm_common(gm_conc);
    gm_conc->add_option("--n", gm_n, "walk steps");
    gm_conc->add_option("--samples", gm_samples, "Monte-Carlo labelling samples");
    gm_conc->callback([&]() {
        hfl::json config;
        config["command"] = "gmodel concentration";
        config["version"] = kVersion;
        config["edges"] = hfl::read_text_file(gm_graph);
        config["m"] = gm_m;
        config["n"] = gm_n;
        config["samples"] = gm_samples;
        config["seed"] = global.seed;
        emit_report(global, config, [&]() {
            hfl::Graph g = hfl::graph_from_edge_list(config["edges"].get<std::string>());
            hfl::ConcentrationReport rep =
                hfl::concentration_experiment(g, gm_m, gm_n, gm_samples, global.seed, global.jobs);
            hfl::json results;
            results["fraction_both_hold"] = rep.fraction_both_hold;
            results["worst_upper_ratio"] = rep.worst_upper_ratio;
            results["worst_lower_ratio"] = rep.worst_lower_ratio;
            return results;
        });
    });
    auto* gm_rel = gmodel->add_subcommand("relators", "fundamental-cycle relators of a labelled graph");
    add_gm_common(gm_rel);
    gm_rel->add_option("--root", gm_root, "spanning tree root");
    gm_rel->add_option("--presentation-out", gm_presentation_out, "write the presentation JSON here");
    gm_rel->callback([&]() {
        hfl::json config;
        config["command"] = "gmodel relators";
        config["version"] = kVersion;
        config["edges"] = hfl::read_text_file(gm_graph);
        config["m"] = gm_m;
        config["root"] = gm_root;
        config["seed"] = global.seed;
        emit_report(global, config, [&]() {
            hfl::Graph g = hfl::graph_from_edge_list(config["edges"].get<std::string>());
            hfl::GroupContext fm = hfl::GroupContext::free_group(gm_m);
            hfl::SLabelling lab = hfl::sample_labelling(g, gm_m, global.seed);
            std::vector<hfl::Element> relators = hfl::extract_relators(g, lab, fm, gm_root);
            hfl::json presentation = hfl::presentation_to_json(fm, relators);
            if (!gm_presentation_out.empty())
                hfl::write_text_file(gm_presentation_out, hfl::canonical_json(presentation));
            hfl::json results;
            results["relator_count"] = static_cast<int>(relators.size());
            results["presentation"] = presentation;
            return results;
        });
    });

    // ---- criterion ----
    auto* criterion = app.add_subcommand("criterion", "link graph, kappa_2, and the fixed-point criterion");
    criterion->require_subcommand(1);
    std::string cr_group, cr_presentation, cr_weights;
    double cr_C = 1.0;
    auto add_cr_common = [&](CLI::App* cmd) {
        cmd->add_option("--group", cr_group, "group JSON (finite backend adjacency)");
        cmd->add_option("--presentation", cr_presentation, "presentation JSON (free backend adjacency)");
        cmd->add_option("--weights", cr_weights, "optional link edge weights JSON");
    };
    auto build_cr_link = [&](hfl::json& config) {
        hfl::GroupContext ctx = cr_presentation.empty()
                                    ? hfl::group_from_json(config.at("group"))
                                    : hfl::group_from_json(config.at("presentation"));
        std::vector<hfl::Element> relators;
        if (!cr_presentation.empty()) relators = hfl::relators_from_json(config.at("presentation"), ctx);
        std::optional<hfl::LinkWeights> weights;
        if (!cr_weights.empty()) weights = hfl::weights_from_json(config.at("weights"));
        return hfl::build_link(ctx, relators, weights);
    };
    auto fill_cr_config = [&](hfl::json& config) {
        if (cr_group.empty() == cr_presentation.empty())
            throw std::invalid_argument("pass exactly one of --group or --presentation");
        if (!cr_group.empty()) config["group"] = hfl::load_json_file(cr_group);
        if (!cr_presentation.empty()) config["presentation"] = hfl::load_json_file(cr_presentation);
        if (!cr_weights.empty()) config["weights"] = hfl::load_json_file(cr_weights);
        config["uniform_weights"] = cr_weights.empty();
    };
    auto link_json = [](const hfl::LinkGraph& link) {
        hfl::json j;
        j["vertices"] = link.vertex_names;
        j["edge_count"] = link.edge_count();
        j["connected"] = link.connected();
        hfl::json edges = hfl::json::array();
        for (int s = 0; s < link.size(); ++s)
            for (int t = s + 1; t < link.size(); ++t)
                if (link.weight(s, t) > 0.0)
                    edges.push_back({link.vertex_names[static_cast<std::size_t>(s)],
                                     link.vertex_names[static_cast<std::size_t>(t)], link.weight(s, t)});
        j["edges"] = edges;
        return j;
    };
    auto* cr_link_cmd = criterion->add_subcommand("link", "construct the link graph of S");
    add_cr_common(cr_link_cmd);
    cr_link_cmd->callback([&]() {
        hfl::json config;
        config["command"] = "criterion link";
        config["version"] = kVersion;
        fill_cr_config(config);
        emit_report(global, config, [&]() {
            hfl::json results;
            results["link"] = link_json(build_cr_link(config));
            return results;
        });
    });
    auto* cr_k2_cmd = criterion->add_subcommand("k2", "optimal 2-Poincare constant of the link");
    add_cr_common(cr_k2_cmd);
    cr_k2_cmd->callback([&]() {
        hfl::json config;
        config["command"] = "criterion k2";
        config["version"] = kVersion;
        fill_cr_config(config);
        emit_report(global, config, [&]() {
            hfl::LinkGraph link = build_cr_link(config);
            hfl::PoincareReport rep = hfl::poincare_k2(link);
            hfl::json results;
            results["link"] = link_json(link);
            results["lambda1"] = rep.lambda1;
            results["kappa2"] = rep.kappa2;
            results["uniform_weights"] = config["uniform_weights"];
            return results;
        });
    });
    auto* cr_check_cmd = criterion->add_subcommand("check", "C kappa_2 < sqrt(2) fixed-point certificate");
    add_cr_common(cr_check_cmd);
    cr_check_cmd->add_option("--C", cr_C, "uniform Lipschitz bound of the action")->required();
    cr_check_cmd->callback([&]() {
        hfl::json config;
        config["command"] = "criterion check";
        config["version"] = kVersion;
        fill_cr_config(config);
        config["C"] = cr_C;
        emit_report(global, config, [&]() {
            hfl::LinkGraph link = build_cr_link(config);
            hfl::PoincareReport rep = hfl::poincare_k2(link);
            hfl::CriterionVerdict verdict = hfl::nowak_criterion(rep, cr_C);
            hfl::json results;
            results["kappa2"] = rep.kappa2;
            results["product"] = verdict.product;
            results["threshold"] = std::sqrt(2.0);
            results["fixed_point_certified"] = verdict.certified;
            results["isometric_p2_condition"] = verdict.isometric_p2;
            results["uniform_weights"] = config["uniform_weights"];
            return results;
        });
    });

    // ---- suite ----
    int exit_code = 0;
    auto* suite = app.add_subcommand("suite", "run the full acceptance battery");
    suite->callback([&]() {
        hfl::json config;
        config["command"] = "suite";
        config["version"] = kVersion;
        config["seed"] = global.seed;
        hfl::json emitted = emit_report(global, config, [&]() {
            hfl::SuiteReport report = hfl::run_acceptance_battery(global.seed, global.jobs);
            std::cerr << hfl::format_suite_summary(report);
            return hfl::suite_report_json(report);
        });
        if (!emitted.at("results").value("all_pass", false)) exit_code = 1;
    });

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const hfl::CapReached& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
