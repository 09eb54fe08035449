#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hfl/graph.hpp"
#include "hfl/harmonic.hpp"
#include "hfl/json_io.hpp"
#include "hfl/labelling.hpp"
#include "hfl/report.hpp"
#include "hfl/spectral.hpp"
#include "hfl/suite.hpp"

namespace py = pybind11;

namespace {

// python-facing wrapper: group elements travel as token strings ("g0 g1^-1")
struct PyGroup {
    hfl::GroupContext ctx;

    std::string multiply(const std::string& g, const std::string& h) const {
        return ctx.format(ctx.multiply(ctx.parse(g), ctx.parse(h)));
    }
    std::string inverse(const std::string& g) const { return ctx.format(ctx.inverse(ctx.parse(g))); }
    int word_length(const std::string& g) const { return ctx.word_length(ctx.parse(g)); }
    int conjugacy_length(const std::string& g) const { return ctx.conjugacy_length(ctx.parse(g)); }
    std::vector<std::string> ball(int radius) const {
        std::vector<std::string> out;
        for (const auto& g : ctx.ball(radius)) out.push_back(ctx.format(g));
        return out;
    }
    std::map<std::string, double> walk(int steps) const {
        std::map<std::string, double> out;
        for (const auto& [g, mass] : ctx.walk_convolution(steps).mass) out[ctx.format(g)] = mass;
        return out;
    }
};

struct PyAction {
    hfl::AffineAction action;

    Eigen::VectorXd apply(const PyGroup& group, const std::string& g, const Eigen::VectorXd& v) const {
        return action.apply(group.ctx, group.ctx.parse(g), v);
    }
    Eigen::MatrixXd linear_part(const PyGroup& group, const std::string& g) const {
        return action.linear_part(group.ctx, group.ctx.parse(g));
    }
};

PyAction make_action(const PyGroup& group, int dim,
                     const std::map<std::string, std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& generators, double C,
                     double sigma) {
    std::vector<std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>> maps(
        static_cast<std::size_t>(group.ctx.token_count()));
    for (const auto& [name, ab] : generators) {
        auto token = group.ctx.gens().token_by_name(name);
        if (!token) throw std::invalid_argument("unknown generator token '" + name + "'");
        maps[static_cast<std::size_t>(*token)] = ab;
    }
    PyAction out{hfl::AffineAction::from_generator_maps(group.ctx.gens(), dim, std::move(maps), C, sigma)};
    out.action.validate_homomorphism(group.ctx);
    return out;
}

py::dict flow_to_dict(const hfl::FlowResult& result, const hfl::GroupContext& ctx) {
    py::dict verdict;
    verdict["kind"] = hfl::to_string(result.verdict.kind);
    verdict["lambda"] = result.verdict.lambda;
    verdict["i0"] = result.verdict.i0;
    verdict["ball_radius"] = result.verdict.ball_radius;
    verdict["equality_seen"] = result.verdict.equality_seen;
    verdict["delta_constant_on_ball"] = result.verdict.delta_constant_on_ball;
    py::dict out;
    out["verdict"] = verdict;
    out["final_base"] = result.trace.iterates.back();
    out["laplacian_norm_e"] = result.trace.laplacian_norm_at_e;
    out["laplacian_norm_ball_max"] = result.trace.laplacian_norm_ball_max;
    out["step_ratio"] = result.trace.step_ratio;
    (void)ctx;
    return out;
}

}  // namespace

PYBIND11_MODULE(_hfl, m) {
    m.doc() = "discrete harmonic maps, expander graphs and spectral fixed-point criteria";

    py::class_<PyGroup>(m, "Group")
        .def_static("free", [](int rank) { return PyGroup{hfl::GroupContext::free_group(rank)}; }, py::arg("m"))
        .def_static(
            "finite",
            [](std::vector<std::vector<int>> table, std::vector<int> generators) {
                return PyGroup{hfl::GroupContext::finite_group(std::move(table), std::move(generators))};
            },
            py::arg("table"), py::arg("generators"))
        .def_static("from_json", [](const std::string& text) { return PyGroup{hfl::group_from_json(hfl::json::parse(text))}; })
        .def_property_readonly("token_count", [](const PyGroup& g) { return g.ctx.token_count(); })
        .def_property_readonly("is_free", [](const PyGroup& g) { return g.ctx.is_free(); })
        .def("multiply", &PyGroup::multiply)
        .def("inverse", &PyGroup::inverse)
        .def("word_length", &PyGroup::word_length)
        .def("conjugacy_length", &PyGroup::conjugacy_length)
        .def("ball", &PyGroup::ball, py::arg("radius"))
        .def("walk", &PyGroup::walk, py::arg("steps"));

    py::class_<PyAction>(m, "Action")
        .def(py::init(&make_action), py::arg("group"), py::arg("dim"), py::arg("generators"), py::arg("C") = 1.0,
             py::arg("sigma") = 0.0)
        .def_static(
            "from_json",
            [](const PyGroup& group, const std::string& text) {
                return PyAction{hfl::action_from_json(hfl::json::parse(text), group.ctx)};
            },
            py::arg("group"), py::arg("json_text"))
        .def_property_readonly("dim", [](const PyAction& a) { return a.action.dim(); })
        .def_property_readonly("is_isometric", [](const PyAction& a) { return a.action.is_isometric(); })
        .def("apply", &PyAction::apply, py::arg("group"), py::arg("g"), py::arg("v"))
        .def("linear_part", &PyAction::linear_part, py::arg("group"), py::arg("g"));

    m.def("operator_norm", &hfl::operator_norm, py::arg("matrix"));
    m.def(
        "renorm_estimate",
        [](const PyAction& a, const PyGroup& g, const Eigen::VectorXd& v, int radius) {
            return hfl::renorm_estimate(a.action, g.ctx, v, radius);
        },
        py::arg("action"), py::arg("group"), py::arg("v"), py::arg("radius"));
    m.def(
        "verify_growth",
        [](const PyAction& a, const PyGroup& g, int radius, const std::string& bound) {
            hfl::GrowthBound kind = bound == "word" ? hfl::GrowthBound::WordLength : hfl::GrowthBound::Conjugacy;
            hfl::GrowthReport rep = hfl::verify_growth(a.action, g.ctx, radius, kind);
            py::dict out;
            out["pass"] = rep.pass;
            out["worst_ratio"] = rep.worst_ratio;
            out["witness"] = g.ctx.format(rep.witness);
            return out;
        },
        py::arg("action"), py::arg("group"), py::arg("radius"), py::arg("bound") = "conjugacy");

    m.def(
        "local_energy",
        [](const PyAction& a, const PyGroup& g, const Eigen::VectorXd& base, const std::string& x) {
            return hfl::local_energy(hfl::EquivariantMap(a.action, base), g.ctx, g.ctx.parse(x));
        },
        py::arg("action"), py::arg("group"), py::arg("base"), py::arg("x") = "e");
    m.def(
        "n_step_energy",
        [](const PyAction& a, const PyGroup& g, const Eigen::VectorXd& base, int n, const std::string& x) {
            return hfl::n_step_energy(hfl::EquivariantMap(a.action, base), g.ctx, g.ctx.parse(x), n);
        },
        py::arg("action"), py::arg("group"), py::arg("base"), py::arg("n"), py::arg("x") = "e");
    m.def(
        "laplacian",
        [](const PyAction& a, const PyGroup& g, const Eigen::VectorXd& base, const std::string& x) {
            return hfl::laplacian(hfl::EquivariantMap(a.action, base), g.ctx, g.ctx.parse(x));
        },
        py::arg("action"), py::arg("group"), py::arg("base"), py::arg("x") = "e");
    m.def(
        "flow",
        [](const PyAction& a, const PyGroup& g, const Eigen::VectorXd& base, int radius, int cap, double tol) {
            hfl::FlowOptions opt;
            opt.ball_radius = radius;
            opt.max_iterations = cap;
            opt.harmonic_tol = tol;
            return flow_to_dict(hfl::run_flow(hfl::EquivariantMap(a.action, base), g.ctx, opt), g.ctx);
        },
        py::arg("action"), py::arg("group"), py::arg("base"), py::arg("radius") = 4, py::arg("cap") = 10000,
        py::arg("tol") = 1e-8);
    m.def(
        "solve_harmonic",
        [](const PyAction& a) -> py::object {
            hfl::HarmonicSolution sol = hfl::solve_harmonic(a.action);
            py::dict out;
            out["residual"] = sol.residual;
            if (sol.kind == hfl::HarmonicSolution::Kind::NoSolution) {
                out["kind"] = "no_solution";
            } else {
                out["kind"] = sol.kind == hfl::HarmonicSolution::Kind::Unique ? "unique" : "affine_family";
                out["vector"] = sol.particular;
                out["kernel"] = sol.kernel;
            }
            return out;
        },
        py::arg("action"));
    m.def(
        "find_fixed_point",
        [](const PyAction& a) -> py::object {
            auto v = hfl::find_fixed_point(a.action);
            if (!v) return py::none();
            return py::cast(*v);
        },
        py::arg("action"));
    m.def(
        "min_energy_vector",
        [](const PyAction& a, const PyGroup& g, const std::string& x) {
            return hfl::min_energy_vector(a.action, g.ctx, g.ctx.parse(x));
        },
        py::arg("action"), py::arg("group"), py::arg("x") = "e");
    m.def(
        "displacement", [](const PyAction& a, const Eigen::VectorXd& v) { return hfl::displacement(a.action, v); },
        py::arg("action"), py::arg("v"));
    m.def(
        "near_critical_search",
        [](const PyAction& a, const Eigen::VectorXd& start, double j, int cap, int samples, std::uint64_t seed) {
            hfl::NearCriticalOptions opt;
            opt.max_moves = cap;
            opt.samples = samples;
            opt.seed = seed;
            return hfl::near_critical_search(a.action, start, j, opt);
        },
        py::arg("action"), py::arg("start"), py::arg("j") = 2.0, py::arg("cap") = 64, py::arg("samples") = 64,
        py::arg("seed") = 0);

    py::class_<hfl::Graph>(m, "Graph")
        .def_static("random_regular", &hfl::random_regular, py::arg("vertices"), py::arg("degree"), py::arg("seed"),
                    py::arg("max_attempts") = 2000)
        .def_static("projective_plane", &hfl::projective_plane_incidence, py::arg("q"))
        .def(py::init<int, std::vector<std::pair<int, int>>>(), py::arg("vertices"), py::arg("edges"))
        .def_property_readonly("vertex_count", &hfl::Graph::vertex_count)
        .def_property_readonly("edge_count", &hfl::Graph::edge_count)
        .def_property_readonly("edges", &hfl::Graph::edges)
        .def("degree", &hfl::Graph::degree)
        .def("connected", &hfl::Graph::connected)
        .def("stats",
             [](const hfl::Graph& g) {
                 hfl::ExpanderStats s = hfl::graph_stats(g);
                 py::dict out;
                 out["lambda1"] = s.lambda1;
                 out["girth"] = s.girth;
                 out["diameter"] = s.diameter;
                 return out;
             })
        .def("walk", &hfl::graph_walk, py::arg("source"), py::arg("steps"))
        .def("energy", &hfl::graph_energy, py::arg("phi"), py::arg("steps"))
        .def("energy_inequality", [](const hfl::Graph& g, const std::vector<Eigen::VectorXd>& phi, int steps) {
            hfl::EnergyInequalityReport rep = hfl::check_energy_inequality(g, phi, steps);
            py::dict out;
            out["lhs"] = rep.lhs;
            out["rhs"] = rep.rhs;
            out["lambda1"] = rep.lambda1;
            out["pass"] = rep.pass;
            return out;
        });

    m.def(
        "pushforward_walk",
        [](const hfl::Graph& g, int m_rank, std::uint64_t seed, const std::string& x, int n) {
            hfl::GroupContext fm = hfl::GroupContext::free_group(m_rank);
            hfl::SLabelling lab = hfl::sample_labelling(g, m_rank, seed);
            hfl::WalkMeasure mu = hfl::pushforward_walk(g, lab, fm, fm.parse(x), n, hfl::graph_stats(g).girth);
            std::map<std::string, double> out;
            for (const auto& [w, mass] : mu.mass) out[fm.format(w)] = mass;
            return out;
        },
        py::arg("graph"), py::arg("m"), py::arg("seed"), py::arg("x") = "e", py::arg("n") = 1);
    m.def(
        "fit_mixture",
        [](const hfl::Graph& g, int m_rank, int n, int samples, std::uint64_t seed, int jobs) {
            hfl::MixtureFit fit = hfl::fit_mixture(g, m_rank, n, samples, seed, jobs);
            py::dict out;
            out["weights"] = fit.weights;
            out["residual_tv"] = fit.residual_tv;
            out["tail_mass"] = fit.tail_mass;
            return out;
        },
        py::arg("graph"), py::arg("m"), py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("jobs") = 1);
    m.def(
        "concentration_experiment",
        [](const hfl::Graph& g, int m_rank, int n, int samples, std::uint64_t seed, int jobs) {
            hfl::ConcentrationReport rep = hfl::concentration_experiment(g, m_rank, n, samples, seed, jobs);
            py::dict out;
            out["fraction_both_hold"] = rep.fraction_both_hold;
            out["worst_upper_ratio"] = rep.worst_upper_ratio;
            out["worst_lower_ratio"] = rep.worst_lower_ratio;
            return out;
        },
        py::arg("graph"), py::arg("m"), py::arg("n"), py::arg("samples"), py::arg("seed"), py::arg("jobs") = 1);
    m.def(
        "extract_relators",
        [](const hfl::Graph& g, int m_rank, std::uint64_t seed, int root) {
            hfl::GroupContext fm = hfl::GroupContext::free_group(m_rank);
            hfl::SLabelling lab = hfl::sample_labelling(g, m_rank, seed);
            std::vector<std::string> out;
            for (const auto& r : hfl::extract_relators(g, lab, fm, root)) out.push_back(fm.format(r));
            return out;
        },
        py::arg("graph"), py::arg("m"), py::arg("seed"), py::arg("root") = 0);

    m.def(
        "link_kappa2",
        [](const PyGroup& group, const std::vector<std::string>& relators) {
            hfl::GroupContext ctx = group.ctx;
            std::vector<hfl::Element> rel;
            for (const auto& r : relators) rel.push_back(ctx.parse(r));
            hfl::LinkGraph link = hfl::build_link(ctx, rel);
            py::dict out;
            out["connected"] = link.connected();
            out["edge_count"] = link.edge_count();
            if (link.connected()) {
                hfl::PoincareReport rep = hfl::poincare_k2(link);
                out["lambda1"] = rep.lambda1;
                out["kappa2"] = rep.kappa2;
            }
            return out;
        },
        py::arg("group"), py::arg("relators") = std::vector<std::string>{});
    m.def(
        "nowak_certified",
        [](double kappa2, double C) {
            hfl::PoincareReport rep;
            rep.kappa2 = kappa2;
            rep.lambda1 = 1.0 / (kappa2 * kappa2);
            return hfl::nowak_criterion(rep, C).certified;
        },
        py::arg("kappa2"), py::arg("C"));

    m.def(
        "run_suite",
        [](std::uint64_t seed, int jobs) {
            hfl::SuiteReport report = hfl::run_acceptance_battery(seed, jobs);
            py::list rows;
            for (const auto& r : report.results) {
                py::dict row;
                row["id"] = r.id;
                row["name"] = r.name;
                row["pass"] = r.pass;
                row["seconds"] = r.seconds;
                row["detail"] = r.detail;
                rows.append(row);
            }
            py::dict out;
            out["all_pass"] = report.all_pass;
            out["criteria"] = rows;
            return out;
        },
        py::arg("seed") = 0, py::arg("jobs") = 1);
}
