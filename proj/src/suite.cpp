#include "hfl/suite.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "hfl/graph.hpp"
#include "hfl/harmonic.hpp"
#include "hfl/labelling.hpp"
#include "hfl/parallel.hpp"
#include "hfl/report.hpp"
#include "hfl/rng.hpp"
#include "hfl/spectral.hpp"

namespace hfl {

namespace {

double gaussian(Rng& rng) {
    double u1 = 1.0 - rng.next_double();
    double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
    Eigen::MatrixXd m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = gaussian(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < d; ++c)
        if (r(c, c) < 0.0) q.col(c) = -q.col(c);
    return q;
}

// invertible with modest condition number (singular values in [0.6, 1.8])
Eigen::MatrixXd random_invertible(int d, Rng& rng) {
    Eigen::MatrixXd q1 = random_orthogonal(d, rng);
    Eigen::MatrixXd q2 = random_orthogonal(d, rng);
    Eigen::VectorXd s(d);
    for (int i = 0; i < d; ++i) s(i) = rng.next_double(0.6, 1.8);
    return q1 * s.asDiagonal() * q2.transpose();
}

Eigen::VectorXd random_vector(int d, Rng& rng, double scale = 1.0) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.next_double(-scale, scale);
    return v;
}

AffineAction random_action(const GeneratorSet& gens, int d, Rng& rng, bool orthogonal,
                           const Eigen::VectorXd* fixed_point = nullptr) {
    std::vector<std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>> maps(
        static_cast<std::size_t>(gens.count()));
    for (int t = 0; t < gens.count(); ++t) {
        if (gens.inv(t) < t) continue;  // one representative per pair
        Eigen::MatrixXd a = orthogonal ? random_orthogonal(d, rng) : random_invertible(d, rng);
        Eigen::VectorXd b = fixed_point ? Eigen::VectorXd(*fixed_point - a * *fixed_point) : random_vector(d, rng);
        maps[static_cast<std::size_t>(t)] = std::make_pair(a, b);
    }
    return AffineAction::from_generator_maps(gens, d, std::move(maps));
}

AffineAction z_translation_action() {
    GeneratorSet gens = GeneratorSet::free_symmetric(1);
    std::vector<std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>> maps(2);
    maps[0] = std::make_pair(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1));
    return AffineAction::from_generator_maps(gens, 1, std::move(maps));
}

// non-isometric F2 action on R with no common fixed point: the generator
// fixed points (-1 and 1/2) differ, so the energy minimizer is not harmonic
AffineAction non_isometric_fixture() {
    GeneratorSet gens = GeneratorSet::free_symmetric(2);
    std::vector<std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>> maps(4);
    Eigen::MatrixXd a0(1, 1), a1(1, 1);
    Eigen::VectorXd b0(1), b1(1);
    a0 << 2.0;
    b0 << 1.0;
    a1 << 5.0;
    b1 << -2.0;
    maps[0] = std::make_pair(a0, b0);
    maps[2] = std::make_pair(a1, b1);
    return AffineAction::from_generator_maps(gens, 1, std::move(maps));
}

Eigen::MatrixXd advance_walk(const Eigen::MatrixXd& cur, const Graph& g) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(cur.rows(), cur.cols());
    for (int v = 0; v < g.vertex_count(); ++v) {
        double inv_deg = 1.0 / g.degree(v);
        for (auto [w, e] : g.neighbors(v)) next.col(w) += inv_deg * cur.col(v);
    }
    return next;
}

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- criterion 1: Z-translation oracle --------------------------------

CriterionResult criterion_z_translation() {
    CriterionResult res{1, "Z-translation harmonicity and linear n-step energy growth", false, 0.0, 1.0, "", {}};
    GroupContext ctx = GroupContext::free_group(1);
    EquivariantMap f(z_translation_action(), Eigen::VectorXd::Zero(1));

    double lap = laplacian(f, ctx, ctx.identity()).norm();
    double base_energy = local_energy(f, ctx, ctx.identity());
    double worst_gap = 0.0;
    for (int n = 1; n <= 20; ++n)
        worst_gap = std::max(worst_gap, std::abs(n_step_energy(f, ctx, ctx.identity(), n) - n * base_energy));

    res.pass = lap <= 1e-12 && worst_gap <= 1e-9;
    res.data["laplacian_norm"] = lap;
    res.data["local_energy"] = base_energy;
    res.data["worst_linearity_gap"] = worst_gap;
    std::ostringstream os;
    os << "|Delta f(e)| = " << lap << ", max |E^(n) - n E| = " << worst_gap << " over n <= 20";
    res.detail = os.str();
    return res;
}

// ---- criterion 2: flow monotonicity suite ------------------------------

CriterionResult criterion_monotonicity(std::uint64_t seed, int jobs) {
    CriterionResult res{2, "tension flow monotonicity on 100 random instances", false, 0.0, 60.0, "", {}};
    const int instances = 100;
    std::vector<double> excess(instances, 0.0);
    std::vector<int> failures(instances, 0);

    parallel_for(static_cast<std::size_t>(instances), jobs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, 0x100 + i));
        int m = 2 + static_cast<int>(i % 2);  // F2 / F3
        int d = 2 + static_cast<int>(i % 7);  // up to 8
        GroupContext ctx = GroupContext::free_group(m);
        AffineAction action = random_action(ctx.gens(), d, rng, false);
        EquivariantMap f(action, random_vector(d, rng, 2.0));
        FlowOptions opt;
        opt.ball_radius = 4;
        opt.max_iterations = 20;
        opt.harmonic_tol = 0.0;
        opt.monotonicity_slack = 1e-10;
        try {
            FlowResult flow = run_flow(f, ctx, opt);
            for (double e : flow.trace.monotonicity_excess) excess[i] = std::max(excess[i], e);
        } catch (const std::exception&) {
            failures[i] = 1;
        }
    });

    int violations = 0;
    double worst = -1.0;
    for (int i = 0; i < instances; ++i) {
        violations += failures[static_cast<std::size_t>(i)];
        worst = std::max(worst, excess[static_cast<std::size_t>(i)]);
    }
    res.pass = violations == 0 && worst <= 1e-10;
    res.data["instances"] = instances;
    res.data["violations"] = violations;
    res.data["worst_excess"] = worst;
    std::ostringstream os;
    os << violations << " violations, worst excess " << worst;
    res.detail = os.str();
    return res;
}

// ---- criterion 3: spectral n-step energy inequality ---------------------

CriterionResult criterion_energy_inequality(std::uint64_t seed, int jobs) {
    CriterionResult res{3, "graph n-step energy inequality on random 4-regular graphs", false, 0.0, 120.0, "", {}};
    const int graphs = 100, maps = 10, max_n = 10;
    std::vector<int> failures(graphs, 0);
    std::vector<double> margins(graphs, std::numeric_limits<double>::infinity());

    parallel_for(static_cast<std::size_t>(graphs), jobs, [&](std::size_t gi) {
        Rng rng(derive_seed(seed, 0x200 + gi));
        int v_count = 50 + 2 * static_cast<int>(rng.next_below(76));  // even, in [50, 200]
        Graph g = random_regular(v_count, 4, rng.next_u64());
        double lambda1 = graph_stats(g).lambda1;

        std::vector<std::vector<Eigen::VectorXd>> phis;
        for (int mi = 0; mi < maps; ++mi) {
            std::vector<Eigen::VectorXd> phi(static_cast<std::size_t>(v_count));
            for (int u = 0; u < v_count; ++u) phi[static_cast<std::size_t>(u)] = random_vector(2, rng, 1.0);
            phis.push_back(std::move(phi));
        }
        // squared-distance matrices, shared across n
        std::vector<Eigen::MatrixXd> dist2(maps);
        for (int mi = 0; mi < maps; ++mi) {
            dist2[static_cast<std::size_t>(mi)].resize(v_count, v_count);
            for (int u = 0; u < v_count; ++u)
                for (int v = 0; v < v_count; ++v)
                    dist2[static_cast<std::size_t>(mi)](u, v) =
                        (phis[static_cast<std::size_t>(mi)][static_cast<std::size_t>(u)] -
                         phis[static_cast<std::size_t>(mi)][static_cast<std::size_t>(v)])
                            .squaredNorm();
        }
        auto energy = [&](const Eigen::MatrixXd& walk, int mi) {
            double sum = 0.0;
            for (int u = 0; u < v_count; ++u)
                sum += g.stationary(u) * walk.row(u).dot(dist2[static_cast<std::size_t>(mi)].row(u));
            return 0.5 * sum;
        };

        Eigen::MatrixXd walk = advance_walk(Eigen::MatrixXd::Identity(v_count, v_count), g);
        std::vector<double> one_step(maps);
        for (int mi = 0; mi < maps; ++mi) {
            one_step[static_cast<std::size_t>(mi)] = energy(walk, mi);
            double rhs = (2.0 / lambda1) * one_step[static_cast<std::size_t>(mi)];
            margins[gi] = std::min(margins[gi], rhs - one_step[static_cast<std::size_t>(mi)]);
            if (one_step[static_cast<std::size_t>(mi)] > rhs + 1e-10 * std::max(1.0, rhs)) failures[gi] += 1;
        }
        for (int n = 2; n <= max_n; ++n) {
            walk = advance_walk(walk, g);
            for (int mi = 0; mi < maps; ++mi) {
                double lhs = energy(walk, mi);
                double rhs = (2.0 / lambda1) * one_step[static_cast<std::size_t>(mi)];
                margins[gi] = std::min(margins[gi], rhs - lhs);
                if (lhs > rhs + 1e-10 * std::max(1.0, rhs)) failures[gi] += 1;
            }
        }
    });

    int total_failures = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < graphs; ++i) {
        total_failures += failures[static_cast<std::size_t>(i)];
        min_margin = std::min(min_margin, margins[static_cast<std::size_t>(i)]);
    }
    res.pass = total_failures == 0;
    res.data["graphs"] = graphs;
    res.data["checks_per_graph"] = maps * (max_n - 1);
    res.data["failures"] = total_failures;
    res.data["min_margin"] = min_margin;
    std::ostringstream os;
    os << total_failures << " failures, smallest slack " << min_margin;
    res.detail = os.str();
    return res;
}

// ---- criterion 4: isometric minimizer-harmonicity ------------------------

CriterionResult criterion_minimizer(std::uint64_t seed, int jobs) {
    CriterionResult res{4, "energy minimizers are harmonic exactly for isometric actions", false, 0.0, 10.0, "", {}};
    const int instances = 50;
    std::vector<double> residuals(instances, 0.0);

    parallel_for(static_cast<std::size_t>(instances), jobs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, 0x300 + i));
        int d = 2 + static_cast<int>(i % 5);  // up to 6
        GroupContext ctx = GroupContext::free_group(2);
        AffineAction action = random_action(ctx.gens(), d, rng, true);
        Eigen::VectorXd v = min_energy_vector(action, ctx, ctx.identity());
        residuals[i] = laplacian(EquivariantMap(action, v), ctx, ctx.identity()).norm();
    });

    double worst = 0.0;
    for (double r : residuals) worst = std::max(worst, r);

    GroupContext f2 = GroupContext::free_group(2);
    AffineAction bad = non_isometric_fixture();
    Eigen::VectorXd v = min_energy_vector(bad, f2, f2.identity());
    double bad_residual = laplacian(EquivariantMap(bad, v), f2, f2.identity()).norm();

    res.pass = worst <= 1e-8 && bad_residual > 0.01;
    res.data["orthogonal_instances"] = instances;
    res.data["worst_orthogonal_residual"] = worst;
    res.data["non_isometric_residual"] = bad_residual;
    std::ostringstream os;
    os << "orthogonal worst residual " << worst << "; non-isometric fixture residual " << bad_residual;
    res.detail = os.str();
    return res;
}

// ---- criterion 5: fixed point / flow consistency -------------------------

CriterionResult criterion_fixed_point(std::uint64_t seed, int jobs) {
    CriterionResult res{5, "fixed-point detection and flow agreement with the harmonic solver", false, 0.0, 10.0, "", {}};
    const int instances = 50;
    std::vector<int> bad(instances, 0);

    parallel_for(static_cast<std::size_t>(instances), jobs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, 0x400 + i));
        int d = 2 + static_cast<int>(i % 5);
        GroupContext ctx = GroupContext::free_group(2);
        bool with_fixed_point = i % 2 == 0;
        Eigen::VectorXd p = random_vector(d, rng, 1.0);
        AffineAction action = random_action(ctx.gens(), d, rng, false, with_fixed_point ? &p : nullptr);

        auto fp = find_fixed_point(action);
        if (fp) {
            // the constant candidate map must be harmonic (indeed constant)
            double energy = local_energy(EquivariantMap(action, *fp), ctx, ctx.identity());
            if (energy > 1e-16 * (1.0 + fp->squaredNorm())) bad[i] = 1;
        }
        if (with_fixed_point && !fp) bad[i] = 1;
        if (!with_fixed_point && !fp) {
            // certify that no near-fixed vector exists at the solver optimum
            Eigen::VectorXd v = min_energy_vector(action, ctx, ctx.identity());
            if (displacement(action, v) < 1e-6) bad[i] = 1;
        }

        HarmonicSolution sol = solve_harmonic(action);
        if (sol.kind != HarmonicSolution::Kind::NoSolution) {
            FlowOptions opt;
            opt.ball_radius = 2;
            opt.max_iterations = 5;
            FlowResult flow = run_flow(EquivariantMap(action, sol.particular), ctx, opt);
            if (flow.verdict.kind != Stability::Harmonic || flow.verdict.i0 != 0) bad[i] = 1;
        }
    });

    int failures = 0;
    for (int b : bad) failures += b;
    res.pass = failures == 0;
    res.data["instances"] = instances;
    res.data["failures"] = failures;
    res.detail = std::to_string(failures) + " inconsistent instances";
    return res;
}

// ---- criterion 6: pushforward soundness ----------------------------------

CriterionResult criterion_pushforward(std::uint64_t seed) {
    CriterionResult res{6, "pushforward walks are sound below girth/2", false, 0.0, 30.0, "", {}};
    Graph g = projective_plane_incidence(3);  // 4-regular, girth 6
    ExpanderStats stats = graph_stats(g);
    GroupContext fm = GroupContext::free_group(2);
    SLabelling lab = sample_labelling(g, 2, derive_seed(seed, 0x600));

    bool ok = stats.girth >= 6;
    double worst_mass_error = 0.0;
    bool support_ok = true;
    for (int n = 1; n <= 2; ++n) {
        WalkMeasure mu = pushforward_walk(g, lab, fm, fm.identity(), n, stats.girth);
        worst_mass_error = std::max(worst_mass_error, std::abs(mu.total_mass() - 1.0));
        for (const auto& [w, mass] : mu.mass) {
            if (mass < 0.0) support_ok = false;
            if (fm.word_length(w) > n) support_ok = false;
        }
    }
    bool rejects = false;
    try {
        pushforward_walk(g, lab, fm, fm.identity(), stats.girth / 2, stats.girth);
    } catch (const std::invalid_argument&) {
        rejects = true;
    }

    // random walk labels must reduce to the geodesic label of their endpoint
    Rng rng(derive_seed(seed, 0x601));
    int label_mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int start = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(g.vertex_count())));
        int steps = 1 + static_cast<int>(rng.next_below(2));  // < girth/2
        int u = start;
        Element walk_label = fm.identity();
        for (int s = 0; s < steps; ++s) {
            const auto& nbrs = g.neighbors(u);
            auto [v, e] = nbrs[static_cast<std::size_t>(rng.next_below(nbrs.size()))];
            walk_label = fm.multiply(walk_label, fm.generator(lab.token(fm.gens(), e, g.edges()[static_cast<std::size_t>(e)].first == u)));
            u = v;
        }
        Element geodesic_label = beta(g, lab, fm, start, fm.identity(), u, stats.girth);
        if (walk_label != geodesic_label) ++label_mismatches;
    }

    res.pass = ok && worst_mass_error <= 1e-12 && support_ok && rejects && label_mismatches == 0;
    res.data["girth"] = stats.girth;
    res.data["worst_mass_error"] = worst_mass_error;
    res.data["support_in_ball"] = support_ok;
    res.data["rejects_large_n"] = rejects;
    res.data["label_mismatches"] = label_mismatches;
    std::ostringstream os;
    os << "girth " << stats.girth << ", mass error " << worst_mass_error << ", " << label_mismatches
       << " label mismatches";
    res.detail = os.str();
    return res;
}

// ---- criterion 7: mixture fit --------------------------------------------

CriterionResult criterion_mixture(std::uint64_t seed, int jobs) {
    CriterionResult res{7, "labelling expectation fits a convolution-power mixture", false, 0.0, 60.0, "", {}};
    Graph g = projective_plane_incidence(3);
    MixtureFit one = fit_mixture(g, 2, 1, 2000, derive_seed(seed, 0x700), jobs);
    MixtureFit two = fit_mixture(g, 2, 2, 2000, derive_seed(seed, 0x701), jobs);

    double odd_mass = two.weights.size() > 1 ? two.weights[1] : 0.0;
    res.pass = one.weights.size() == 2 && one.weights[1] > 0.98 && one.residual_tv < 0.02 &&
               two.residual_tv < 0.05 && odd_mass < 0.02;
    res.data["n1_w1"] = one.weights.size() == 2 ? one.weights[1] : -1.0;
    res.data["n1_residual_tv"] = one.residual_tv;
    res.data["n2_weights"] = two.weights;
    res.data["n2_residual_tv"] = two.residual_tv;
    res.data["n2_odd_mass"] = odd_mass;
    std::ostringstream os;
    os << "n=1: w1 = " << res.data["n1_w1"].get<double>() << ", tv " << one.residual_tv << "; n=2: tv "
       << two.residual_tv << ", odd mass " << odd_mass;
    res.detail = os.str();
    return res;
}

// ---- criterion 8: Poincare constant --------------------------------------

LinkGraph complete_link(int k) {
    LinkGraph link;
    for (int i = 0; i < k; ++i) link.vertex_names.push_back("s" + std::to_string(i));
    link.weight = Eigen::MatrixXd::Ones(k, k);
    link.weight.diagonal().setZero();
    return link;
}

// maximize the Rayleigh quotient variance/dirichlet by Rayleigh-Ritz ascent
// on two-dimensional subspaces; independent of the dense eigensolver route
double brute_force_kappa2_squared(const LinkGraph& link, Rng& rng) {
    const int n = link.size();
    Eigen::VectorXd m = link.vertex_weight();
    double total = m.sum();
    Eigen::MatrixXd var_form = m.asDiagonal();
    var_form -= (m * m.transpose()) / total;
    Eigen::MatrixXd dir_form = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            if (link.weight(s, t) <= 0.0) continue;
            dir_form(s, s) += 0.5 * link.weight(s, t);
            dir_form(t, t) += 0.5 * link.weight(s, t);
            dir_form(s, t) -= 0.5 * link.weight(s, t);
            dir_form(t, s) -= 0.5 * link.weight(s, t);
        }

    auto quotient = [&](const Eigen::VectorXd& f) {
        double dir = f.dot(dir_form * f);
        return dir <= 0.0 ? -1.0 : f.dot(var_form * f) / dir;
    };

    double best = 0.0;
    for (int restart = 0; restart < 8; ++restart) {
        Eigen::VectorXd f(n);
        for (int i = 0; i < n; ++i) f(i) = rng.next_double(-1.0, 1.0);
        f -= Eigen::VectorXd::Constant(n, m.dot(f) / total);
        if (f.norm() == 0.0) continue;
        f.normalize();
        for (int it = 0; it < 200; ++it) {
            double q = quotient(f);
            // gradient of the quotient, projected away from constants
            Eigen::VectorXd grad = var_form * f - q * (dir_form * f);
            grad -= Eigen::VectorXd::Constant(n, m.dot(grad) / total);
            grad -= f * f.dot(grad);  // keep the 2x2 pencil nondegenerate
            if (grad.norm() < 1e-14) break;
            grad.normalize();
            // exact maximization over span{f, grad}: 2x2 generalized eigenproblem
            Eigen::Matrix2d va, da;
            va << f.dot(var_form * f), f.dot(var_form * grad), grad.dot(var_form * f), grad.dot(var_form * grad);
            da << f.dot(dir_form * f), f.dot(dir_form * grad), grad.dot(dir_form * f), grad.dot(dir_form * grad);
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> small(va, da);
            Eigen::Vector2d coeff = small.eigenvectors().col(1);  // largest
            Eigen::VectorXd next = coeff(0) * f + coeff(1) * grad;
            if (next.norm() == 0.0) break;
            next.normalize();
            if (std::abs(quotient(next) - q) < 1e-13 * std::max(1.0, q)) {
                f = next;
                break;
            }
            f = next;
        }
        best = std::max(best, quotient(f));
    }
    return best;
}

LinkGraph random_link(int n, Rng& rng) {
    LinkGraph link;
    for (int i = 0; i < n; ++i) link.vertex_names.push_back("s" + std::to_string(i));
    link.weight = Eigen::MatrixXd::Zero(n, n);
    for (int v = 1; v < n; ++v) {  // random spanning tree keeps it connected
        int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(v)));
        double w = rng.next_double(0.2, 2.0);
        link.weight(u, v) = link.weight(v, u) = w;
    }
    for (int extra = 0; extra < n; ++extra) {
        int u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        if (u == v) continue;
        double w = rng.next_double(0.2, 2.0);
        link.weight(u, v) = link.weight(v, u) = w;
    }
    return link;
}

CriterionResult criterion_poincare(std::uint64_t seed) {
    CriterionResult res{8, "Poincare constant kappa_2 and the fixed-point criterion", false, 0.0, 10.0, "", {}};
    double worst_complete = 0.0;
    for (int k = 3; k <= 8; ++k) {
        PoincareReport rep = poincare_k2(complete_link(k));
        worst_complete = std::max(worst_complete,
                                  std::abs(rep.kappa2 - std::sqrt((k - 1.0) / k)));
    }

    Rng rng(derive_seed(seed, 0x800));
    double worst_brute = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        int n = 3 + static_cast<int>(rng.next_below(6));  // up to 8 vertices
        LinkGraph link = random_link(n, rng);
        PoincareReport rep = poincare_k2(link);
        double brute = brute_force_kappa2_squared(link, rng);
        worst_brute = std::max(worst_brute, std::abs(brute - rep.kappa2 * rep.kappa2));
    }

    bool criterion_ok = true;
    {
        PoincareReport rep = poincare_k2(complete_link(4));
        for (double c : {0.5, 1.0, std::sqrt(2.0) / rep.kappa2 * 0.999, std::sqrt(2.0) / rep.kappa2 * 1.001, 2.0}) {
            CriterionVerdict v = nowak_criterion(rep, c);
            if (v.certified != (c * rep.kappa2 < std::sqrt(2.0) - 1e-12)) criterion_ok = false;
        }
    }

    res.pass = worst_complete <= 1e-8 && worst_brute <= 1e-6 && criterion_ok;
    res.data["worst_complete_error"] = worst_complete;
    res.data["worst_brute_force_gap"] = worst_brute;
    res.data["criterion_consistent"] = criterion_ok;
    std::ostringstream os;
    os << "complete-link error " << worst_complete << ", brute-force gap " << worst_brute;
    res.detail = os.str();
    return res;
}

// ---- criterion 9: conjugacy length ---------------------------------------

CriterionResult criterion_conjugacy(std::uint64_t seed) {
    CriterionResult res{9, "conjugacy length equals the brute-force minimum over conjugates", false, 0.0, 10.0, "", {}};
    GroupContext ctx = GroupContext::free_group(2);
    std::vector<Element> conjugators = ctx.ball(3);
    Rng rng(derive_seed(seed, 0x900));
    int mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        int len = static_cast<int>(rng.next_below(7));
        std::vector<int> tokens;
        for (int i = 0; i < len; ++i) tokens.push_back(static_cast<int>(rng.next_below(4)));
        Element w = ctx.from_tokens(tokens);
        int direct = ctx.conjugacy_length(w);
        int brute = ctx.word_length(w);
        for (const auto& u : conjugators)
            brute = std::min(brute, ctx.word_length(ctx.multiply(ctx.multiply(u, w), ctx.inverse(u))));
        if (direct != brute) ++mismatches;
    }
    res.pass = mismatches == 0;
    res.data["trials"] = 500;
    res.data["mismatches"] = mismatches;
    res.detail = std::to_string(mismatches) + " mismatches in 500 trials";
    return res;
}

}  // namespace

SuiteReport run_core_battery(std::uint64_t seed, int jobs) {
    SuiteReport report;
    report.seed = seed;
    report.jobs = jobs;

    auto timed = [&report](CriterionResult (*fn)(std::uint64_t, int), std::uint64_t seed_, int jobs_) {
        auto start = Clock::now();
        CriterionResult r = fn(seed_, jobs_);
        r.seconds = elapsed_seconds(start);
        if (r.seconds > r.budget_seconds) r.pass = false;
        report.results.push_back(std::move(r));
    };

    {
        auto start = Clock::now();
        CriterionResult r = criterion_z_translation();
        r.seconds = elapsed_seconds(start);
        if (r.seconds > r.budget_seconds) r.pass = false;
        report.results.push_back(std::move(r));
    }
    timed([](std::uint64_t s, int j) { return criterion_monotonicity(s, j); }, seed, jobs);
    timed([](std::uint64_t s, int j) { return criterion_energy_inequality(s, j); }, seed, jobs);
    timed([](std::uint64_t s, int j) { return criterion_minimizer(s, j); }, seed, jobs);
    timed([](std::uint64_t s, int j) { return criterion_fixed_point(s, j); }, seed, jobs);
    timed([](std::uint64_t s, int j) { (void)j; return criterion_pushforward(s); }, seed, jobs);
    timed([](std::uint64_t s, int j) { return criterion_mixture(s, j); }, seed, jobs);
    timed([](std::uint64_t s, int j) { (void)j; return criterion_poincare(s); }, seed, jobs);
    timed([](std::uint64_t s, int j) { (void)j; return criterion_conjugacy(s); }, seed, jobs);

    report.all_pass = true;
    for (const auto& r : report.results) report.all_pass = report.all_pass && r.pass;
    return report;
}

SuiteReport run_acceptance_battery(std::uint64_t seed, int jobs) {
    auto start = Clock::now();
    SuiteReport report = run_core_battery(seed, jobs);

    CriterionResult det{10, "suite determinism: identical seed gives byte-identical reports", false, 0.0, 300.0, "", {}};
    SuiteReport second = run_core_battery(seed, jobs);
    std::string bytes_a = canonical_json(suite_report_json(report));
    std::string bytes_b = canonical_json(suite_report_json(second));
    det.seconds = elapsed_seconds(start);
    bool identical = bytes_a == bytes_b;
    det.pass = identical && det.seconds <= det.budget_seconds;
    det.data["byte_identical"] = identical;
    det.data["report_bytes"] = static_cast<int>(bytes_a.size());
    det.detail = identical ? "reports identical (" + std::to_string(bytes_a.size()) + " bytes)"
                           : "reports differ";
    report.results.push_back(std::move(det));

    report.all_pass = true;
    for (const auto& r : report.results) report.all_pass = report.all_pass && r.pass;
    return report;
}

json suite_report_json(const SuiteReport& report) {
    json j;
    j["seed"] = report.seed;
    j["criteria"] = json::array();
    for (const auto& r : report.results) {
        json c;
        c["id"] = r.id;
        c["name"] = r.name;
        c["pass"] = r.pass;
        c["data"] = r.data;
        j["criteria"].push_back(std::move(c));
    }
    j["all_pass"] = report.all_pass;
    return j;
}

std::string format_suite_summary(const SuiteReport& report) {
    std::ostringstream os;
    for (const auto& r : report.results) {
        os << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.name;
        if (!r.detail.empty()) os << " — " << r.detail;
        os << "  [" << r.seconds << " s / " << r.budget_seconds << " s]\n";
    }
    os << (report.all_pass ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED") << "\n";
    return os.str();
}

}  // namespace hfl
