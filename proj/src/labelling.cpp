#include "hfl/labelling.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "hfl/nnls.hpp"
#include "hfl/parallel.hpp"
#include "hfl/rng.hpp"

namespace hfl {

namespace {

void require_free_rank(const GroupContext& fm, int m) {
    if (!fm.is_free() || fm.gens().free_rank() != m)
        throw std::invalid_argument("labelling requires the free group F_m context");
}

// label words of BFS-tree paths from `root` out to `radius`
struct LabelTree {
    std::vector<int> dist;
    std::vector<Element> word;  // reduced label of the tree path root -> v
    std::vector<int> parent_edge;
};

LabelTree label_tree(const Graph& g, const SLabelling& lab, const GroupContext& fm, int root, int radius) {
    LabelTree tree;
    tree.dist.assign(static_cast<std::size_t>(g.vertex_count()), -1);
    tree.word.assign(static_cast<std::size_t>(g.vertex_count()), fm.identity());
    tree.parent_edge.assign(static_cast<std::size_t>(g.vertex_count()), -1);
    std::deque<int> queue{root};
    tree.dist[static_cast<std::size_t>(root)] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (tree.dist[static_cast<std::size_t>(u)] >= radius) continue;
        for (auto [v, e] : g.neighbors(u)) {
            if (tree.dist[static_cast<std::size_t>(v)] >= 0) continue;
            tree.dist[static_cast<std::size_t>(v)] = tree.dist[static_cast<std::size_t>(u)] + 1;
            tree.parent_edge[static_cast<std::size_t>(v)] = e;
            bool forward = g.edges()[static_cast<std::size_t>(e)].first == u;
            tree.word[static_cast<std::size_t>(v)] =
                fm.multiply(tree.word[static_cast<std::size_t>(u)], fm.generator(lab.token(fm.gens(), e, forward)));
            queue.push_back(v);
        }
    }
    return tree;
}

Element cyclically_reduce(const GroupContext& fm, Element w) {
    while (w.letters.size() >= 2 && w.letters.front() == fm.gens().inv(w.letters.back())) {
        w.letters.erase(w.letters.begin());
        w.letters.pop_back();
    }
    return w;
}

}  // namespace

SLabelling sample_labelling(const Graph& g, int m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("labelling rank m must be >= 1");
    Rng rng(seed);
    SLabelling lab;
    lab.rank_m = m;
    lab.edge_token.resize(static_cast<std::size_t>(g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e)
        lab.edge_token[static_cast<std::size_t>(e)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(2 * m)));
    return lab;
}

double labelling_count(const Graph& g, int m) {
    return std::pow(2.0 * m, static_cast<double>(g.edge_count()));
}

Element beta(const Graph& g, const SLabelling& lab, const GroupContext& fm, int u, const Element& x, int v, int girth) {
    require_free_rank(fm, lab.rank_m);
    auto dist = g.bfs_distances(u);
    int d = dist[static_cast<std::size_t>(v)];
    if (d < 0 || (girth > 0 && 2 * d >= girth))
        throw std::invalid_argument("beta is only defined for vertices within girth/2 of the base vertex");
    LabelTree tree = label_tree(g, lab, fm, u, d);
    return fm.multiply(x, tree.word[static_cast<std::size_t>(v)]);
}

WalkMeasure pushforward_walk(const Graph& g, const SLabelling& lab, const GroupContext& fm, const Element& x, int n,
                             int girth) {
    require_free_rank(fm, lab.rank_m);
    if (n < 0) throw std::invalid_argument("walk steps must be >= 0");
    if (girth > 0 && 2 * n >= girth)
        throw std::invalid_argument("pushforward walk requires n < girth/2");

    Eigen::MatrixXd walk = walk_matrix_power(g, n);
    WalkMeasure out;
    out.basepoint = x;
    for (int u = 0; u < g.vertex_count(); ++u) {
        LabelTree tree = label_tree(g, lab, fm, u, n);
        double nu = g.stationary(u);
        for (int v = 0; v < g.vertex_count(); ++v) {
            double mass = walk(u, v);
            if (mass == 0.0) continue;
            out.mass[fm.multiply(x, tree.word[static_cast<std::size_t>(v)])] += nu * mass;
        }
    }
    return out;
}

double transplanted_energy(const EquivariantMap& f, const Graph& g, const SLabelling& lab, const GroupContext& fm,
                           const Element& x, int n, int girth) {
    WalkMeasure mu = pushforward_walk(g, lab, fm, x, n, girth);
    Eigen::VectorXd fx = f.evaluate(fm, x);
    double sum = 0.0;
    for (const auto& [w, mass] : mu.mass) sum += mass * (fx - f.evaluate(fm, w)).squaredNorm();
    return 0.5 * sum;
}

TransplantReport check_transplant_inequality(const EquivariantMap& f, const Graph& g, const SLabelling& lab,
                                             const GroupContext& fm, const Element& x, int n, int growth_radius) {
    GrowthReport growth = verify_growth(f.action(), fm, growth_radius, GrowthBound::WordLength);
    if (!growth.pass)
        throw std::runtime_error("declared (C, sigma) growth bound fails at radius " + std::to_string(growth_radius) +
                                 "; worst ratio " + std::to_string(growth.worst_ratio));

    ExpanderStats stats = graph_stats(g);
    TransplantReport report;
    report.steps = n;
    report.lambda1 = stats.lambda1;
    report.diameter = stats.diameter;
    report.lhs = transplanted_energy(f, g, lab, fm, x, n, stats.girth);
    report.one_step = transplanted_energy(f, g, lab, fm, x, 1, stats.girth);
    const double C = f.action().lipschitz_C();
    const double sigma = f.action().sigma();
    const int len = fm.word_length(x);
    const double len_factor = len == 0 ? 1.0 : std::pow(static_cast<double>(len), 8.0 * sigma);
    report.factor = 2.0 * std::pow(C, 12.0) * std::pow(static_cast<double>(stats.diameter), 4.0 * sigma) * len_factor /
                    stats.lambda1;
    report.rhs = report.factor * report.one_step;
    report.pass = report.lhs <= report.rhs + 1e-9 * std::max(1.0, report.rhs);
    return report;
}

MixtureFit fit_mixture(const Graph& g, int m, int n, int samples, std::uint64_t seed, int jobs) {
    if (samples < 1) throw std::invalid_argument("mixture fit needs at least one sample");
    GroupContext fm = GroupContext::free_group(m);
    ExpanderStats stats = graph_stats(g);
    if (2 * n >= stats.girth) throw std::invalid_argument("mixture fit requires n < girth/2");

    // Monte-Carlo expectation of the pushforward walk
    std::vector<WalkMeasure> per_sample(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), jobs, [&](std::size_t i) {
        SLabelling lab = sample_labelling(g, m, derive_seed(seed, i));
        per_sample[i] = pushforward_walk(g, lab, fm, fm.identity(), n, stats.girth);
    });
    std::map<Element, double> expectation;
    for (const auto& mu : per_sample)
        for (const auto& [w, mass] : mu.mass) expectation[w] += mass / samples;

    // exact convolution powers of the standard walk on F_m
    std::vector<WalkMeasure> powers;
    powers.reserve(static_cast<std::size_t>(n) + 1);
    for (int l = 0; l <= n; ++l) powers.push_back(fm.walk_convolution(l));

    // union support, then a simplex-constrained least-squares fit
    std::map<Element, int> row_of;
    for (const auto& [w, mass] : expectation) row_of.emplace(w, 0);
    for (const auto& mu : powers)
        for (const auto& [w, mass] : mu.mass) row_of.emplace(w, 0);
    int rows = 0;
    for (auto& [w, r] : row_of) r = rows++;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n + 1);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
    for (const auto& [w, mass] : expectation) y(row_of.at(w)) = mass;
    for (int l = 0; l <= n; ++l)
        for (const auto& [w, mass] : powers[static_cast<std::size_t>(l)].mass) a(row_of.at(w), l) = mass;

    Eigen::VectorXd w = simplex_nnls(a, y);

    MixtureFit fit;
    fit.steps = n;
    fit.weights.assign(w.data(), w.data() + w.size());
    fit.residual_tv = 0.5 * (a * w - y).cwiseAbs().sum();
    for (int l = 0; l <= n; ++l)
        if (static_cast<double>(l) > std::sqrt(static_cast<double>(n))) fit.tail_mass += w(l);
    return fit;
}

ConcentrationReport concentration_experiment(const Graph& g, int m, int n, int samples, std::uint64_t seed, int jobs) {
    if (samples < 1) throw std::invalid_argument("concentration experiment needs at least one sample");
    GroupContext fm = GroupContext::free_group(m);
    ExpanderStats stats = graph_stats(g);
    if (2 * n >= stats.girth) throw std::invalid_argument("concentration experiment requires n < girth/2");

    std::vector<WalkMeasure> one_step(static_cast<std::size_t>(samples));
    std::vector<WalkMeasure> n_step(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), jobs, [&](std::size_t i) {
        SLabelling lab = sample_labelling(g, m, derive_seed(seed, i));
        one_step[i] = pushforward_walk(g, lab, fm, fm.identity(), 1, stats.girth);
        n_step[i] = pushforward_walk(g, lab, fm, fm.identity(), n, stats.girth);
    });

    std::map<Element, double> mean_one, mean_n;
    for (const auto& mu : one_step)
        for (const auto& [w, mass] : mu.mass) mean_one[w] += mass / samples;
    for (const auto& mu : n_step)
        for (const auto& [w, mass] : mu.mass) mean_n[w] += mass / samples;

    ConcentrationReport report;
    report.steps = n;
    report.samples = samples;
    report.worst_lower_ratio = std::numeric_limits<double>::infinity();
    int good = 0;
    for (int i = 0; i < samples; ++i) {
        bool upper_ok = true;
        for (const auto& [w, mass] : one_step[static_cast<std::size_t>(i)].mass) {
            double ratio = mass / mean_one.at(w);
            report.worst_upper_ratio = std::max(report.worst_upper_ratio, ratio);
            if (ratio > 2.0) upper_ok = false;
        }
        bool lower_ok = true;
        for (const auto& [w, mean_mass] : mean_n) {
            auto it = n_step[static_cast<std::size_t>(i)].mass.find(w);
            double ratio = (it == n_step[static_cast<std::size_t>(i)].mass.end() ? 0.0 : it->second) / mean_mass;
            report.worst_lower_ratio = std::min(report.worst_lower_ratio, ratio);
            if (ratio < 0.5) lower_ok = false;
        }
        if (upper_ok && lower_ok) ++good;
    }
    report.fraction_both_hold = static_cast<double>(good) / samples;
    return report;
}

std::vector<Element> extract_relators(const Graph& g, const SLabelling& lab, const GroupContext& fm, int tree_root) {
    require_free_rank(fm, lab.rank_m);
    if (!g.connected()) throw std::invalid_argument("relator extraction needs a connected graph");
    LabelTree tree = label_tree(g, lab, fm, tree_root, g.vertex_count());

    std::vector<bool> is_tree_edge(static_cast<std::size_t>(g.edge_count()), false);
    for (int v = 0; v < g.vertex_count(); ++v)
        if (tree.parent_edge[static_cast<std::size_t>(v)] >= 0)
            is_tree_edge[static_cast<std::size_t>(tree.parent_edge[static_cast<std::size_t>(v)])] = true;

    std::vector<Element> relators;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (is_tree_edge[static_cast<std::size_t>(e)]) continue;
        auto [u, v] = g.edges()[static_cast<std::size_t>(e)];
        Element word = fm.multiply(tree.word[static_cast<std::size_t>(u)], fm.generator(lab.token(fm.gens(), e, true)));
        word = fm.multiply(word, fm.inverse(tree.word[static_cast<std::size_t>(v)]));
        relators.push_back(cyclically_reduce(fm, word));
    }
    return relators;
}

}  // namespace hfl
