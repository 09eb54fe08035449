#include "hfl/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

#include "hfl/rng.hpp"

namespace hfl {

Graph::Graph(int vertex_count, std::vector<std::pair<int, int>> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
    if (vertex_count_ < 1) throw std::invalid_argument("graph needs at least one vertex");
    adj_.resize(static_cast<std::size_t>(vertex_count_));
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
        auto [u, v] = edges_[static_cast<std::size_t>(i)];
        if (u < 0 || u >= vertex_count_ || v < 0 || v >= vertex_count_)
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loops are not allowed");
        adj_[static_cast<std::size_t>(u)].push_back({v, i});
        adj_[static_cast<std::size_t>(v)].push_back({u, i});
    }
}

std::vector<int> Graph::bfs_distances(int source) const {
    std::vector<int> dist(static_cast<std::size_t>(vertex_count_), -1);
    std::deque<int> queue;
    dist[static_cast<std::size_t>(source)] = 0;
    queue.push_back(source);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (auto [v, e] : adj_[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

bool Graph::connected() const {
    auto dist = bfs_distances(0);
    return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

double Graph::stationary(int u) const { return static_cast<double>(degree(u)) / (2.0 * edge_count()); }

Graph random_regular(int vertex_count, int degree, std::uint64_t seed, int max_attempts) {
    if (degree < 3) throw std::invalid_argument("random regular graph needs degree >= 3");
    if (vertex_count <= degree) throw std::invalid_argument("need more vertices than the degree");
    if ((static_cast<long long>(vertex_count) * degree) % 2 != 0)
        throw std::invalid_argument("V * k must be even");

    Rng rng(seed);
    std::vector<int> stubs(static_cast<std::size_t>(vertex_count) * static_cast<std::size_t>(degree));
    for (int u = 0; u < vertex_count; ++u)
        for (int i = 0; i < degree; ++i) stubs[static_cast<std::size_t>(u * degree + i)] = u;

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        rng.shuffle(stubs);
        std::vector<std::pair<int, int>> edges;
        edges.reserve(stubs.size() / 2);
        std::set<std::pair<int, int>> seen;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) ok = false;
            auto key = std::minmax(u, v);
            if (ok && !seen.insert({key.first, key.second}).second) ok = false;
            if (ok) edges.push_back({u, v});
        }
        if (!ok) continue;
        Graph g(vertex_count, std::move(edges));
        if (g.connected()) return g;
    }
    throw std::runtime_error("pairing model rejection cap exceeded");
}

Graph projective_plane_incidence(int q) {
    if (q != 2 && q != 3 && q != 5 && q != 7 && q != 11 && q != 13)
        throw std::invalid_argument("q must be a prime (2,3,5,7,11,13)");
    // points and lines of PG(2,q): nonzero triples over GF(q) mod scaling
    std::vector<std::array<int, 3>> points;
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
            for (int c = 0; c < q; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                // normalize: first nonzero coordinate equal to 1
                if (a == 1 || (a == 0 && b == 1) || (a == 0 && b == 0 && c == 1))
                    points.push_back({a, b, c});
            }
    const int n = static_cast<int>(points.size());  // q^2 + q + 1
    std::vector<std::pair<int, int>> edges;
    for (int p = 0; p < n; ++p)
        for (int l = 0; l < n; ++l) {
            int dot = points[static_cast<std::size_t>(p)][0] * points[static_cast<std::size_t>(l)][0] +
                      points[static_cast<std::size_t>(p)][1] * points[static_cast<std::size_t>(l)][1] +
                      points[static_cast<std::size_t>(p)][2] * points[static_cast<std::size_t>(l)][2];
            if (dot % q == 0) edges.push_back({p, n + l});
        }
    return Graph(2 * n, std::move(edges));
}

ExpanderStats graph_stats(const Graph& g) {
    if (!g.connected()) throw std::invalid_argument("graph statistics need a connected graph");
    const int n = g.vertex_count();

    ExpanderStats stats;

    // normalized adjacency, dense symmetric eigensolve
    Eigen::MatrixXd norm_adj = Eigen::MatrixXd::Zero(n, n);
    for (auto [u, v] : g.edges()) {
        double w = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) * g.degree(v));
        norm_adj(u, v) += w;
        norm_adj(v, u) += w;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(norm_adj, Eigen::EigenvaluesOnly);
    // eigenvalues ascending; Laplacian spectrum is 1 - (these, descending)
    stats.lambda1 = n >= 2 ? 1.0 - solver.eigenvalues()(n - 2) : 0.0;

    // girth: parallel edges give a 2-cycle; otherwise per-vertex BFS
    int girth = std::numeric_limits<int>::max();
    std::set<std::pair<int, int>> simple;
    for (auto [u, v] : g.edges()) {
        auto key = std::minmax(u, v);
        if (!simple.insert({key.first, key.second}).second) girth = std::min(girth, 2);
    }
    int diameter = 0;
    for (int r = 0; r < n; ++r) {
        auto dist = g.bfs_distances(r);
        std::vector<int> parent_edge(static_cast<std::size_t>(n), -1);
        std::deque<int> queue{r};
        std::vector<int> order;
        std::vector<char> visited(static_cast<std::size_t>(n), 0);
        visited[static_cast<std::size_t>(r)] = 1;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            diameter = std::max(diameter, dist[static_cast<std::size_t>(u)]);
            for (auto [v, e] : g.neighbors(u)) {
                if (!visited[static_cast<std::size_t>(v)]) {
                    visited[static_cast<std::size_t>(v)] = 1;
                    parent_edge[static_cast<std::size_t>(v)] = e;
                    queue.push_back(v);
                } else if (e != parent_edge[static_cast<std::size_t>(u)]) {
                    // non-tree edge closes a cycle through the BFS tree
                    girth = std::min(girth, dist[static_cast<std::size_t>(u)] + dist[static_cast<std::size_t>(v)] + 1);
                }
            }
        }
    }
    stats.girth = girth == std::numeric_limits<int>::max() ? 0 : girth;
    stats.diameter = diameter;
    return stats;
}

Eigen::MatrixXd walk_matrix_power(const Graph& g, int steps) {
    if (steps < 0) throw std::invalid_argument("walk steps must be >= 0");
    const int n = g.vertex_count();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int u = 0; u < n; ++u)
        for (auto [v, e] : g.neighbors(u)) p(u, v) += 1.0 / g.degree(u);
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < steps; ++i) out = out * p;
    return out;
}

std::vector<double> graph_walk(const Graph& g, int source, int steps) {
    if (source < 0 || source >= g.vertex_count()) throw std::invalid_argument("walk source out of range");
    if (steps < 0) throw std::invalid_argument("walk steps must be >= 0");
    std::vector<double> dist(static_cast<std::size_t>(g.vertex_count()), 0.0);
    dist[static_cast<std::size_t>(source)] = 1.0;
    for (int i = 0; i < steps; ++i) {
        std::vector<double> next(dist.size(), 0.0);
        for (int u = 0; u < g.vertex_count(); ++u) {
            if (dist[static_cast<std::size_t>(u)] == 0.0) continue;
            double w = dist[static_cast<std::size_t>(u)] / g.degree(u);
            for (auto [v, e] : g.neighbors(u)) next[static_cast<std::size_t>(v)] += w;
        }
        dist = std::move(next);
    }
    return dist;
}

double graph_energy(const Graph& g, const std::vector<Eigen::VectorXd>& phi, int steps) {
    if (static_cast<int>(phi.size()) != g.vertex_count())
        throw std::invalid_argument("graph map needs one vector per vertex");
    Eigen::MatrixXd walk = walk_matrix_power(g, steps);
    double sum = 0.0;
    for (int u = 0; u < g.vertex_count(); ++u) {
        double inner = 0.0;
        for (int v = 0; v < g.vertex_count(); ++v) {
            double m = walk(u, v);
            if (m != 0.0)
                inner += m * (phi[static_cast<std::size_t>(u)] - phi[static_cast<std::size_t>(v)]).squaredNorm();
        }
        sum += g.stationary(u) * inner;
    }
    return 0.5 * sum;
}

EnergyInequalityReport check_energy_inequality(const Graph& g, const std::vector<Eigen::VectorXd>& phi, int steps) {
    EnergyInequalityReport report;
    report.steps = steps;
    report.lambda1 = graph_stats(g).lambda1;
    report.lhs = graph_energy(g, phi, steps);
    report.rhs = (2.0 / report.lambda1) * graph_energy(g, phi, 1);
    report.pass = report.lhs <= report.rhs + 1e-10 * std::max(1.0, report.rhs);
    return report;
}

}  // namespace hfl
