#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "hfl/graph.hpp"
#include "hfl/rng.hpp"

using namespace hfl;

namespace {

Graph cycle(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
    return Graph(n, std::move(edges));
}

Graph complete(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    return Graph(n, std::move(edges));
}

Graph petersen() {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 5; ++i) {
        edges.push_back({i, (i + 1) % 5});          // outer cycle
        edges.push_back({i, i + 5});                // spokes
        edges.push_back({i + 5, (i + 2) % 5 + 5});  // pentagram
    }
    return Graph(10, std::move(edges));
}

std::vector<Eigen::VectorXd> unit_square() {
    std::vector<Eigen::VectorXd> phi(4, Eigen::VectorXd(2));
    phi[0] << 0, 0;
    phi[1] << 1, 0;
    phi[2] << 1, 1;
    phi[3] << 0, 1;
    return phi;
}

}  // namespace

TEST_CASE("graph construction rejects bad input") {
    CHECK_THROWS_AS(Graph(3, {{0, 0}}), std::invalid_argument);  // self-loop
    CHECK_THROWS_AS(Graph(2, {{0, 5}}), std::invalid_argument);  // out of range
    Graph multi(2, {{0, 1}, {0, 1}});
    CHECK(multi.degree(0) == 2);
    CHECK(graph_stats(multi).girth == 2);  // parallel edges form a 2-cycle
}

TEST_CASE("random regular graphs") {
    Graph k4 = random_regular(4, 3, 42);
    CHECK(k4.edge_count() == 6);  // the only simple 3-regular graph on 4 vertices
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : k4.edges()) seen.insert(std::minmax(u, v));
    CHECK(seen.size() == 6);

    Graph g = random_regular(10, 3, 7);
    CHECK(g.connected());
    for (int u = 0; u < 10; ++u) CHECK(g.degree(u) == 3);
    std::set<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges()) {
        CHECK(u != v);
        CHECK(edges.insert(std::minmax(u, v)).second);  // simple, so girth >= 3
    }

    CHECK_THROWS_AS((void)random_regular(5, 3, 0), std::invalid_argument);  // V*k odd
    CHECK_THROWS_AS((void)random_regular(10, 2, 0), std::invalid_argument);

    // deterministic under seed
    Graph a = random_regular(20, 4, 99), b = random_regular(20, 4, 99);
    CHECK(a.edges() == b.edges());
}

TEST_CASE("expander statistics") {
    ExpanderStats c4 = graph_stats(cycle(4));
    CHECK(c4.lambda1 == doctest::Approx(1.0));  // 1 - cos(pi/2)
    CHECK(c4.girth == 4);
    CHECK(c4.diameter == 2);

    ExpanderStats k4 = graph_stats(complete(4));
    CHECK(k4.lambda1 == doctest::Approx(4.0 / 3.0));
    CHECK(k4.girth == 3);
    CHECK(k4.diameter == 1);

    ExpanderStats pet = graph_stats(petersen());
    CHECK(pet.girth == 5);
    CHECK(pet.diameter == 2);
    // normalized Laplacian spectrum of the Petersen graph: {0, 2/3, 5/3}
    CHECK(pet.lambda1 == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS((void)graph_stats(Graph(4, {{0, 1}, {2, 3}})), std::invalid_argument);  // disconnected
}

TEST_CASE("lambda1 matches a Rayleigh-quotient minimization on small graphs") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 4 + static_cast<int>(rng.next_below(5));  // up to 8 vertices
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v < n; ++v) edges.push_back({static_cast<int>(rng.next_below(v)), v});
        for (int extra = 0; extra < n; ++extra) {
            int u = static_cast<int>(rng.next_below(n)), v = static_cast<int>(rng.next_below(n));
            bool dup = u == v;
            for (auto [a, b] : edges) dup = dup || std::minmax(u, v) == std::minmax(a, b);
            if (!dup) edges.push_back({u, v});
        }
        Graph g(n, edges);
        double lambda1 = graph_stats(g).lambda1;

        // minimize f^T (I - N) f / f^T f over f orthogonal to sqrt(nu) by
        // projected gradient descent (independent of the dense eigensolver)
        Eigen::MatrixXd norm_adj = Eigen::MatrixXd::Zero(n, n);
        for (auto [u, v] : g.edges()) {
            double w = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) * g.degree(v));
            norm_adj(u, v) += w;
            norm_adj(v, u) += w;
        }
        Eigen::VectorXd root(n);
        for (int u = 0; u < n; ++u) root(u) = std::sqrt(g.stationary(u));
        Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) - norm_adj;
        double best = std::numeric_limits<double>::infinity();
        for (int restart = 0; restart < 6; ++restart) {
            Eigen::VectorXd f(n);
            for (int i = 0; i < n; ++i) f(i) = rng.next_double(-1, 1);
            f -= root * root.dot(f);
            f.normalize();
            for (int it = 0; it < 200; ++it) {
                double q = f.dot(lap * f);
                Eigen::VectorXd g = lap * f - q * f;  // gradient on the sphere
                g -= root * root.dot(g);
                g -= f * f.dot(g);
                if (g.norm() < 1e-14) break;
                g.normalize();
                // exact minimization over span{f, g}
                Eigen::Matrix2d aa;
                aa << f.dot(lap * f), f.dot(lap * g), g.dot(lap * f), g.dot(lap * g);
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> small(aa);
                Eigen::Vector2d coeff = small.eigenvectors().col(0);
                f = coeff(0) * f + coeff(1) * g;
                f -= root * root.dot(f);
                f.normalize();
            }
            best = std::min(best, f.dot(lap * f) / f.dot(f));
        }
        CHECK(best == doctest::Approx(lambda1).epsilon(1e-6));
    }
}

TEST_CASE("graph walks") {
    Graph g = random_regular(12, 3, 5);
    for (int n : {0, 1, 3, 6}) {
        for (int u = 0; u < g.vertex_count(); ++u) {
            auto dist = graph_walk(g, u, n);
            double total = 0.0;
            for (double p : dist) total += p;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // stationarity: sum_u nu(u) mu(u -> v) = nu(v)
    for (int v = 0; v < g.vertex_count(); ++v) {
        double acc = 0.0;
        for (int u = 0; u < g.vertex_count(); ++u) acc += g.stationary(u) * graph_walk(g, u, 1)[static_cast<std::size_t>(v)];
        CHECK(acc == doctest::Approx(g.stationary(v)).epsilon(1e-12));
    }
}

TEST_CASE("graph energy") {
    Graph c4 = cycle(4);
    auto phi = unit_square();
    CHECK(graph_energy(c4, phi, 0) == doctest::Approx(0.0));
    CHECK(graph_energy(c4, phi, 1) == doctest::Approx(0.5));  // every edge has squared length 1

    std::vector<Eigen::VectorXd> constant(4, Eigen::VectorXd::Ones(2));
    for (int n : {0, 1, 2, 5}) CHECK(graph_energy(c4, constant, n) == doctest::Approx(0.0));

    // invariance under the rotation automorphism applied to phi
    std::vector<Eigen::VectorXd> rotated{phi[3], phi[0], phi[1], phi[2]};
    for (int n : {1, 2, 3}) CHECK(graph_energy(c4, rotated, n) == doctest::Approx(graph_energy(c4, phi, n)));
}

TEST_CASE("energy inequality") {
    Graph c4 = cycle(4);
    auto phi = unit_square();

    std::vector<Eigen::VectorXd> constant(4, Eigen::VectorXd::Zero(2));
    EnergyInequalityReport trivial = check_energy_inequality(c4, constant, 3);
    CHECK(trivial.pass);
    CHECK(trivial.lhs == doctest::Approx(0.0));

    // oracle for C4, n = 2: P^2 sends u to itself or the opposite corner
    // with mass 1/2 each, so E = 1/2 * sum nu(u) * (1/2) * 2 = 1/2
    EnergyInequalityReport rep = check_energy_inequality(c4, phi, 2);
    CHECK(rep.lhs == doctest::Approx(0.5));
    CHECK(rep.rhs == doctest::Approx(1.0));  // (2 / lambda1) * E_mu = 2 * 1/2
    CHECK(rep.pass);
    CHECK(rep.lhs < rep.rhs);

    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = random_regular(20 + 2 * static_cast<int>(rng.next_below(21)), 4, rng.next_u64());
        double lambda1 = graph_stats(g).lambda1;
        CHECK(lambda1 > 0.0);
        CHECK(lambda1 <= 2.0);
        std::vector<Eigen::VectorXd> psi;
        for (int u = 0; u < g.vertex_count(); ++u) {
            Eigen::VectorXd p(3);
            p << rng.next_double(-1, 1), rng.next_double(-1, 1), rng.next_double(-1, 1);
            psi.push_back(p);
        }
        for (int n = 1; n <= 6; ++n) CHECK(check_energy_inequality(g, psi, n).pass);
    }
}

TEST_CASE("multigraphs: parallel edges at the bipartite boundary") {
    Graph banana(2, {{0, 1}, {0, 1}});
    ExpanderStats stats = graph_stats(banana);
    CHECK(stats.girth == 2);
    CHECK(stats.lambda1 == doctest::Approx(2.0));  // bipartite extreme
    std::vector<Eigen::VectorXd> phi{(Eigen::VectorXd(1) << 0).finished(), (Eigen::VectorXd(1) << 1).finished()};
    // the walk alternates sides: E_{mu^n} equals E_mu for odd n, 0 for even n
    CHECK(graph_energy(banana, phi, 2) == doctest::Approx(0.0));
    CHECK(graph_energy(banana, phi, 3) == doctest::Approx(graph_energy(banana, phi, 1)));
    for (int n = 1; n <= 4; ++n) CHECK(check_energy_inequality(banana, phi, n).pass);
}

TEST_CASE("projective plane incidence graph") {
    Graph g = projective_plane_incidence(3);
    CHECK(g.vertex_count() == 26);
    CHECK(g.edge_count() == 52);
    for (int u = 0; u < g.vertex_count(); ++u) CHECK(g.degree(u) == 4);
    CHECK(g.connected());
    ExpanderStats stats = graph_stats(g);
    CHECK(stats.girth == 6);
    CHECK(stats.diameter == 3);
    // bipartite incidence graph: adjacency eigenvalues +-k, +-sqrt(q)
    CHECK(stats.lambda1 == doctest::Approx(1.0 - std::sqrt(3.0) / 4.0));
}
