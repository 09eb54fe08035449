#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace hfl {

/// Finite undirected multigraph, self-loop free. Multi-edges keep one entry
/// per parallel copy; directed edge (u,v) of edge i is "forward" when
/// u == edges[i].first.
class Graph {
public:
    Graph(int vertex_count, std::vector<std::pair<int, int>> edges);

    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    int degree(int u) const { return static_cast<int>(adj_[static_cast<std::size_t>(u)].size()); }
    /// (neighbor, edge index) pairs at u, in insertion order
    const std::vector<std::pair<int, int>>& neighbors(int u) const { return adj_[static_cast<std::size_t>(u)]; }

    bool connected() const;
    std::vector<int> bfs_distances(int source) const;
    /// stationary measure nu(u) = deg(u) / (2 #E)
    double stationary(int u) const;

private:
    int vertex_count_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
};

/// simple k-regular graph on V vertices via the pairing model, rejecting
/// loops, parallel edges and disconnected outcomes; deterministic under seed
Graph random_regular(int vertex_count, int degree, std::uint64_t seed, int max_attempts = 2000);

/// point-line incidence graph of the projective plane PG(2, q); (q+1)-regular,
/// bipartite on 2(q^2+q+1) vertices, girth 6 (q = 3 gives the 4-regular member)
Graph projective_plane_incidence(int q);

struct ExpanderStats {
    double lambda1 = 0.0;  // second-smallest eigenvalue of I - D^{-1/2} A D^{-1/2}
    int girth = 0;         // 0 = acyclic
    int diameter = 0;
};

ExpanderStats graph_stats(const Graph& g);

/// exact n-step distribution of the simple random walk from `source`
std::vector<double> graph_walk(const Graph& g, int source, int steps);

/// all n-step rows at once: result(u, v) = mu^n(u -> v)
Eigen::MatrixXd walk_matrix_power(const Graph& g, int steps);

/// E_{mu^n}(phi) = 1/2 sum_u nu(u) sum_v ||phi(u)-phi(v)||^2 mu^n(u -> v)
double graph_energy(const Graph& g, const std::vector<Eigen::VectorXd>& phi, int steps);

struct EnergyInequalityReport {
    int steps = 0;
    double lambda1 = 0.0;
    double lhs = 0.0;  // E_{mu^n}
    double rhs = 0.0;  // (2 / lambda1) E_{mu}
    bool pass = false;
};

EnergyInequalityReport check_energy_inequality(const Graph& g, const std::vector<Eigen::VectorXd>& phi, int steps);

}  // namespace hfl
