#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hfl/group.hpp"

namespace hfl {

/// Weighted link graph of a generating set: vertices are the tokens of S,
/// s ~ t whenever s^-1 t is again a generator.
struct LinkGraph {
    std::vector<std::string> vertex_names;  // token names, aligned with indices
    Eigen::MatrixXd weight;                 // symmetric, zero diagonal; 0 = no edge

    int size() const { return static_cast<int>(vertex_names.size()); }
    Eigen::VectorXd vertex_weight() const { return weight.rowwise().sum(); }  // m(s)
    bool connected() const;
    int edge_count() const;
};

struct LinkWeights {
    // explicit edge weights by token name; pairs not listed get weight 0
    std::vector<std::tuple<std::string, std::string, double>> edges;
};

/// Adjacency from the group structure. Finite backends multiply through the
/// table; free backends read adjacency off length-3 relators (s * u = t^-1
/// pieces), since deciding s^-1 t in a general quotient is out of scope.
LinkGraph build_link(const GroupContext& ctx, const std::vector<Element>& relators = {},
                     const std::optional<LinkWeights>& weights = std::nullopt);

struct PoincareReport {
    double lambda1 = 0.0;  // spectral gap of the weighted normalized Laplacian
    double kappa2 = 0.0;   // optimal 2-Poincare constant = 1/sqrt(lambda1)
    bool uniform_weights = true;
    int vertices = 0;
    int edges = 0;
};

/// optimal constant in sum ||f(s)-mean||^2 m(s) <= kappa^2 sum_{s~t} ||f(s)-f(t)||^2 m(s,t)
PoincareReport poincare_k2(const LinkGraph& link);

struct CriterionVerdict {
    double lipschitz_C = 1.0;
    double product = 0.0;        // C * kappa2
    bool certified = false;      // C * kappa2 < sqrt(2)
    bool isometric_p2 = false;     // 2^{-1/2} kappa2 < 1 (isometric instance)
};

CriterionVerdict nowak_criterion(const PoincareReport& report, double lipschitz_C);

/// Rayleigh quotient variance/dirichlet of a scalar function on the link
double rayleigh_quotient(const LinkGraph& link, const Eigen::VectorXd& f);

}  // namespace hfl
