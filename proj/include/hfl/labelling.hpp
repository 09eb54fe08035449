#pragma once

#include <cstdint>
#include <vector>

#include "hfl/affine.hpp"
#include "hfl/graph.hpp"
#include "hfl/group.hpp"
#include "hfl/harmonic.hpp"

namespace hfl {

/// Generator labelling of the directed edges: the reverse orientation always
/// carries the inverse token.
struct SLabelling {
    int rank_m = 0;                // labels come from S = generators of F_m
    std::vector<int> edge_token;   // token of edge i in its stored orientation

    /// token of directed edge i traversed u -> v; forward = (u == edges[i].first)
    int token(const GeneratorSet& gens, int edge_index, bool forward) const {
        int t = edge_token.at(static_cast<std::size_t>(edge_index));
        return forward ? t : gens.inv(t);
    }
};

/// independent uniform token per undirected edge
SLabelling sample_labelling(const Graph& g, int m, std::uint64_t seed);

/// number of labellings of g: (2m)^{#E}; only for display (may overflow doubles late)
double labelling_count(const Graph& g, int m);

/// The graph morphism beta_{u->x}: v |-> x * alpha(geodesic u..v), defined for
/// dist(u, v) < girth/2. `girth` must be the girth of g (pass stats().girth).
Element beta(const Graph& g, const SLabelling& lab, const GroupContext& fm, int u, const Element& x, int v, int girth);

/// mu_{G,alpha}^n(x -> .) = sum_u nu(u) (beta_{u->x})_* mu_G^n(u -> .); needs n < girth/2
WalkMeasure pushforward_walk(const Graph& g, const SLabelling& lab, const GroupContext& fm, const Element& x, int n,
                             int girth);

/// E_{mu_{G,alpha}^n}(f)(x) = 1/2 sum ||f(x) - f(x')||^2 mu_{G,alpha}^n(x -> x')
double transplanted_energy(const EquivariantMap& f, const Graph& g, const SLabelling& lab, const GroupContext& fm,
                           const Element& x, int n, int girth);

struct TransplantReport {
    int steps = 0;
    double lambda1 = 0.0;
    int diameter = 0;
    double lhs = 0.0;          // E_{mu_{G,alpha}^n}(f)(x)
    double one_step = 0.0;     // E_{mu_{G,alpha}}(f)(x)
    double factor = 0.0;       // 2 C^12 D^{4 sigma} l(x)^{8 sigma} / lambda1
    double rhs = 0.0;
    bool pass = false;
};

/// lhs <= (2 C^12 D^{4s} l(x)^{8s} / lambda1) * one_step; the declared (C, sigma)
/// growth bound is re-verified over ball(growth_radius) first.
TransplantReport check_transplant_inequality(const EquivariantMap& f, const Graph& g, const SLabelling& lab,
                                             const GroupContext& fm, const Element& x, int n, int growth_radius = 4);

struct MixtureFit {
    int steps = 0;
    std::vector<double> weights;  // w_l for l = 0..n
    double residual_tv = 0.0;     // total-variation distance of the fitted mixture
    double tail_mass = 0.0;       // sum of w_l over sqrt(n) < l <= n
};

/// Monte-Carlo estimate of the labelling expectation of mu_{G,alpha}^n,
/// fitted as a simplex combination of the convolution powers mu_X^l.
MixtureFit fit_mixture(const Graph& g, int m, int n, int samples, std::uint64_t seed, int jobs = 1);

struct ConcentrationReport {
    int steps = 0;
    int samples = 0;
    double fraction_both_hold = 0.0;   // alpha samples satisfying both pointwise bounds
    double worst_upper_ratio = 0.0;    // max of mu_{G,alpha} / mu-bar (bound: 2)
    double worst_lower_ratio = 0.0;    // min of mu_{G,alpha}^n / mu-bar^n (bound: 1/2)
};

/// empirical check of mu_{G,alpha} <= 2 mu-bar and mu_{G,alpha}^n >= mu-bar^n / 2
ConcentrationReport concentration_experiment(const Graph& g, int m, int n, int samples, std::uint64_t seed,
                                             int jobs = 1);

/// fundamental-cycle relators of a BFS spanning tree, cyclically reduced;
/// one per non-tree edge
std::vector<Element> extract_relators(const Graph& g, const SLabelling& lab, const GroupContext& fm, int tree_root);

}  // namespace hfl
