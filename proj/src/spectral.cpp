#include "hfl/spectral.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace hfl {

bool LinkGraph::connected() const {
    const int n = size();
    if (n == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int count = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v = 0; v < n; ++v)
            if (!seen[static_cast<std::size_t>(v)] && weight(u, v) > 0.0) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                queue.push_back(v);
            }
    }
    return count == n;
}

int LinkGraph::edge_count() const {
    int c = 0;
    for (int s = 0; s < size(); ++s)
        for (int t = s + 1; t < size(); ++t)
            if (weight(s, t) > 0.0) ++c;
    return c;
}

LinkGraph build_link(const GroupContext& ctx, const std::vector<Element>& relators,
                     const std::optional<LinkWeights>& weights) {
    const int n = ctx.token_count();
    if (n == 0) throw std::invalid_argument("link graph needs a nonempty generating set");

    LinkGraph link;
    link.vertex_names.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) link.vertex_names.push_back(ctx.gens().name(t));
    Eigen::MatrixXd adjacent = Eigen::MatrixXd::Zero(n, n);

    if (!ctx.is_free()) {
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) {
                if (s == t) continue;
                Element prod = ctx.multiply(ctx.inverse(ctx.generator(s)), ctx.generator(t));
                for (int u = 0; u < n; ++u)
                    if (prod == ctx.generator(u)) adjacent(s, t) = 1.0;
            }
    } else {
        // s^-1 t is a generator exactly when some length-3 relator witnesses it;
        // a relator a b c = e gives a b = c^-1, i.e. the edge {a^-1, b}, over
        // all cyclic rotations of the relator and of its inverse
        for (const auto& r : relators) {
            if (r.letters.size() != 3) continue;
            std::vector<Element> both{r, ctx.inverse(r)};
            for (const auto& w : both) {
                for (int rot = 0; rot < 3; ++rot) {
                    int a = w.letters[static_cast<std::size_t>(rot)];
                    int b = w.letters[static_cast<std::size_t>((rot + 1) % 3)];
                    int s = ctx.gens().inv(a);
                    if (s == b) continue;
                    adjacent(s, b) = 1.0;
                    adjacent(b, s) = 1.0;
                }
            }
        }
    }

    if (weights) {
        link.weight = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [sa, sb, w] : weights->edges) {
            auto ta = ctx.gens().token_by_name(sa);
            auto tb = ctx.gens().token_by_name(sb);
            if (!ta || !tb) throw std::invalid_argument("weight file names unknown generator token");
            if (w <= 0.0) throw std::invalid_argument("edge weights must be positive");
            link.weight(*ta, *tb) = w;
            link.weight(*tb, *ta) = w;
        }
    } else {
        link.weight = adjacent;
    }
    link.weight.diagonal().setZero();
    return link;
}

double rayleigh_quotient(const LinkGraph& link, const Eigen::VectorXd& f) {
    const int n = link.size();
    Eigen::VectorXd m = link.vertex_weight();
    double total = m.sum();
    if (total <= 0.0) throw std::invalid_argument("link graph has no edges");
    double mean = m.dot(f) / total;
    double variance = 0.0;
    for (int s = 0; s < n; ++s) variance += m(s) * (f(s) - mean) * (f(s) - mean);
    double dirichlet = 0.0;
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t)
            if (link.weight(s, t) > 0.0) dirichlet += link.weight(s, t) * (f(s) - f(t)) * (f(s) - f(t));
    if (dirichlet == 0.0) return std::numeric_limits<double>::infinity();
    return variance / dirichlet;
}

PoincareReport poincare_k2(const LinkGraph& link) {
    if (!link.connected())
        throw std::invalid_argument("the Poincare criterion requires a connected link graph");
    const int n = link.size();
    Eigen::VectorXd m = link.vertex_weight();
    Eigen::MatrixXd norm_adj(n, n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) norm_adj(s, t) = link.weight(s, t) / std::sqrt(m(s) * m(t));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(norm_adj, Eigen::EigenvaluesOnly);

    PoincareReport report;
    report.vertices = n;
    report.edges = link.edge_count();
    report.lambda1 = 1.0 - solver.eigenvalues()(n - 2);
    report.kappa2 = 1.0 / std::sqrt(report.lambda1);
    return report;
}

CriterionVerdict nowak_criterion(const PoincareReport& report, double lipschitz_C) {
    if (lipschitz_C <= 0.0) throw std::invalid_argument("Lipschitz bound must be positive");
    CriterionVerdict verdict;
    verdict.lipschitz_C = lipschitz_C;
    verdict.product = lipschitz_C * report.kappa2;
    verdict.certified = verdict.product < std::sqrt(2.0) - 1e-12;
    verdict.isometric_p2 = report.kappa2 / std::sqrt(2.0) < 1.0 - 1e-12;
    return verdict;
}

}  // namespace hfl
