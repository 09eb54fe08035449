#include "hfl/affine.hpp"

#include <cmath>
#include <stdexcept>

namespace hfl {

double operator_norm(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) throw std::invalid_argument("operator_norm: matrix has non-finite entries");
    if (m.rows() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

AffineAction AffineAction::from_generator_maps(const GeneratorSet& gens, int dim,
                                               std::vector<std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>> maps,
                                               double lipschitz_C, double sigma) {
    if (dim < 1) throw std::invalid_argument("affine action dimension must be >= 1");
    if (lipschitz_C <= 0.0) throw std::invalid_argument("growth constant C must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("growth exponent sigma must be >= 0");
    if (static_cast<int>(maps.size()) != gens.count()) throw std::invalid_argument("one map slot per token expected");

    AffineAction act;
    act.dim_ = dim;
    act.C_ = lipschitz_C;
    act.sigma_ = sigma;
    act.A_.resize(maps.size());
    act.b_.resize(maps.size());

    std::vector<bool> have(maps.size(), false);
    for (int t = 0; t < gens.count(); ++t) {
        if (!maps[static_cast<std::size_t>(t)]) continue;
        auto& [A, b] = *maps[static_cast<std::size_t>(t)];
        if (A.rows() != dim || A.cols() != dim || b.size() != dim)
            throw std::invalid_argument("generator map dimension mismatch");
        if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("generator map has non-finite entries");
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        double smax = svd.singularValues()(0);
        double smin = svd.singularValues()(dim - 1);
        if (smin <= 0.0 || smax / smin > 1e12)
            throw std::invalid_argument("generator matrix is singular or too ill-conditioned");
        act.A_[static_cast<std::size_t>(t)] = A;
        act.b_[static_cast<std::size_t>(t)] = b;
        have[static_cast<std::size_t>(t)] = true;
    }

    for (int t = 0; t < gens.count(); ++t) {
        int u = gens.inv(t);
        if (have[static_cast<std::size_t>(t)] && !have[static_cast<std::size_t>(u)]) {
            // rho(s) rho(s^-1) = id forces these
            Eigen::MatrixXd Ainv = act.A_[static_cast<std::size_t>(t)].inverse();
            act.A_[static_cast<std::size_t>(u)] = Ainv;
            act.b_[static_cast<std::size_t>(u)] = -Ainv * act.b_[static_cast<std::size_t>(t)];
            have[static_cast<std::size_t>(u)] = true;
        }
    }
    for (int t = 0; t < gens.count(); ++t)
        if (!have[static_cast<std::size_t>(t)]) throw std::invalid_argument("missing affine data for a generator pair");

    // consistency of each inverse pair (covers involutive tokens: rho(s)^2 = id)
    for (int t = 0; t < gens.count(); ++t) {
        int u = gens.inv(t);
        Eigen::MatrixXd comp = act.A_[static_cast<std::size_t>(t)] * act.A_[static_cast<std::size_t>(u)];
        Eigen::VectorXd shift =
            act.b_[static_cast<std::size_t>(t)] + act.A_[static_cast<std::size_t>(t)] * act.b_[static_cast<std::size_t>(u)];
        double scale = 1.0 + act.A_[static_cast<std::size_t>(t)].norm() + act.b_[static_cast<std::size_t>(t)].norm();
        if ((comp - Eigen::MatrixXd::Identity(dim, dim)).norm() > 1e-10 * scale || shift.norm() > 1e-10 * scale)
            throw std::invalid_argument("generator pair does not compose to the identity map");
    }
    return act;
}

Eigen::VectorXd AffineAction::apply(const GroupContext& ctx, const Element& g, const Eigen::VectorXd& v) const {
    if (v.size() != dim_) throw std::invalid_argument("vector dimension mismatch");
    std::vector<int> word = ctx.token_word(g);
    Eigen::VectorXd out = v;
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        out = A_[static_cast<std::size_t>(*it)] * out + b_[static_cast<std::size_t>(*it)];
    return out;
}

Eigen::MatrixXd AffineAction::linear_part(const GroupContext& ctx, const Element& g) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(dim_, dim_);
    for (int t : ctx.token_word(g)) out = out * A_[static_cast<std::size_t>(t)];
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> AffineAction::affine_pair(const GroupContext& ctx, const Element& g) const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(dim_, dim_);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim_);
    for (int t : ctx.token_word(g)) {
        b += A * b_[static_cast<std::size_t>(t)];
        A = A * A_[static_cast<std::size_t>(t)];
    }
    return {A, b};
}

bool AffineAction::is_isometric(double tol) const {
    for (const auto& A : A_) {
        if ((A.transpose() * A - Eigen::MatrixXd::Identity(dim_, dim_)).norm() > tol) return false;
    }
    return true;
}

void AffineAction::validate_homomorphism(const GroupContext& ctx) const {
    if (ctx.is_free()) return;  // nothing to factor through
    const auto all = ctx.ball(static_cast<int>(ctx.order()));
    for (const auto& g : all) {
        auto [Ag, bg] = affine_pair(ctx, g);
        for (const auto& h : all) {
            auto [Ah, bh] = affine_pair(ctx, h);
            auto [Agh, bgh] = affine_pair(ctx, ctx.multiply(g, h));
            double scale = 1.0 + Ag.norm() * Ah.norm() + bg.norm();
            if ((Ag * Ah - Agh).norm() > 1e-8 * scale || (bg + Ag * bh - bgh).norm() > 1e-8 * scale)
                throw std::invalid_argument("affine data is inconsistent with the group relations");
        }
    }
}

double renorm_estimate(const AffineAction& action, const GroupContext& ctx, const Eigen::VectorXd& v, int radius,
                       std::size_t cap) {
    double best = 0.0;
    for (const auto& g : ctx.ball(radius, cap)) best = std::max(best, (action.linear_part(ctx, g) * v).norm());
    return best;
}

GrowthReport verify_growth(const AffineAction& action, const GroupContext& ctx, int radius, GrowthBound bound,
                           std::size_t cap) {
    GrowthReport report;
    report.radius = radius;
    report.bound = bound;
    report.witness = ctx.identity();
    for (const auto& g : ctx.ball(radius, cap)) {
        double norm = operator_norm(action.linear_part(ctx, g));
        int len = bound == GrowthBound::Conjugacy ? ctx.conjugacy_length(g) : ctx.word_length(g);
        double denom = len == 0 ? action.lipschitz_C()
                                : action.lipschitz_C() * std::pow(static_cast<double>(len), action.sigma());
        double ratio = norm / denom;
        if (ratio > report.worst_ratio) {
            report.worst_ratio = ratio;
            report.witness = g;
            report.witness_norm = norm;
        }
    }
    report.pass = report.worst_ratio <= 1.0 + 1e-9;
    return report;
}

}  // namespace hfl
