#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "hfl/group.hpp"

namespace hfl {

/// largest singular value
double operator_norm(const Eigen::MatrixXd& m);

/// Affine action rho(g)(v) = A(g) v + b(g) on R^d, stored per generator token
/// and extended to the whole group through the cocycle rules
/// A(gh) = A(g) A(h), b(gh) = b(g) + A(g) b(h).
class AffineAction {
public:
    /// `maps[t]` gives (A, b) for token t. Tokens whose pair data should be
    /// derived may be left unset; data given for both tokens of a pair is
    /// cross-checked instead. Condition numbers are capped at 1e12.
    static AffineAction from_generator_maps(const GeneratorSet& gens, int dim,
                                            std::vector<std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>> maps,
                                            double lipschitz_C = 1.0, double sigma = 0.0);

    int dim() const { return dim_; }
    double lipschitz_C() const { return C_; }
    double sigma() const { return sigma_; }
    int token_count() const { return static_cast<int>(A_.size()); }

    const Eigen::MatrixXd& generator_matrix(int token) const { return A_.at(static_cast<std::size_t>(token)); }
    const Eigen::VectorXd& generator_translation(int token) const { return b_.at(static_cast<std::size_t>(token)); }

    /// rho(g) v
    Eigen::VectorXd apply(const GroupContext& ctx, const Element& g, const Eigen::VectorXd& v) const;
    /// A(g)
    Eigen::MatrixXd linear_part(const GroupContext& ctx, const Element& g) const;
    /// the full affine pair (A(g), b(g))
    std::pair<Eigen::MatrixXd, Eigen::VectorXd> affine_pair(const GroupContext& ctx, const Element& g) const;

    bool is_isometric(double tol = 1e-10) const;

    /// finite backends only: rho must factor through the relations;
    /// checks rho(g)rho(h) = rho(gh) on all pairs (tolerance 1e-8)
    void validate_homomorphism(const GroupContext& ctx) const;

private:
    int dim_ = 0;
    double C_ = 1.0;
    double sigma_ = 0.0;
    std::vector<Eigen::MatrixXd> A_;
    std::vector<Eigen::VectorXd> b_;
};

/// sup over ball(R) of ||A(g) v|| — a lower bound for the renorming |||v|||
double renorm_estimate(const AffineAction& action, const GroupContext& ctx, const Eigen::VectorXd& v, int radius,
                       std::size_t cap = kDefaultSupportCap);

enum class GrowthBound { WordLength, Conjugacy };

/// ||A(g)|| <= C * len(g)^sigma checked exhaustively over a ball.
/// len = 0 (the identity's class) is read as plain ||A(g)|| <= C.
struct GrowthReport {
    int radius = 0;
    GrowthBound bound = GrowthBound::Conjugacy;
    double worst_ratio = 0.0;
    bool pass = true;
    Element witness;          // element attaining worst_ratio
    double witness_norm = 0.0;
};

GrowthReport verify_growth(const AffineAction& action, const GroupContext& ctx, int radius, GrowthBound bound,
                           std::size_t cap = kDefaultSupportCap);

}  // namespace hfl
