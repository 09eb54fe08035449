#include "hfl/nnls.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace hfl {

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, int max_iterations, double tol) {
    const int n = static_cast<int>(a.cols());
    if (y.size() != a.rows()) throw std::invalid_argument("nnls dimension mismatch");
    if (max_iterations <= 0) max_iterations = 3 * n + 30;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    Eigen::VectorXd gradient = a.transpose() * (y - a * x);

    for (int outer = 0; outer < max_iterations; ++outer) {
        // most improving free variable
        int best = -1;
        double best_grad = tol;
        for (int i = 0; i < n; ++i)
            if (!passive[static_cast<std::size_t>(i)] && gradient(i) > best_grad) {
                best_grad = gradient(i);
                best = i;
            }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        for (int inner = 0; inner < max_iterations; ++inner) {
            std::vector<int> idx;
            for (int i = 0; i < n; ++i)
                if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
            Eigen::MatrixXd sub(a.rows(), static_cast<int>(idx.size()));
            for (int c = 0; c < static_cast<int>(idx.size()); ++c) sub.col(c) = a.col(idx[static_cast<std::size_t>(c)]);
            Eigen::VectorXd z = sub.completeOrthogonalDecomposition().solve(y);

            double alpha = 1.0;
            for (int c = 0; c < static_cast<int>(idx.size()); ++c) {
                if (z(c) <= 0.0) {
                    double xi = x(idx[static_cast<std::size_t>(c)]);
                    double denom = xi - z(c);
                    if (denom > 0.0) alpha = std::min(alpha, xi / denom);
                }
            }
            if (alpha >= 1.0) {
                x.setZero();
                for (int c = 0; c < static_cast<int>(idx.size()); ++c) x(idx[static_cast<std::size_t>(c)]) = z(c);
                break;
            }
            // move as far as feasibility allows, then drop boundary variables
            Eigen::VectorXd znew = Eigen::VectorXd::Zero(n);
            for (int c = 0; c < static_cast<int>(idx.size()); ++c) znew(idx[static_cast<std::size_t>(c)]) = z(c);
            x += alpha * (znew - x);
            for (int i = 0; i < n; ++i)
                if (passive[static_cast<std::size_t>(i)] && x(i) <= tol) {
                    passive[static_cast<std::size_t>(i)] = false;
                    x(i) = 0.0;
                }
        }
        gradient = a.transpose() * (y - a * x);
    }
    return x;
}

Eigen::VectorXd simplex_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
    const double penalty = 1e4 * std::max(1.0, a.cwiseAbs().maxCoeff());
    Eigen::MatrixXd aug(a.rows() + 1, a.cols());
    aug.topRows(a.rows()) = a;
    aug.bottomRows(1).setConstant(penalty);
    Eigen::VectorXd yaug(y.size() + 1);
    yaug.head(y.size()) = y;
    yaug(y.size()) = penalty;
    Eigen::VectorXd x = nnls(aug, yaug);
    double total = x.sum();
    if (total <= 0.0) throw std::runtime_error("simplex fit collapsed to zero");
    return x / total;
}

}  // namespace hfl
