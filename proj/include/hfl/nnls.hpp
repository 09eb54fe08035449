#pragma once

#include <Eigen/Dense>

namespace hfl {

/// Lawson-Hanson active-set solver for min ||A x - y||_2 subject to x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, int max_iterations = 0, double tol = 1e-12);

/// Nonnegative least squares constrained to the probability simplex
/// (sum x = 1 enforced by penalty, then renormalized).
Eigen::VectorXd simplex_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y);

}  // namespace hfl
