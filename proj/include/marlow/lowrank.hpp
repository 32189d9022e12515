#pragma once

#include <Eigen/Dense>

#include <optional>

namespace marlow {

struct ShrinkResult {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd singular_values_before;  // non-increasing
    Eigen::VectorXd singular_values_after;   // max(before - tau, 0)
};

/// Singular value soft thresholding: U * max(S - tau, 0) * V^T.
ShrinkResult svt(const Eigen::MatrixXd& a, double tau);

/// mu / (mu + 1): the weight the fidelity term gets in the fused target.
double fusion_weight(double mu);

/// Threshold that makes svt() the exact minimizer of the fused objective: lambda / 2.
double default_threshold(double mu);

/**
 * Minimizer over M of ||M - y1||^2 + mu (||M - y2||^2 + ||M||_*).
 *
 * Completing the square gives (1 + mu) ||M - y'||^2 + mu ||M||_* with
 * y' = (1 - lambda) y1 + lambda y2, so M = svt(y', lambda / 2).
 * `tau_override` replaces lambda / 2 for experiments.
 */
Eigen::MatrixXd joint_update(const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2, double mu,
                             std::optional<double> tau_override = std::nullopt);

/// The objective joint_update() minimizes, for tests and diagnostics.
double joint_objective(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2, double mu);

double nuclear_norm(const Eigen::MatrixXd& a);

}  // namespace marlow
