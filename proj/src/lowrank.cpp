#include "marlow/lowrank.hpp"

#include <string>

#include "marlow/image.hpp"

namespace marlow {

ShrinkResult svt(const Eigen::MatrixXd& a, double tau) {
    if (!(tau >= 0.0)) throw Error("svt: threshold must be non-negative");
    if (!a.allFinite()) throw Error("svt: matrix has non-finite entries");
    ShrinkResult out;
    if (a.size() == 0) {
        out.matrix = a;
        return out;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw Error("svt: SVD failed on a " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " matrix (max |a| = " + std::to_string(a.cwiseAbs().maxCoeff()) + ")");
    }
    out.singular_values_before = svd.singularValues();
    out.singular_values_after = (out.singular_values_before.array() - tau).max(0.0).matrix();
    Eigen::Index keep = 0;
    while (keep < out.singular_values_after.size() && out.singular_values_after[keep] > 0.0) ++keep;
    out.matrix = svd.matrixU().leftCols(keep) * out.singular_values_after.head(keep).asDiagonal() *
                 svd.matrixV().leftCols(keep).transpose();
    return out;
}

double fusion_weight(double mu) {
    if (!(mu > 0.0)) throw Error("mu must be positive");
    return mu / (mu + 1.0);
}

double default_threshold(double mu) { return fusion_weight(mu) / 2.0; }

Eigen::MatrixXd joint_update(const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2, double mu,
                             std::optional<double> tau_override) {
    if (y1.rows() != y2.rows() || y1.cols() != y2.cols()) {
        throw Error("joint_update: operand shapes differ");
    }
    const double lambda = fusion_weight(mu);
    const Eigen::MatrixXd fused = (1.0 - lambda) * y1 + lambda * y2;
    return svt(fused, tau_override.value_or(lambda / 2.0)).matrix;
}

double nuclear_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues().sum();
}

double joint_objective(const Eigen::MatrixXd& m, const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2, double mu) {
    return (m - y1).squaredNorm() + mu * ((m - y2).squaredNorm() + nuclear_norm(m));
}

}  // namespace marlow
