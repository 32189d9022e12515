#include "marlow/mar.hpp"

#include <algorithm>
#include <string>

namespace marlow {

AROffsets AROffsets::defaults() {
    AROffsets o;
    o.planar = {0, 1};
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) o.spatial.emplace_back(dy, dx);
    }
    return o;
}

std::vector<AROffset> AROffsets::terms() const {
    std::vector<AROffset> out;
    out.reserve(planar.size() * spatial.size());
    for (int m : planar) {
        for (auto [dy, dx] : spatial) {
            if (m == 0 && dy == 0 && dx == 0) continue;
            out.push_back({m, dy, dx});
        }
    }
    return out;
}

Eigen::MatrixXd build_support(const Image& img, const PatchGroup& group, const std::vector<AROffset>& terms,
                              int channel) {
    if (terms.empty()) throw Error("build_support: AR model has no supporting offsets");
    if (channel < 0 || channel >= img.channels()) throw Error("build_support: channel out of range");
    const int n = group.n;
    const int N = group.size();
    const int block = n * n;
    const int max_row = img.height() - 1;
    const int max_col = img.width() - 1;
    Eigen::MatrixXd support(static_cast<Eigen::Index>(block) * N, static_cast<Eigen::Index>(terms.size()));
    for (int t = 0; t < static_cast<int>(terms.size()); ++t) {
        const auto& off = terms[t];
        for (int l = 0; l < N; ++l) {
            const int plane = ((l + off.plane) % N + N) % N;
            const auto corner = group.coords[plane];
            for (int y = 0; y < n; ++y) {
                const int row = std::clamp(corner.row + y + off.dy, 0, max_row);
                for (int x = 0; x < n; ++x) {
                    const int col = std::clamp(corner.col + x + off.dx, 0, max_col);
                    support(l * block + y * n + x, t) = img.at(row, col, channel);
                }
            }
        }
    }
    return support;
}

Eigen::MatrixXd build_support(const Image& img, const PatchGroup& group, const AROffsets& offsets, int channel) {
    return build_support(img, group, offsets.terms(), channel);
}

ARSolution solve_ar(const Eigen::MatrixXd& support, const Eigen::VectorXd& target, double alpha) {
    if (target.size() != support.rows()) {
        throw Error("solve_ar: target has " + std::to_string(target.size()) + " entries, support has " +
                    std::to_string(support.rows()) + " rows");
    }
    if (!(alpha >= 0.0)) throw Error("solve_ar: alpha must be non-negative");
    const auto k = support.cols();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(support.transpose());
    gram.diagonal().array() += alpha * alpha;
    const Eigen::VectorXd rhs = support.transpose() * target;

    Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(gram);
    if (llt.info() != Eigen::Success || (alpha == 0.0 && llt.rcond() < 1e-13)) {
        throw Error("solve_ar: normal equations are singular; use alpha > 0");
    }
    ARSolution sol;
    sol.phi = llt.solve(rhs);
    // One step of iterative refinement keeps the normal-equation residual at roundoff level.
    const Eigen::MatrixXd full = gram.selfadjointView<Eigen::Lower>();
    sol.phi += llt.solve(rhs - full * sol.phi);
    sol.residual_norm = (target - support * sol.phi).norm();
    return sol;
}

Eigen::VectorXd predict(const Eigen::MatrixXd& support, const Eigen::VectorXd& phi) {
    if (phi.size() != support.cols()) {
        throw Error("predict: phi has " + std::to_string(phi.size()) + " entries, support has " +
                    std::to_string(support.cols()) + " columns");
    }
    return support * phi;
}

ARPrediction ar_predict_group(const Image& img, const PatchGroup& group, const AROffsets& offsets, double alpha) {
    const auto terms = offsets.terms();
    const int block = group.n * group.n;
    const Eigen::MatrixXd current = extract_group(img, group);
    ARPrediction out{Eigen::MatrixXd(current.rows(), current.cols()), 0.0};
    for (int ch = 0; ch < img.channels(); ++ch) {
        const Eigen::MatrixXd support = build_support(img, group, terms, ch);
        // Column-major flattening of the channel block matches the support row order.
        const Eigen::MatrixXd block_now = current.middleRows(ch * block, block);
        const Eigen::Map<const Eigen::VectorXd> target(block_now.data(), block_now.size());
        const auto sol = solve_ar(support, target, alpha);
        const Eigen::VectorXd pred = predict(support, sol.phi);
        out.patches.middleRows(ch * block, block) = Eigen::Map<const Eigen::MatrixXd>(pred.data(), block, group.size());
        out.residual_norm += sol.residual_norm;
    }
    return out;
}

}  // namespace marlow
