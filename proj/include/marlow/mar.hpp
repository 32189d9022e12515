#pragma once

#include <Eigen/Dense>

#include <vector>

#include "marlow/image.hpp"
#include "marlow/patchwork.hpp"

namespace marlow {

/// One supporting-pixel offset: `plane` steps along the ordered patch group,
/// (`dy`, `dx`) step spatially inside the image.
struct AROffset {
    int plane = 0;
    int dy = 0;
    int dx = 0;
    friend bool operator==(const AROffset&, const AROffset&) = default;
};

/**
 * Supporting-pixel offsets of the multiplanar AR model.
 *
 * The model order is |planar| x |spatial| minus the null combination
 * (0, 0, 0), which would let a pixel predict itself.
 */
struct AROffsets {
    std::vector<int> planar;
    std::vector<std::pair<int, int>> spatial;  // (dy, dx)

    /// planar {0, 1} x spatial 3x3 window, null offset removed: order 17.
    static AROffsets defaults();

    /// The expanded offset list in (planar, spatial) order with the null offset removed.
    std::vector<AROffset> terms() const;
    int order() const { return static_cast<int>(terms().size()); }
};

struct ARSolution {
    Eigen::VectorXd phi;
    double residual_norm = 0.0;
};

/**
 * Support (design) matrix of one channel of a patch group.
 *
 * Row l*n*n + y*n + x models pixel (y, x) of patch l. Column t holds the image
 * sample at patch (l + plane_t) mod N, position (y + dy_t, x + dx_t) relative to
 * that patch's corner, with the spatial coordinate clamped to the image.
 */
Eigen::MatrixXd build_support(const Image& img, const PatchGroup& group, const std::vector<AROffset>& terms,
                              int channel = 0);
Eigen::MatrixXd build_support(const Image& img, const PatchGroup& group, const AROffsets& offsets, int channel = 0);

/// Ridge solution of (S^T S + alpha^2 I) phi = S^T target via Cholesky.
/// Throws Error when alpha == 0 and S^T S is singular.
ARSolution solve_ar(const Eigen::MatrixXd& support, const Eigen::VectorXd& target, double alpha);

Eigen::VectorXd predict(const Eigen::MatrixXd& support, const Eigen::VectorXd& phi);

struct ARPrediction {
    Eigen::MatrixXd patches;     // same layout as extract_group
    double residual_norm = 0.0;  // summed over channels
};

/**
 * Fits one AR parameter vector per channel (the block-diagonal color system
 * decomposes into independent per-channel problems) with the group's own
 * current samples as the target, and returns the prediction in patch-matrix
 * layout.
 */
ARPrediction ar_predict_group(const Image& img, const PatchGroup& group, const AROffsets& offsets, double alpha);

}  // namespace marlow
