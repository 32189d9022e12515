#pragma once

#include <Eigen/Dense>

#include <compare>
#include <span>
#include <vector>

#include "marlow/image.hpp"

namespace marlow {

/// Top-left corner of a patch.
struct Position {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const Position&, const Position&) = default;
};

struct PatchGeometry {
    int n = 8;               // patch side
    int channels = 1;        // h
    int stride = 4;          // distance between reference patches; overlap = n - stride
    int search_radius = 20;  // Chebyshev radius of the matching window
    int group_size = 64;     // N

    /// Throws Error if the geometry is inconsistent.
    void validate() const;
    int rows_per_patch() const noexcept { return n * n * channels; }
};

/// N similar patches; coords[0] is the reference.
struct PatchGroup {
    std::vector<Position> coords;
    int n = 0;
    int channels = 1;

    int size() const noexcept { return static_cast<int>(coords.size()); }
};

/// Reference positions on the stride lattice, with a final row/column clamped
/// to the border so every pixel is covered. Raster order.
std::vector<Position> enumerate_refs(int width, int height, const PatchGeometry& geom);

/// Sum of squared differences between two n x n x h patches of the same image.
double patch_distance(const Image& img, Position a, Position b, int n);

/**
 * Block matching on a complete image.
 *
 * Candidates are every in-bounds position within `search_radius` (Chebyshev) of
 * `ref`. The reference comes first; the remaining N-1 slots are the lowest-cost
 * candidates ordered by (cost, row, col). When the window holds fewer than N
 * candidates the search covers the whole image.
 */
PatchGroup match_patches(const Image& img, Position ref, const PatchGeometry& geom);

/**
 * Patch matrix with one column per patch.
 *
 * Column j holds patch j in row-major pixel order; for color images the
 * column is the R block, then the G block, then the B block (n*n*h rows).
 */
Eigen::MatrixXd extract_group(const Image& img, const PatchGroup& group);

/// Inverse layout of extract_group: column j of `patches` back into n x n x h samples.
void scatter_group(const Eigen::MatrixXd& patches, const PatchGroup& group, Image& sums, std::vector<double>* counts);

/// Accumulates per-patch estimates and averages them into an image.
class Aggregator {
public:
    Aggregator(int width, int height, int channels);

    void add(const PatchGroup& group, const Eigen::MatrixXd& estimate);
    /// Uniform average of every estimate covering each pixel. Throws if a pixel was never covered.
    Image finish() const;

private:
    Image sums_;
    std::vector<double> counts_;
};

struct GroupEstimate {
    PatchGroup group;
    Eigen::MatrixXd estimate;
};

/// Convenience wrapper around Aggregator; estimates are accumulated in the given order.
Image aggregate(std::span<const GroupEstimate> estimates, int width, int height, int channels);

}  // namespace marlow
