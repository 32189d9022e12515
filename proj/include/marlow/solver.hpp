#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "marlow/image.hpp"
#include "marlow/mar.hpp"
#include "marlow/patchwork.hpp"

namespace marlow {

enum class SolverMode {
    marlow,              // AR prediction fused with the low-rank prox
    lowrank_only,        // low-rank prox on the group alone
    color_separate,      // gray pipeline run independently on each channel
    color_simultaneous,  // channel-stacked groups, per-channel AR
};

std::string to_string(SolverMode mode);
/// Accepts the enum names and the CLI spellings (lowrank-only, separate, simultaneous).
SolverMode parse_solver_mode(const std::string& name);

struct SolverConfig {
    int n = 8;
    int channels = 1;
    int stride = 4;
    int group_size = 64;
    int search_radius = 20;
    double alpha = 3.1622776601683795;  // sqrt(10)
    double mu = 10.0;
    std::optional<double> tau_override;
    int max_iter = 8;
    AROffsets offsets = AROffsets::defaults();
    SolverMode mode = SolverMode::marlow;
    int threads = 1;  // does not affect results

    /// n = 8, stride 4, N = 64.
    static SolverConfig gray_defaults();
    /// n = 5, stride 4, N = 75, color_simultaneous.
    static SolverConfig color_defaults();
    static SolverConfig defaults_for(int channels);

    void validate() const;
    double tau() const;
    PatchGeometry geometry() const;
};

struct IterationRecord {
    int iteration = 0;
    std::optional<double> psnr_db;      // against the reference, when one is given
    std::optional<double> ssim;
    double mean_group_residual = 0.0;   // RMS of (group estimate - current group samples), averaged over groups
    double seconds = 0.0;
};

using IterationTrace = std::vector<IterationRecord>;
using ProgressFn = std::function<void(const IterationRecord&)>;

struct CompletionResult {
    Image image;                          // clamped to [0,1]
    IterationTrace trace;
    std::optional<double> initial_psnr_db;
    std::optional<double> initial_ssim;
};

/**
 * Scattered-sample initialization.
 *
 * Each missing pixel becomes the inverse-distance weighted mean of the nearest
 * known pixel left, right, above and below it (weights 1/distance, absent
 * directions skipped). Pixels whose row and column hold no known sample are
 * filled by a second pass that treats first-pass pixels as known; on a regular
 * sampling lattice this reproduces bilinear interpolation.
 */
Image initialize(const Image& degraded, const Mask& mask);

struct GroupUpdate {
    PatchGroup group;
    Eigen::MatrixXd estimate;
    double residual = 0.0;
};

/// Matching, AR fit and prediction, and the fused low-rank update for one reference patch.
/// `current` must have cfg.channels channels; color_separate is handled by complete().
GroupUpdate update_group(const Image& current, Position ref, const SolverConfig& cfg);

/// One outer iteration without known-pixel reinsertion: every group updated and aggregated.
Image iterate_once(const Image& current, const SolverConfig& cfg, double* mean_residual = nullptr);

/// Full completion loop. Known pixels of the result equal `degraded` exactly.
CompletionResult complete(const Image& degraded, const Mask& mask, const SolverConfig& cfg,
                          const Image* reference = nullptr, const ProgressFn& progress = {});

/// complete() restricted to 3-channel input in one of the two color modes.
CompletionResult complete_color(const Image& degraded, const Mask& mask, const SolverConfig& cfg,
                                const Image* reference = nullptr, const ProgressFn& progress = {});

}  // namespace marlow
