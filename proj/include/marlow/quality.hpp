#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "marlow/image.hpp"

namespace marlow {

/// PSNR returned for identical images.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct ChannelQuality {
    double psnr_db = 0.0;
    double ssim = 0.0;
};

struct QualityReport {
    double psnr_db = 0.0;  // kInfinitePsnr when the images are identical
    double ssim = 0.0;
    std::optional<std::vector<ChannelQuality>> per_channel;  // color images only
};

/// 10 log10(255^2 / MSE) with MSE over all samples on the 0-255 scale (unquantized).
double psnr(const Image& a, const Image& b);

/**
 * Mean SSIM over every 11x11 window that fits inside the image.
 *
 * Gaussian weights with sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.
 * Color images average the per-channel scores.
 */
double ssim(const Image& a, const Image& b);

QualityReport evaluate(const Image& restored, const Image& reference);

}  // namespace marlow
