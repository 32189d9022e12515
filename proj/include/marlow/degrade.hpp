#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "marlow/image.hpp"

namespace marlow {

enum class DegradeMode { random, text, grid };

struct DegradeSpec {
    DegradeMode mode = DegradeMode::random;
    double missing_rate = 0.8;                 // random
    std::filesystem::path text_mask_path;      // text
    int factor = 2;                            // grid
    std::uint64_t seed = 0;                    // random
};

std::string to_string(DegradeMode mode);
DegradeMode parse_degrade_mode(const std::string& name);

/**
 * Uniform integer in [0, bound) drawn from a 64-bit Mersenne Twister.
 *
 * std::uniform_int_distribution is implementation-defined, so the reduction is
 * done here: draws at or above the largest multiple of `bound` are rejected and
 * the remainder of the accepted draw is returned. Together with the fully
 * specified std::mt19937_64 engine this makes every mask bit-reproducible
 * across platforms and standard libraries.
 */
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound);

/// Exactly round(missing_rate * width * height) pixels marked missing, chosen by a
/// partial Fisher-Yates shuffle of the raster indices.
Mask random_mask(int width, int height, double missing_rate, std::uint64_t seed);

/// Pixels whose sample exceeds 0.5 (text strokes) are missing.
Mask text_mask(const Image& mask_img);

/// Pixel (r, c) is known iff r and c are both multiples of `factor`.
Mask grid_mask(int width, int height, int factor);

/// Builds the mask for `spec` over a width x height canvas.
Mask make_mask(const DegradeSpec& spec, int width, int height);

}  // namespace marlow
