#pragma once

#include <cstdint>
#include <filesystem>

#include "marlow/image.hpp"

namespace marlow {

/// Reads an 8-bit grayscale or RGB PNG, or a binary PGM/PPM with maxval 255.
/// Samples are mapped to v/255.
Image load_image(const std::filesystem::path& path);

/// Writes round-half-up(s*255) clamped to [0,255]; format follows the extension
/// (.png, .pgm, .ppm, .pnm).
void save_image(const Image& img, const std::filesystem::path& path);

/// Grayscale mask file: byte 0 = missing, anything else = known.
Mask load_mask(const std::filesystem::path& path);
/// Known pixels are written as 255, missing as 0.
void save_mask(const Mask& mask, const std::filesystem::path& path);

/// The byte save_image() stores for a sample.
std::uint8_t quantize(double sample) noexcept;

}  // namespace marlow
