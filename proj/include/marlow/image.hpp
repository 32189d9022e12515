#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace marlow {

/// Raised for every recoverable failure in the library (bad input, I/O, numerics).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Dense raster with 1 or 3 channels of real samples.
 *
 * Samples are stored row-major with channels interleaved:
 * sample (row, col, ch) lives at data[(row * width + col) * channels + ch].
 *
 * Images produced by load_image() hold samples in [0,1]. The solver also keeps
 * its unclamped intermediate estimates in this type, so the range is not
 * enforced on construction; is_normalized() checks it.
 */
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, double fill = 0.0);
    Image(int width, int height, int channels, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& at(int row, int col, int ch = 0) noexcept { return data_[index(row, col, ch)]; }
    double at(int row, int col, int ch = 0) const noexcept { return data_[index(row, col, ch)]; }

    std::size_t index(int row, int col, int ch = 0) const noexcept {
        return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_shape(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }
    bool is_normalized() const noexcept;

    /// Single channel `ch` as a grayscale image.
    Image channel(int ch) const;
    /// Interleaves equally sized grayscale planes into one image.
    static Image merge(std::span<const Image> planes);

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Boolean raster; true marks an observed (known) pixel.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, bool known);
    Mask(int width, int height, std::vector<std::uint8_t> known);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return known_.size(); }

    bool known(int row, int col) const noexcept { return known_[static_cast<std::size_t>(row) * width_ + col] != 0; }
    void set(int row, int col, bool known) noexcept { known_[static_cast<std::size_t>(row) * width_ + col] = known ? 1 : 0; }

    std::size_t known_count() const noexcept;
    std::size_t missing_count() const noexcept { return pixel_count() - known_count(); }

    /// Raw 0/1 bytes, row-major.
    std::span<const std::uint8_t> raw() const noexcept { return known_; }

    bool matches(const Image& img) const noexcept { return width_ == img.width() && height_ == img.height(); }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> known_;
};

/// Copies `img` at known pixels and writes `fill` into every channel of missing ones.
Image apply_mask(const Image& img, const Mask& mask, double fill = 0.0);

/// Clamps every sample into [0,1].
Image clamped(Image img);

}  // namespace marlow
