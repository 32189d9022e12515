#include "marlow/image.hpp"

#include <algorithm>
#include <numeric>

namespace marlow {

namespace {

void check_dims(int width, int height, int channels) {
    if (width <= 0 || height <= 0) {
        throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
    }
    if (channels != 1 && channels != 3) {
        throw Error("image must have 1 or 3 channels, got " + std::to_string(channels));
    }
}

}  // namespace

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    check_dims(width, height, channels);
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_dims(width, height, channels);
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw Error("image data length " + std::to_string(data_.size()) + " does not match " +
                    std::to_string(width) + "x" + std::to_string(height) + "x" + std::to_string(channels));
    }
}

bool Image::is_normalized() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double s) { return s >= 0.0 && s <= 1.0; });
}

Image Image::channel(int ch) const {
    if (ch < 0 || ch >= channels_) throw Error("channel index out of range");
    Image out(width_, height_, 1);
    for (std::size_t p = 0; p < pixel_count(); ++p) out.data_[p] = data_[p * channels_ + ch];
    return out;
}

Image Image::merge(std::span<const Image> planes) {
    if (planes.empty()) throw Error("merge: no planes");
    const auto& first = planes.front();
    const int ch = static_cast<int>(planes.size());
    Image out(first.width(), first.height(), ch);
    for (int k = 0; k < ch; ++k) {
        const auto& p = planes[k];
        if (p.channels() != 1 || p.width() != first.width() || p.height() != first.height()) {
            throw Error("merge: planes must be equally sized grayscale images");
        }
        for (std::size_t i = 0; i < out.pixel_count(); ++i) out.data_[i * ch + k] = p.data_[i];
    }
    return out;
}

Mask::Mask(int width, int height, bool known) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw Error("mask dimensions must be positive");
    known_.assign(static_cast<std::size_t>(width) * height, known ? 1 : 0);
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> known)
    : width_(width), height_(height), known_(std::move(known)) {
    if (width <= 0 || height <= 0) throw Error("mask dimensions must be positive");
    if (known_.size() != static_cast<std::size_t>(width) * height) throw Error("mask data length mismatch");
    for (auto& k : known_) k = k ? 1 : 0;
}

std::size_t Mask::known_count() const noexcept {
    return static_cast<std::size_t>(std::count(known_.begin(), known_.end(), std::uint8_t{1}));
}

Image apply_mask(const Image& img, const Mask& mask, double fill) {
    if (!mask.matches(img)) {
        throw Error("apply_mask: mask is " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()) +
                    ", image is " + std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
    Image out = img;
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            if (mask.known(r, c)) continue;
            for (int k = 0; k < img.channels(); ++k) out.at(r, c, k) = fill;
        }
    }
    return out;
}

Image clamped(Image img) {
    for (auto& s : img.data()) s = std::clamp(s, 0.0, 1.0);
    return img;
}

}  // namespace marlow
