#include "marlow/degrade.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "marlow/image_io.hpp"

namespace marlow {

std::string to_string(DegradeMode mode) {
    switch (mode) {
        case DegradeMode::random: return "random";
        case DegradeMode::text: return "text";
        case DegradeMode::grid: return "grid";
    }
    return "unknown";
}

DegradeMode parse_degrade_mode(const std::string& name) {
    if (name == "random") return DegradeMode::random;
    if (name == "text") return DegradeMode::text;
    if (name == "grid") return DegradeMode::grid;
    throw Error("unknown degradation mode '" + name + "'");
}

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw Error("bounded_draw: bound must be positive");
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    // 2^64 mod bound; accepted draws cover [0, 2^64 - excess), a multiple of bound.
    const std::uint64_t excess = (kMax % bound + 1) % bound;
    const std::uint64_t last_accepted = kMax - excess;
    for (;;) {
        const std::uint64_t x = rng();
        if (x <= last_accepted) return x % bound;
    }
}

Mask random_mask(int width, int height, double missing_rate, std::uint64_t seed) {
    if (!(missing_rate >= 0.0 && missing_rate <= 1.0)) {
        throw Error("missing rate must lie in [0,1], got " + std::to_string(missing_rate));
    }
    Mask mask(width, height, true);
    const std::size_t total = mask.pixel_count();
    const auto missing = static_cast<std::size_t>(std::llround(missing_rate * static_cast<double>(total)));

    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < missing; ++i) {
        const auto j = i + static_cast<std::size_t>(bounded_draw(rng, total - i));
        std::swap(order[i], order[j]);
        mask.set(static_cast<int>(order[i] / width), static_cast<int>(order[i] % width), false);
    }
    return mask;
}

Mask text_mask(const Image& mask_img) {
    if (mask_img.channels() != 1) throw Error("text mask image must be grayscale");
    Mask mask(mask_img.width(), mask_img.height(), true);
    for (int r = 0; r < mask_img.height(); ++r) {
        for (int c = 0; c < mask_img.width(); ++c) {
            if (mask_img.at(r, c) > 0.5) mask.set(r, c, false);
        }
    }
    return mask;
}

Mask grid_mask(int width, int height, int factor) {
    if (factor < 2) throw Error("grid factor must be >= 2, got " + std::to_string(factor));
    Mask mask(width, height, false);
    for (int r = 0; r < height; r += factor) {
        for (int c = 0; c < width; c += factor) mask.set(r, c, true);
    }
    return mask;
}

Mask make_mask(const DegradeSpec& spec, int width, int height) {
    switch (spec.mode) {
        case DegradeMode::random:
            return random_mask(width, height, spec.missing_rate, spec.seed);
        case DegradeMode::grid:
            return grid_mask(width, height, spec.factor);
        case DegradeMode::text: {
            auto m = text_mask(load_image(spec.text_mask_path));
            if (m.width() != width || m.height() != height) {
                throw Error("text mask '" + spec.text_mask_path.string() + "' does not match the image size");
            }
            return m;
        }
    }
    throw Error("unhandled degradation mode");
}

}  // namespace marlow
