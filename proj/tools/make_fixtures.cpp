// Regenerates the synthetic test images under tests/fixtures/.
//
//   make_fixtures <output-dir>
//
// Each image is rendered analytically with 4x4 supersampling, so the files are
// reproducible from this source alone.

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>

#include "marlow/image.hpp"
#include "marlow/image_io.hpp"

namespace {

using marlow::Image;
using Shader = std::function<void(double y, double x, double* rgb)>;

Image render(int size, int channels, const Shader& shade) {
    constexpr int kSuper = 4;
    Image img(size, size, channels);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            double acc[3] = {0, 0, 0};
            for (int sy = 0; sy < kSuper; ++sy) {
                for (int sx = 0; sx < kSuper; ++sx) {
                    double rgb[3] = {0, 0, 0};
                    shade(r + (sy + 0.5) / kSuper, c + (sx + 0.5) / kSuper, rgb);
                    for (int k = 0; k < 3; ++k) acc[k] += rgb[k];
                }
            }
            for (int k = 0; k < channels; ++k) img.at(r, c, k) = acc[k] / (kSuper * kSuper);
        }
    }
    return marlow::clamped(std::move(img));
}

// 8x8-periodic tile: oriented sinusoidal stripes.
double periodic_tile(double y, double x) {
    constexpr double pi = std::numbers::pi;
    return 0.5 + 0.35 * std::sin(2 * pi * (x + y) / 8.0);
}

// Oriented step edges, thin lines, a disc and a stripe field.
double edge_scene(double y, double x) {
    constexpr double pi = std::numbers::pi;
    double s = 0.3 + 0.2 * x / 64.0;
    if (y > 0.6 * x + 6.0) s += 0.3;
    if (std::hypot(y - 40.0, x - 22.0) < 13.0) s = 0.85;
    if (std::fabs(y + 1.4 * x - 80.0) < 1.2) s = 0.1;
    if (x > 40.0 && y < 30.0) {
        const double t = std::cos(pi / 6) * x + std::sin(pi / 6) * y;
        s = std::fmod(t, 6.0) < 3.0 ? 0.9 : 0.2;
    }
    if (std::fabs(x - 34.0) < 1.0 && y > 36.0) s = 0.95;
    return s;
}

void color_scene(double y, double x, double* rgb) {
    constexpr double pi = std::numbers::pi;
    const double lum = periodic_tile(y, x);
    const double hue = 0.5 + 0.5 * std::sin(2 * pi * (x + 2.0 * y) / 32.0);
    rgb[0] = 0.15 + 0.8 * lum * (0.6 + 0.4 * hue);
    rgb[1] = 0.1 + 0.7 * lum * (1.0 - 0.5 * hue);
    rgb[2] = 0.9 - 0.7 * lum + 0.1 * hue;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    try {
        marlow::save_image(render(64, 1, [](double y, double x, double* v) { v[0] = periodic_tile(y, x); }),
                           dir / "periodic_texture.png");
        marlow::save_image(render(64, 1, [](double y, double x, double* v) { v[0] = edge_scene(y, x); }),
                           dir / "edges.png");
        marlow::save_image(render(64, 3, color_scene), dir / "color_texture.png");
    } catch (const std::exception& e) {
        std::cerr << "make_fixtures: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
