#include "marlow/quality.hpp"

#include <array>
#include <cmath>
#include <string>

namespace marlow {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void check_same(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b)) {
        throw Error(std::string(what) + ": images differ in shape (" + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + "x" + std::to_string(a.channels()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()) + "x" + std::to_string(b.channels()) +
                    ")");
    }
}

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        w[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        sum += w[i];
    }
    for (auto& v : w) v /= sum;
    return w;
}

// Valid-region separable Gaussian filter of a single-channel plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int width, int height) {
    static const auto taps = gaussian_taps();
    const int ow = width - kWindow + 1;
    const int oh = height - kWindow + 1;
    std::vector<double> horiz(static_cast<std::size_t>(height) * ow);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int k = 0; k < kWindow; ++k) s += taps[k] * plane[static_cast<std::size_t>(r) * width + c + k];
            horiz[static_cast<std::size_t>(r) * ow + c] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int r = 0; r < oh; ++r) {
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int k = 0; k < kWindow; ++k) s += taps[k] * horiz[static_cast<std::size_t>(r + k) * ow + c];
            out[static_cast<std::size_t>(r) * ow + c] = s;
        }
    }
    return out;
}

double ssim_plane(const Image& a, const Image& b, int ch) {
    const int w = a.width();
    const int h = a.height();
    const std::size_t n = a.pixel_count();
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = a.data()[i * a.channels() + ch];
        y[i] = b.data()[i * b.channels() + ch];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, w, h);
    const auto my = filter_valid(y, w, h);
    const auto sxx = filter_valid(xx, w, h);
    const auto syy = filter_valid(yy, w, h);
    const auto sxy = filter_valid(xy, w, h);
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double var_x = sxx[i] - mx[i] * mx[i];
        const double var_y = syy[i] - my[i] * my[i];
        const double cov = sxy[i] - mx[i] * my[i];
        const double num = (2.0 * (mx[i] * my[i]) + kC1) * (2.0 * cov + kC2);
        const double den = (mx[i] * mx[i] + my[i] * my[i] + kC1) * (var_x + var_y + kC2);
        total += num / den;
    }
    return total / static_cast<double>(mx.size());
}

double mse_255(const Image& a, const Image& b, int ch, int stride) {
    double sum = 0.0;
    std::size_t count = 0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = static_cast<std::size_t>(ch); i < da.size(); i += static_cast<std::size_t>(stride)) {
        const double d = (da[i] - db[i]) * 255.0;
        sum += d * d;
        ++count;
    }
    return sum / static_cast<double>(count);
}

double psnr_from_mse(double mse) {
    if (mse == 0.0) return kInfinitePsnr;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace

double psnr(const Image& a, const Image& b) {
    check_same(a, b, "psnr");
    return psnr_from_mse(mse_255(a, b, 0, 1));
}

double ssim(const Image& a, const Image& b) {
    check_same(a, b, "ssim");
    if (a.width() < kWindow || a.height() < kWindow) {
        throw Error("ssim: image must be at least 11x11");
    }
    double total = 0.0;
    for (int ch = 0; ch < a.channels(); ++ch) total += ssim_plane(a, b, ch);
    return total / a.channels();
}

QualityReport evaluate(const Image& restored, const Image& reference) {
    QualityReport report;
    report.psnr_db = psnr(restored, reference);
    report.ssim = ssim(restored, reference);
    if (restored.channels() > 1) {
        std::vector<ChannelQuality> per;
        for (int ch = 0; ch < restored.channels(); ++ch) {
            per.push_back({psnr_from_mse(mse_255(restored, reference, ch, restored.channels())),
                           ssim_plane(restored, reference, ch)});
        }
        report.per_channel = std::move(per);
    }
    return report;
}

}  // namespace marlow
