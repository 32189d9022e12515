#include "marlow/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

#include "marlow/lowrank.hpp"
#include "marlow/quality.hpp"
#include "parallel.hpp"

namespace marlow {

namespace {

// Groups processed between two ordered aggregation steps; bounds peak memory.
constexpr std::size_t kChunk = 256;

void reinsert_known(Image& estimate, const Image& degraded, const Mask& mask) {
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask.known(r, c)) continue;
            for (int k = 0; k < estimate.channels(); ++k) estimate.at(r, c, k) = degraded.at(r, c, k);
        }
    }
}

SolverConfig per_channel_config(const SolverConfig& cfg) {
    SolverConfig plane = cfg;
    plane.channels = 1;
    plane.mode = SolverMode::marlow;
    return plane;
}

// SSIM is undefined below the 11x11 window; traces just omit it there.
std::optional<double> ssim_if_windowed(const Image& a, const Image& b) {
    if (a.width() < 11 || a.height() < 11) return std::nullopt;
    return ssim(a, b);
}

struct Neighbor {
    int distance = 0;  // 0 = none in that direction
    std::size_t pixel = 0;
};

}  // namespace

std::string to_string(SolverMode mode) {
    switch (mode) {
        case SolverMode::marlow: return "marlow";
        case SolverMode::lowrank_only: return "lowrank_only";
        case SolverMode::color_separate: return "color_separate";
        case SolverMode::color_simultaneous: return "color_simultaneous";
    }
    return "unknown";
}

SolverMode parse_solver_mode(const std::string& name) {
    if (name == "marlow") return SolverMode::marlow;
    if (name == "lowrank_only" || name == "lowrank-only") return SolverMode::lowrank_only;
    if (name == "color_separate" || name == "separate") return SolverMode::color_separate;
    if (name == "color_simultaneous" || name == "simultaneous") return SolverMode::color_simultaneous;
    throw Error("unknown solver mode '" + name + "'");
}

SolverConfig SolverConfig::gray_defaults() { return SolverConfig{}; }

SolverConfig SolverConfig::color_defaults() {
    SolverConfig cfg;
    cfg.n = 5;
    cfg.channels = 3;
    cfg.stride = 4;
    cfg.group_size = 75;
    cfg.mode = SolverMode::color_simultaneous;
    return cfg;
}

SolverConfig SolverConfig::defaults_for(int channels) {
    return channels == 3 ? color_defaults() : gray_defaults();
}

void SolverConfig::validate() const {
    geometry().validate();
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error("alpha must be a finite non-negative number");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw Error("mu must be a finite positive number");
    if (tau_override && !(*tau_override >= 0.0)) throw Error("tau must be non-negative");
    if (max_iter < 0) throw Error("max_iter must be >= 0");
    if (threads < 1) throw Error("threads must be >= 1");
    if (offsets.terms().empty()) throw Error("AR offsets must contain at least one non-null offset");
    if ((mode == SolverMode::color_separate || mode == SolverMode::color_simultaneous) && channels != 3) {
        throw Error("mode " + to_string(mode) + " requires a 3-channel image");
    }
}

double SolverConfig::tau() const { return tau_override.value_or(default_threshold(mu)); }

PatchGeometry SolverConfig::geometry() const {
    return PatchGeometry{n, channels, stride, search_radius, group_size};
}

Image initialize(const Image& degraded, const Mask& mask) {
    if (!mask.matches(degraded)) throw Error("initialize: mask and image sizes differ");
    if (mask.known_count() == 0) throw Error("initialize: every pixel is missing");
    const int w = degraded.width();
    const int h = degraded.height();
    const int ch = degraded.channels();
    Image out = degraded;
    std::vector<std::uint8_t> known(mask.raw().begin(), mask.raw().end());
    auto idx = [w](int r, int c) { return static_cast<std::size_t>(r) * w + c; };

    while (std::find(known.begin(), known.end(), std::uint8_t{0}) != known.end()) {
        // Nearest known pixel in each axis direction, from the state at the start of the pass.
        std::vector<std::array<Neighbor, 4>> near(known.size());
        for (int r = 0; r < h; ++r) {
            int last = -1;
            for (int c = 0; c < w; ++c) {
                if (known[idx(r, c)]) last = c;
                else if (last >= 0) near[idx(r, c)][0] = {c - last, idx(r, last)};
            }
            last = -1;
            for (int c = w - 1; c >= 0; --c) {
                if (known[idx(r, c)]) last = c;
                else if (last >= 0) near[idx(r, c)][1] = {last - c, idx(r, last)};
            }
        }
        for (int c = 0; c < w; ++c) {
            int last = -1;
            for (int r = 0; r < h; ++r) {
                if (known[idx(r, c)]) last = r;
                else if (last >= 0) near[idx(r, c)][2] = {r - last, idx(last, c)};
            }
            last = -1;
            for (int r = h - 1; r >= 0; --r) {
                if (known[idx(r, c)]) last = r;
                else if (last >= 0) near[idx(r, c)][3] = {last - r, idx(last, c)};
            }
        }

        std::vector<std::size_t> filled;
        const auto data = out.data();
        for (std::size_t p = 0; p < known.size(); ++p) {
            if (known[p]) continue;
            double weight = 0.0;
            double acc[3] = {0.0, 0.0, 0.0};
            for (const auto& nb : near[p]) {
                if (nb.distance == 0) continue;
                const double wgt = 1.0 / nb.distance;
                weight += wgt;
                for (int k = 0; k < ch; ++k) acc[k] += wgt * data[nb.pixel * ch + k];
            }
            if (weight == 0.0) continue;
            for (int k = 0; k < ch; ++k) data[p * ch + k] = acc[k] / weight;
            filled.push_back(p);
        }
        // Cannot happen with at least one known pixel; guards against an infinite loop.
        if (filled.empty()) throw Error("initialize: unable to propagate known samples");
        for (auto p : filled) known[p] = 1;
    }
    return out;
}

GroupUpdate update_group(const Image& current, Position ref, const SolverConfig& cfg) {
    GroupUpdate up;
    up.group = match_patches(current, ref, cfg.geometry());
    const Eigen::MatrixXd y2 = extract_group(current, up.group);
    const double tau = cfg.tau();
    if (cfg.mode == SolverMode::lowrank_only) {
        up.estimate = joint_update(y2, y2, cfg.mu, tau);
    } else {
        const auto ar = ar_predict_group(current, up.group, cfg.offsets, cfg.alpha);
        up.estimate = joint_update(ar.patches, y2, cfg.mu, tau);
    }
    up.residual = (up.estimate - y2).norm() / std::sqrt(static_cast<double>(y2.size()));
    return up;
}

Image iterate_once(const Image& current, const SolverConfig& cfg, double* mean_residual) {
    if (current.channels() != cfg.channels) {
        throw Error("solver: image has " + std::to_string(current.channels()) + " channels, config expects " +
                    std::to_string(cfg.channels));
    }
    const auto refs = enumerate_refs(current.width(), current.height(), cfg.geometry());
    Aggregator acc(current.width(), current.height(), current.channels());
    std::vector<GroupUpdate> slots;
    double residual_sum = 0.0;
    for (std::size_t begin = 0; begin < refs.size(); begin += kChunk) {
        const std::size_t count = std::min(kChunk, refs.size() - begin);
        slots.assign(count, GroupUpdate{});
        detail::parallel_for(count, cfg.threads,
                             [&](std::size_t i) { slots[i] = update_group(current, refs[begin + i], cfg); });
        for (const auto& s : slots) {
            acc.add(s.group, s.estimate);
            residual_sum += s.residual;
        }
    }
    if (mean_residual) *mean_residual = residual_sum / static_cast<double>(refs.size());
    return acc.finish();
}

CompletionResult complete(const Image& degraded, const Mask& mask, const SolverConfig& cfg, const Image* reference,
                          const ProgressFn& progress) {
    cfg.validate();
    if (!mask.matches(degraded)) throw Error("complete: mask and image sizes differ");
    if (degraded.channels() != cfg.channels) {
        throw Error("complete: image has " + std::to_string(degraded.channels()) + " channels, config expects " +
                    std::to_string(cfg.channels));
    }
    if (reference && !reference->same_shape(degraded)) throw Error("complete: reference shape differs from input");

    CompletionResult result;
    Image current = initialize(degraded, mask);
    if (reference) {
        const Image start = clamped(current);
        result.initial_psnr_db = psnr(start, *reference);
        result.initial_ssim = ssim_if_windowed(start, *reference);
    }

    const bool separate = cfg.mode == SolverMode::color_separate;
    const SolverConfig plane_cfg = per_channel_config(cfg);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.iteration = it;
        Image next;
        if (separate) {
            std::vector<Image> planes;
            double residual = 0.0;
            for (int k = 0; k < current.channels(); ++k) {
                double r = 0.0;
                planes.push_back(iterate_once(current.channel(k), plane_cfg, &r));
                residual += r;
            }
            next = Image::merge(planes);
            rec.mean_group_residual = residual / current.channels();
        } else {
            next = iterate_once(current, cfg, &rec.mean_group_residual);
        }
        reinsert_known(next, degraded, mask);
        current = std::move(next);
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (reference) {
            const Image snapshot = clamped(current);
            rec.psnr_db = psnr(snapshot, *reference);
            rec.ssim = ssim_if_windowed(snapshot, *reference);
        }
        result.trace.push_back(rec);
        if (progress) progress(rec);
    }
    result.image = clamped(std::move(current));
    return result;
}

CompletionResult complete_color(const Image& degraded, const Mask& mask, const SolverConfig& cfg,
                                const Image* reference, const ProgressFn& progress) {
    if (degraded.channels() != 3) throw Error("complete_color: expected a 3-channel image");
    if (cfg.mode != SolverMode::color_separate && cfg.mode != SolverMode::color_simultaneous) {
        throw Error("complete_color: mode must be color_separate or color_simultaneous");
    }
    return complete(degraded, mask, cfg, reference, progress);
}

}  // namespace marlow
