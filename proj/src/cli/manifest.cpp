#include "manifest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace marlow::cli {

json to_json(const SolverConfig& cfg) {
    json spatial = json::array();
    for (auto [dy, dx] : cfg.offsets.spatial) spatial.push_back({dy, dx});
    return json{
        {"mode", to_string(cfg.mode)},
        {"n", cfg.n},
        {"channels", cfg.channels},
        {"stride", cfg.stride},
        {"group_size", cfg.group_size},
        {"search_radius", cfg.search_radius},
        {"alpha", cfg.alpha},
        {"mu", cfg.mu},
        {"tau", cfg.tau()},
        {"tau_override", cfg.tau_override ? json(*cfg.tau_override) : json(nullptr)},
        {"max_iter", cfg.max_iter},
        {"threads", cfg.threads},
        {"offsets", {{"planar", cfg.offsets.planar}, {"spatial", spatial}}},
    };
}

SolverConfig config_from_json(const json& j) {
    try {
        SolverConfig cfg;
        cfg.mode = parse_solver_mode(j.at("mode").get<std::string>());
        cfg.n = j.at("n").get<int>();
        cfg.channels = j.at("channels").get<int>();
        cfg.stride = j.at("stride").get<int>();
        cfg.group_size = j.at("group_size").get<int>();
        cfg.search_radius = j.at("search_radius").get<int>();
        cfg.alpha = j.at("alpha").get<double>();
        cfg.mu = j.at("mu").get<double>();
        if (j.contains("tau_override") && !j.at("tau_override").is_null()) {
            cfg.tau_override = j.at("tau_override").get<double>();
        }
        cfg.max_iter = j.at("max_iter").get<int>();
        cfg.threads = j.value("threads", 1);
        const auto& off = j.at("offsets");
        cfg.offsets.planar = off.at("planar").get<std::vector<int>>();
        cfg.offsets.spatial.clear();
        for (const auto& p : off.at("spatial")) cfg.offsets.spatial.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        return cfg;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed solver config in manifest: ") + e.what());
    }
}

json to_json(const DegradeSpec& spec) {
    json j{{"mode", to_string(spec.mode)}};
    switch (spec.mode) {
        case DegradeMode::random:
            j["missing_rate"] = spec.missing_rate;
            j["seed"] = spec.seed;
            break;
        case DegradeMode::text: j["text_mask"] = spec.text_mask_path.string(); break;
        case DegradeMode::grid: j["factor"] = spec.factor; break;
    }
    return j;
}

DegradeSpec degrade_spec_from_json(const json& j) {
    try {
        DegradeSpec spec;
        spec.mode = parse_degrade_mode(j.at("mode").get<std::string>());
        switch (spec.mode) {
            case DegradeMode::random:
                spec.missing_rate = j.at("missing_rate").get<double>();
                spec.seed = j.at("seed").get<std::uint64_t>();
                break;
            case DegradeMode::text: spec.text_mask_path = j.at("text_mask").get<std::string>(); break;
            case DegradeMode::grid: spec.factor = j.at("factor").get<int>(); break;
        }
        return spec;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed degradation spec in manifest: ") + e.what());
    }
}

json to_json(const IterationTrace& trace) {
    json arr = json::array();
    for (const auto& r : trace) {
        json row{{"iteration", r.iteration}, {"mean_group_residual", r.mean_group_residual}, {"seconds", r.seconds}};
        if (r.psnr_db) row["psnr_db"] = std::isinf(*r.psnr_db) ? json("inf") : json(*r.psnr_db);
        if (r.ssim) row["ssim"] = *r.ssim;
        arr.push_back(std::move(row));
    }
    return arr;
}

std::string format_psnr(double psnr_db) {
    if (std::isinf(psnr_db)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", psnr_db);
    return buf;
}

std::string format_ssim(double ssim) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", ssim);
    return buf;
}

std::string quality_json(const QualityReport& q) {
    const auto p = format_psnr(q.psnr_db);
    return "{\"psnr_db\": " + (std::isinf(q.psnr_db) ? "\"" + p + "\"" : p) + ", \"ssim\": " + format_ssim(q.ssim) + "}";
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace marlow::cli
