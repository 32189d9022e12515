#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "marlow/cli.hpp"
#include "marlow/image_io.hpp"

namespace marlow::cli {

namespace {

namespace fs = std::filesystem;

struct DegradeArgs {
    std::string input;
    std::optional<double> rate;
    std::optional<std::string> text_mask;
    std::optional<int> grid;
    std::uint64_t seed = 0;
    std::string outdir;
    std::optional<std::string> from_manifest;
};

struct CompleteArgs {
    std::string degraded;
    std::string mask;
    std::string output;
    std::optional<std::string> mode;
    std::optional<int> n;
    std::optional<int> group_size;
    std::optional<int> stride;
    std::optional<double> alpha;
    std::optional<double> mu;
    std::optional<double> tau;
    std::optional<int> iters;
    std::optional<int> radius;
    std::optional<int> threads;
    std::optional<std::vector<int>> planar;
    std::optional<int> window;
    std::optional<std::string> reference;
    std::optional<std::string> metrics;
    std::optional<std::string> manifest;
    std::optional<std::string> from_manifest;
};

struct EvaluateArgs {
    std::string restored;
    std::string reference;
    std::optional<std::string> json_path;
    std::optional<std::string> csv_path;
};

struct BenchArgs {
    std::string dir;
    std::string outdir;
    double rate = 0.8;
    std::uint64_t seed = 1;
    std::optional<int> iters;
    std::optional<int> threads;
};

// 80%/90%-missing scores previously reported for standard test images; used
// only as informational context in `bench` output.
struct PublishedScore {
    const char* name;
    int channels;
    double missing_rate;
    double psnr_db;
    double ssim;
};

constexpr PublishedScore kPublished[] = {
    {"house", 1, 0.8, 34.70, 0.9070},     {"lena", 1, 0.8, 32.84, 0.9043},
    {"cameraman", 1, 0.8, 25.49, 0.8581}, {"pepper", 1, 0.8, 32.59, 0.8781},
    {"castle", 3, 0.8, 30.36, 0.9124},    {"castle", 3, 0.9, 26.55, 0.8509},
    {"woman", 3, 0.8, 34.38, 0.9561},     {"woman", 3, 0.9, 30.12, 0.9179},
    {"soldier", 3, 0.8, 30.78, 0.9473},   {"soldier", 3, 0.9, 26.34, 0.8893},
};
constexpr double kContextBandDb = 2.0;

const PublishedScore* find_published(const std::string& stem, int channels, double rate) {
    std::string lower = stem;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& p : kPublished) {
        if (p.channels == channels && std::abs(p.missing_rate - rate) < 1e-9 && lower.find(p.name) != std::string::npos) {
            return &p;
        }
    }
    return nullptr;
}

bool is_image_file(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

int resolve_threads(std::optional<int> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("MARLOW_THREADS"); env && *env) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw Error(std::string("MARLOW_THREADS must be an integer, got '") + env + "'");
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

fs::path with_suffix(const fs::path& output, const std::string& suffix) {
    auto p = output;
    p.replace_extension();
    return fs::path(p.string() + suffix);
}

std::string absolute_string(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

ProgressFn progress_printer(std::ostream& err, int max_iter) {
    return [&err, max_iter](const IterationRecord& r) {
        err << "iter " << r.iteration << "/" << max_iter;
        if (r.psnr_db) err << "  psnr " << format_psnr(*r.psnr_db) << " dB";
        err << "  residual " << std::setprecision(4) << r.mean_group_residual << "  " << std::setprecision(3)
            << r.seconds << " s\n";
    };
}

// ---------------------------------------------------------------- degrade

int cmd_degrade(DegradeArgs args, std::ostream& out, std::ostream& err) {
    DegradeSpec spec;
    if (args.from_manifest) {
        const auto m = read_json(*args.from_manifest);
        spec = degrade_spec_from_json(m.at("degradation"));
        args.input = m.at("inputs").at("image").get<std::string>();
        if (args.outdir.empty()) args.outdir = m.at("outputs").at("directory").get<std::string>();
    } else {
        const int chosen = int(args.rate.has_value()) + int(args.text_mask.has_value()) + int(args.grid.has_value());
        if (args.input.empty() || chosen != 1) {
            err << "degrade: give an input image and exactly one of --rate, --text-mask, --grid\n";
            return 2;
        }
        if (args.rate) {
            spec.mode = DegradeMode::random;
            spec.missing_rate = *args.rate;
            spec.seed = args.seed;
        } else if (args.text_mask) {
            spec.mode = DegradeMode::text;
            spec.text_mask_path = *args.text_mask;
        } else {
            spec.mode = DegradeMode::grid;
            spec.factor = *args.grid;
        }
    }
    if (args.outdir.empty()) {
        err << "degrade: -o/--output directory is required\n";
        return 2;
    }
    const fs::path dir = args.outdir;
    fs::create_directories(dir);
    const Image img = load_image(args.input);
    const Mask mask = make_mask(spec, img.width(), img.height());
    const Image degraded = apply_mask(img, mask, 0.0);

    const auto degraded_path = dir / "degraded.png";
    const auto mask_path = dir / "mask.png";
    const auto manifest_path = dir / "manifest.json";
    save_image(degraded, degraded_path);
    save_mask(mask, mask_path);

    if (spec.mode == DegradeMode::text) spec.text_mask_path = absolute_string(spec.text_mask_path);
    json manifest{
        {"tool", "marlow"},
        {"version", kVersion},
        {"command", "degrade"},
        {"inputs", {{"image", absolute_string(args.input)}}},
        {"degradation", to_json(spec)},
        {"seed", spec.mode == DegradeMode::random ? json(spec.seed) : json(nullptr)},
        {"outputs",
         {{"directory", absolute_string(dir)},
          {"degraded", absolute_string(degraded_path)},
          {"mask", absolute_string(mask_path)},
          {"manifest", absolute_string(manifest_path)}}},
        {"known_count", mask.known_count()},
        {"missing_count", mask.missing_count()},
    };
    write_text(manifest_path, manifest.dump(2) + "\n");
    err << "degrade: " << mask.missing_count() << " of " << mask.pixel_count() << " pixels missing -> "
        << dir.string() << "\n";
    out << manifest_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- complete

SolverConfig build_config(const CompleteArgs& a, int channels) {
    SolverConfig cfg = SolverConfig::defaults_for(channels);
    if (a.mode) cfg.mode = parse_solver_mode(*a.mode);
    if (a.n) cfg.n = *a.n;
    if (a.group_size) cfg.group_size = *a.group_size;
    if (a.stride) cfg.stride = *a.stride;
    if (a.alpha) cfg.alpha = *a.alpha;
    if (a.mu) cfg.mu = *a.mu;
    if (a.tau) cfg.tau_override = *a.tau;
    if (a.iters) cfg.max_iter = *a.iters;
    if (a.radius) cfg.search_radius = *a.radius;
    if (a.planar) cfg.offsets.planar = *a.planar;
    if (a.window) {
        if (*a.window < 1 || *a.window % 2 == 0) throw Error("--window must be a positive odd number");
        cfg.offsets.spatial.clear();
        const int half = *a.window / 2;
        for (int dy = -half; dy <= half; ++dy) {
            for (int dx = -half; dx <= half; ++dx) cfg.offsets.spatial.emplace_back(dy, dx);
        }
    }
    cfg.threads = resolve_threads(a.threads);
    return cfg;
}

int cmd_complete(CompleteArgs args, std::ostream& out, std::ostream& err) {
    SolverConfig cfg;
    if (args.from_manifest) {
        const auto m = read_json(*args.from_manifest);
        const auto& in = m.at("inputs");
        args.degraded = in.at("degraded").get<std::string>();
        args.mask = in.at("mask").get<std::string>();
        if (in.contains("reference") && !in.at("reference").is_null()) {
            args.reference = in.at("reference").get<std::string>();
        }
        const auto& outs = m.at("outputs");
        if (args.output.empty()) {
            args.output = outs.at("restored").get<std::string>();
            if (!args.manifest) args.manifest = outs.at("manifest").get<std::string>();
            if (!args.metrics && outs.contains("metrics") && !outs.at("metrics").is_null()) {
                args.metrics = outs.at("metrics").get<std::string>();
            }
        }
        cfg = config_from_json(m.at("config"));
        if (args.threads) cfg.threads = *args.threads;
    }
    if (args.degraded.empty() || args.mask.empty() || args.output.empty()) {
        err << "complete: needs <degraded> <mask> -o <output> (or --from-manifest)\n";
        return 2;
    }

    const Image degraded = load_image(args.degraded);
    const Mask mask = load_mask(args.mask);
    if (!args.from_manifest) cfg = build_config(args, degraded.channels());
    std::optional<Image> reference;
    if (args.reference) reference = load_image(*args.reference);

    err << "complete: " << degraded.width() << "x" << degraded.height() << "x" << degraded.channels() << ", mode "
        << to_string(cfg.mode) << ", " << cfg.max_iter << " iterations, " << cfg.threads << " thread(s)\n";
    const auto result = complete(degraded, mask, cfg, reference ? &*reference : nullptr,
                                 progress_printer(err, cfg.max_iter));

    const fs::path output = args.output;
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    save_image(result.image, output);

    const fs::path manifest_path = args.manifest ? fs::path(*args.manifest) : with_suffix(output, ".manifest.json");
    std::optional<fs::path> metrics_path;
    json metrics_json;
    if (reference) {
        metrics_path = args.metrics ? fs::path(*args.metrics) : with_suffix(output, ".metrics.json");
        const auto report = evaluate(result.image, *reference);
        metrics_json = json{
            {"final", json::parse(quality_json(report))},
            {"initial", {{"psnr_db", *result.initial_psnr_db}, {"ssim", result.initial_ssim ? json(*result.initial_ssim) : json(nullptr)}}},
            {"per_iteration", to_json(result.trace)},
            {"mode", to_string(cfg.mode)},
        };
        write_text(*metrics_path, metrics_json.dump(2) + "\n");
        err << "complete: PSNR " << format_psnr(report.psnr_db) << " dB, SSIM " << format_ssim(report.ssim) << "\n";
    }

    json manifest{
        {"tool", "marlow"},
        {"version", kVersion},
        {"command", "complete"},
        {"inputs",
         {{"degraded", absolute_string(args.degraded)},
          {"mask", absolute_string(args.mask)},
          {"reference", args.reference ? json(absolute_string(*args.reference)) : json(nullptr)}}},
        {"config", to_json(cfg)},
        {"seed", nullptr},
        {"outputs",
         {{"restored", absolute_string(output)},
          {"manifest", absolute_string(manifest_path)},
          {"metrics", metrics_path ? json(absolute_string(*metrics_path)) : json(nullptr)}}},
        {"metrics", reference ? metrics_json.at("final") : json(nullptr)},
        {"trace", to_json(result.trace)},
    };
    write_text(manifest_path, manifest.dump(2) + "\n");
    out << output.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    const fs::path restored = args.restored;
    const fs::path reference = args.reference;
    if (fs::is_directory(restored) != fs::is_directory(reference)) {
        err << "evaluate: both arguments must be files or both directories\n";
        return 2;
    }
    if (!fs::is_directory(restored)) {
        const auto report = evaluate(load_image(restored), load_image(reference));
        const auto line = quality_json(report);
        out << line << "\n";
        if (args.json_path) write_text(*args.json_path, line + "\n");
        if (args.csv_path) {
            write_text(*args.csv_path, "image,psnr_db,ssim\n" + restored.filename().string() + "," +
                                           format_psnr(report.psnr_db) + "," + format_ssim(report.ssim) + "\n");
        }
        return 0;
    }

    std::ostringstream csv;
    csv << "image,psnr_db,ssim\n";
    std::string json_rows = "[\n";
    bool first = true;
    int rows = 0;
    for (const auto& ref_path : list_images(reference)) {
        const auto candidate = restored / ref_path.filename();
        if (!fs::exists(candidate)) {
            err << "evaluate: no restored image for " << ref_path.filename().string() << ", skipped\n";
            continue;
        }
        const auto report = evaluate(load_image(candidate), load_image(ref_path));
        const auto name = ref_path.filename().string();
        csv << name << "," << format_psnr(report.psnr_db) << "," << format_ssim(report.ssim) << "\n";
        json_rows += std::string(first ? "" : ",\n") + "  {\"image\": " + json(name).dump() + ", " +
                     quality_json(report).substr(1);
        first = false;
        ++rows;
    }
    json_rows += "\n]\n";
    if (rows == 0) {
        err << "evaluate: no matching images found\n";
        return 1;
    }
    out << csv.str();
    if (args.csv_path) write_text(*args.csv_path, csv.str());
    if (args.json_path) write_text(*args.json_path, json_rows);
    return 0;
}

// ---------------------------------------------------------------- bench

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    const fs::path dir = args.dir;
    if (!fs::is_directory(dir)) {
        err << "bench: '" << dir.string() << "' is not a directory\n";
        return 2;
    }
    const auto images = list_images(dir);
    if (images.empty()) {
        err << "bench: no images in '" << dir.string() << "'\n";
        return 1;
    }
    const fs::path outdir = args.outdir;
    fs::create_directories(outdir);

    std::ostringstream csv;
    csv << "image,channels,mode,missing_rate,seed,initial_psnr_db,psnr_db,ssim,seconds,reference_psnr_db,"
           "reference_ssim,delta_db,within_band\n";
    std::ostringstream table;
    table << std::left << std::setw(24) << "image" << std::setw(20) << "mode" << std::setw(10) << "PSNR" << std::setw(9)
          << "SSIM" << "reference (context only)\n";
    json runs = json::array();

    for (const auto& path : images) {
        const Image ref = load_image(path);
        const Mask mask = random_mask(ref.width(), ref.height(), args.rate, args.seed);
        const Image degraded = apply_mask(ref, mask, 0.0);
        SolverConfig cfg = SolverConfig::defaults_for(ref.channels());
        if (args.iters) cfg.max_iter = *args.iters;
        cfg.threads = resolve_threads(args.threads);

        const auto stem = path.stem().string();
        err << "bench: " << stem << " (" << ref.width() << "x" << ref.height() << "x" << ref.channels() << ")\n";
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = complete(degraded, mask, cfg, &ref, progress_printer(err, cfg.max_iter));
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto report = evaluate(result.image, ref);

        const auto run_dir = outdir / stem;
        fs::create_directories(run_dir);
        save_image(degraded, run_dir / "degraded.png");
        save_mask(mask, run_dir / "mask.png");
        save_image(result.image, run_dir / "restored.png");

        const auto* published = find_published(stem, ref.channels(), args.rate);
        csv << path.filename().string() << "," << ref.channels() << "," << to_string(cfg.mode) << "," << args.rate
            << "," << args.seed << "," << format_psnr(*result.initial_psnr_db) << "," << format_psnr(report.psnr_db)
            << "," << format_ssim(report.ssim) << "," << std::fixed << std::setprecision(2) << seconds
            << std::defaultfloat;
        table << std::left << std::setw(24) << path.filename().string() << std::setw(20) << to_string(cfg.mode)
              << std::setw(10) << format_psnr(report.psnr_db) << std::setw(9) << format_ssim(report.ssim);
        json run{{"image", absolute_string(path)},
                 {"config", to_json(cfg)},
                 {"missing_rate", args.rate},
                 {"seed", args.seed},
                 {"metrics", json::parse(quality_json(report))},
                 {"trace", to_json(result.trace)}};
        if (published) {
            const double delta = report.psnr_db - published->psnr_db;
            const bool within = std::abs(delta) <= kContextBandDb;
            csv << "," << format_psnr(published->psnr_db) << "," << format_ssim(published->ssim) << ","
                << format_psnr(delta) << "," << (within ? "yes" : "no") << "\n";
            table << format_psnr(published->psnr_db) << "/" << format_ssim(published->ssim) << " (delta "
                  << format_psnr(delta) << " dB, " << (within ? "within" : "outside") << " +/-2 dB band)\n";
            run["reference_scores"] = {{"psnr_db", published->psnr_db}, {"ssim", published->ssim},
                                       {"delta_db", delta}, {"within_band", within}};
        } else {
            csv << ",,,,\n";
            table << "-\n";
        }
        runs.push_back(std::move(run));
    }
    write_text(outdir / "bench.csv", csv.str());
    write_text(outdir / "manifest.json",
               json{{"tool", "marlow"}, {"version", kVersion}, {"command", "bench"}, {"inputs", absolute_string(dir)},
                    {"runs", runs}}
                       .dump(2) + "\n");
    out << table.str();
    return 0;
}

// Options already given on the command line keep their value.
void apply_config_file(CLI::App& sub, const std::string& path) {
    if (!fs::is_regular_file(path)) throw Error("config file '" + path + "' not found");
    for (const auto& item : CLI::ConfigINI().from_file(path)) {
        if (item.name == "++" || item.name == "--") continue;  // section open/close markers
        const auto key = item.fullname();
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub.get_name())) {
            throw Error("config file '" + path + "': unknown key '" + key + "'");
        }
        CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
        if (opt == nullptr || item.name == "config" || item.name == "from-manifest") {
            throw Error("config file '" + path + "': unknown key '" + key + "'");
        }
        if (opt->count() > 0) continue;
        opt->add_result(item.inputs);
        opt->run_callback();
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Image completion from sparse samples with a multiplanar AR and low-rank model", "marlow"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    DegradeArgs dargs;
    auto* deg = app.add_subcommand("degrade", "Sample an image: random pixels, a text mask, or a regular grid");
    deg->add_option("input", dargs.input, "Reference image (PNG/PGM/PPM)");
    auto* rate_opt = deg->add_option("--rate", dargs.rate, "Fraction of pixels removed uniformly at random")
                         ->check(CLI::Range(0.0, 1.0));
    auto* text_opt = deg->add_option("--text-mask", dargs.text_mask, "Grayscale overlay; bright strokes are removed");
    auto* grid_opt = deg->add_option("--grid", dargs.grid, "Keep only pixels on a lattice with this spacing")
                         ->check(CLI::Range(2, 1 << 20));
    rate_opt->excludes(text_opt)->excludes(grid_opt);
    text_opt->excludes(grid_opt);
    deg->add_option("--seed", dargs.seed, "Seed for --rate");
    deg->add_option("-o,--output", dargs.outdir, "Output directory");
    deg->add_option("--from-manifest", dargs.from_manifest, "Re-run a previous degrade manifest");

    CompleteArgs cargs;
    auto* cmp = app.add_subcommand("complete", "Restore the missing pixels of a degraded image");
    std::optional<std::string> config_path;
    cmp->add_option("--config", config_path, "Flat key = value file of option names; command-line flags win");
    cmp->add_option("degraded", cargs.degraded, "Degraded image");
    cmp->add_option("mask", cargs.mask, "Mask image (0 = missing)");
    cmp->add_option("-o,--output", cargs.output, "Restored image path");
    cmp->add_option("--mode", cargs.mode, "marlow | lowrank-only | separate | simultaneous");
    cmp->add_option("--n", cargs.n, "Patch side (default 8 gray, 5 color)");
    cmp->add_option("--N", cargs.group_size, "Patches per group (default 64 gray, 75 color)");
    cmp->add_option("--stride", cargs.stride, "Reference patch spacing (default 4)");
    cmp->add_option("--alpha", cargs.alpha, "Tikhonov weight (default sqrt(10))");
    cmp->add_option("--mu", cargs.mu, "Low-rank term weight (default 10)");
    cmp->add_option("--tau", cargs.tau, "Singular value threshold override (default mu/(2(mu+1)))");
    cmp->add_option("--iters", cargs.iters, "Outer iterations (default 8)");
    cmp->add_option("--radius", cargs.radius, "Block matching search radius (default 20)");
    cmp->add_option("--threads", cargs.threads, "Worker threads (fallback: MARLOW_THREADS)");
    cmp->add_option("--planar", cargs.planar, "AR planar offsets (default 0 1)")->delimiter(',');
    cmp->add_option("--window", cargs.window, "Side of the AR spatial window (default 3)");
    cmp->add_option("--reference", cargs.reference, "Ground truth for per-iteration metrics");
    cmp->add_option("--metrics", cargs.metrics, "Metrics JSON path (default <output>.metrics.json)");
    cmp->add_option("--manifest", cargs.manifest, "Manifest path (default <output>.manifest.json)");
    cmp->add_option("--from-manifest", cargs.from_manifest, "Re-run a previous complete manifest");

    EvaluateArgs eargs;
    auto* ev = app.add_subcommand("evaluate", "PSNR/SSIM of a restored image (or directory) against a reference");
    ev->add_option("restored", eargs.restored)->required();
    ev->add_option("reference", eargs.reference)->required();
    ev->add_option("--json", eargs.json_path, "Write the report as JSON");
    ev->add_option("--csv", eargs.csv_path, "Write the report as CSV");

    BenchArgs bargs;
    auto* bench = app.add_subcommand("bench", "Degrade, complete and score every image of a directory");
    bench->add_option("dir", bargs.dir)->required();
    bench->add_option("-o,--output", bargs.outdir, "Output directory")->required();
    bench->add_option("--rate", bargs.rate, "Missing rate (default 0.8)")->check(CLI::Range(0.0, 1.0));
    bench->add_option("--seed", bargs.seed, "Mask seed (default 1)");
    bench->add_option("--iters", bargs.iters, "Outer iterations (default 8)");
    bench->add_option("--threads", bargs.threads, "Worker threads (fallback: MARLOW_THREADS)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code;
    }

    try {
        if (*deg) return cmd_degrade(dargs, out, err);
        if (*cmp) {
            if (config_path) apply_config_file(*cmp, *config_path);
            return cmd_complete(cargs, out, err);
        }
        if (*ev) return cmd_evaluate(eargs, out, err);
        if (*bench) return cmd_bench(bargs, out, err);
    } catch (const std::exception& e) {
        err << "marlow: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace marlow::cli
