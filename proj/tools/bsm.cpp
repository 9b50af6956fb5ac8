#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsm/bsm.hpp"

namespace {

void add_config_flags(CLI::App* cmd, bsm::BsmConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path,
                    "JSON config file; explicit flags override its values");
    cmd->add_option("--n", cfg.n, "descriptor length in bits");
    cmd->add_option("--S", cfg.window, "sampling window side in pixels");
    cmd->add_option("--spread", cfg.spread, "sampling Gaussian standard deviation");
    cmd->add_option("--seed", cfg.seed, "pattern generator seed");
    cmd->add_option("--d_max", cfg.d_max, "disparity search range (required, no default)");
    cmd->add_option("--lambda_c", cfg.lambda_c, "color falloff of the voting weight");
    cmd->add_option("--lambda_e", cfg.lambda_e, "distance falloff of the voting weight");
    cmd->add_option("--lr_tolerance", cfg.lr_tolerance, "left/right agreement tolerance");
    cmd->add_option("--vote_radius", cfg.vote_radius, "voting neighborhood radius");
    cmd->add_option("--gt_scale", cfg.gt_scale, "disparity units per gray level in PGM maps");
    cmd->add_option("--threads", cfg.threads, "worker threads (1 = reference timing mode)");
}

// The config file must load before CLI11 writes flag values into cfg, so the
// flag is found by a pre-scan of argv instead of an option callback.
std::optional<std::string> scan_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return std::nullopt;
}

bool has_extension(const std::string& path, const char* ext) {
    return std::filesystem::path(path).extension() == ext;
}

void write_map(const bsm::DisparityMap& map, const std::string& path, double scale) {
    if (has_extension(path, ".pfm"))
        bsm::save_disparity_pfm(map, path);
    else
        bsm::save_disparity(map, path, scale);
}

std::string stage_path(const std::string& out, const char* stage) {
    std::filesystem::path p(out);
    const std::string ext = p.extension().string();
    p.replace_extension();
    return p.string() + "." + stage + ext;
}

void print_report_row(const char* label, bsm::ErrorReport rep) {
    rep.region = label;
    std::printf("%-8s %6.2f  (%ld of %ld pixels beyond %.2f)\n", rep.region.c_str(),
                rep.bad_pixel_rate, rep.bad, rep.counted, rep.threshold);
}

const bsm::GrayImage* pick_region(const bsm::StereoDataset& ds) {
    return ds.mask_nonocc ? &*ds.mask_nonocc : nullptr;
}

int lookup_d_max(const std::string& scene_name) {
    for (const bsm::MiddleburyParams& p : bsm::kMiddleburyScenes)
        if (scene_name == p.name) return p.d_max;
    return 0;
}

double lookup_gt_scale(const std::string& scene_name, double fallback) {
    for (const bsm::MiddleburyParams& p : bsm::kMiddleburyScenes)
        if (scene_name == p.name) return p.gt_scale;
    return fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary-descriptor stereo matcher"};
    app.require_subcommand(1);

    bsm::BsmConfig cfg;
    std::string config_path;
    try {
        if (const auto path = scan_config_path(argc, argv)) cfg = bsm::load_config(*path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    std::string left_path, right_path, out_path = "disparity.pgm";
    std::string result_path, gt_path;
    std::string nonocc_path, all_path, disc_path;
    std::string pattern_in, pattern_out;
    std::vector<std::string> scene_dirs;
    std::vector<int> n_values = {512, 1024, 2048, 4096};
    double threshold = 1.0;
    int runs = 3;
    bool stages = false;

    CLI::App* match = app.add_subcommand("match", "compute a left-reference disparity map");
    match->add_option("left", left_path, "left image")->required();
    match->add_option("right", right_path, "right image")->required();
    match->add_option("out", out_path, "output map (.pfm for float, otherwise 16-bit PGM)")
        ->required();
    match->add_flag("--stages", stages,
                    "also write the per-stage maps (unmasked, masked, refined)");
    match->add_option("--pattern", pattern_in, "reuse a saved sampling pattern");
    match->add_option("--emit-pattern", pattern_out, "save the sampling pattern used");
    add_config_flags(match, cfg, config_path);

    CLI::App* eval = app.add_subcommand("eval", "bad-pixel rate of a map against ground truth");
    eval->add_option("result", result_path, "disparity map to score")->required();
    eval->add_option("gt", gt_path, "ground-truth map")->required();
    eval->add_option("--nonocc", nonocc_path, "non-occluded region mask");
    eval->add_option("--all", all_path, "all-pixels region mask");
    eval->add_option("--disc", disc_path, "discontinuity region mask");
    eval->add_option("--threshold", threshold, "error tolerance in disparity units");
    add_config_flags(eval, cfg, config_path);

    CLI::App* sweep = app.add_subcommand("sweep", "accuracy and wall time across descriptor lengths");
    sweep->add_option("scenes", scene_dirs, "scene directories (Middlebury layout)")->required();
    sweep->add_option("--n_values", n_values, "descriptor lengths to test")->delimiter(',');
    sweep->add_option("--out", out_path, "CSV output")->default_val("sweep.csv");
    sweep->add_option("--threshold", threshold, "error tolerance in disparity units");
    add_config_flags(sweep, cfg, config_path);

    CLI::App* radiometric =
        app.add_subcommand("radiometric", "3x3 exposure-combination error grid");
    radiometric->add_option("set", left_path, "directory with left_c0..2, right_c0..2, gt")
        ->required();
    radiometric->add_option("--out", out_path, "CSV output")->default_val("radiometric.csv");
    radiometric->add_option("--threshold", threshold, "error tolerance in disparity units");
    add_config_flags(radiometric, cfg, config_path);

    CLI::App* bench = app.add_subcommand("bench", "median wall time of the full pipeline");
    bench->add_option("left", left_path, "left image")->required();
    bench->add_option("right", right_path, "right image")->required();
    bench->add_option("--runs", runs, "repetitions, median reported");
    add_config_flags(bench, cfg, config_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (match->parsed()) {
            const bsm::RgbImage left = bsm::load_image(left_path);
            const bsm::RgbImage right = bsm::load_image(right_path);
            cfg.validate();
            const bsm::SamplingPattern pattern =
                pattern_in.empty() ? bsm::generate_pattern(cfg) : bsm::load_pattern(pattern_in);
            const bsm::PipelineResult res =
                bsm::run_pipeline(left, right, pattern, cfg, stages);
            write_map(res.refined, out_path, cfg.gt_scale);
            bsm::save_config(cfg, out_path + ".config.json");
            if (stages) {
                write_map(*res.unmasked, stage_path(out_path, "unmasked"), cfg.gt_scale);
                write_map(res.left_wta, stage_path(out_path, "masked"), cfg.gt_scale);
                write_map(res.refined, stage_path(out_path, "refined"), cfg.gt_scale);
            }
            if (!pattern_out.empty()) bsm::save_pattern(pattern, pattern_out);
        } else if (eval->parsed()) {
            const bsm::DisparityMap result = bsm::load_gt_disparity(result_path, cfg.gt_scale);
            const bsm::DisparityMap gt = bsm::load_gt_disparity(gt_path, cfg.gt_scale);
            if (nonocc_path.empty() && all_path.empty() && disc_path.empty()) {
                print_report_row("all", bsm::bad_pixel_rate(result, gt, nullptr, threshold));
            } else {
                if (!nonocc_path.empty()) {
                    const bsm::GrayImage m = bsm::to_gray(bsm::load_image(nonocc_path));
                    print_report_row("nonocc", bsm::bad_pixel_rate(result, gt, &m, threshold));
                }
                if (!all_path.empty()) {
                    const bsm::GrayImage m = bsm::to_gray(bsm::load_image(all_path));
                    print_report_row("all", bsm::bad_pixel_rate(result, gt, &m, threshold));
                }
                if (!disc_path.empty()) {
                    const bsm::GrayImage m = bsm::to_gray(bsm::load_image(disc_path));
                    print_report_row("disc", bsm::bad_pixel_rate(result, gt, &m, threshold));
                }
            }
        } else if (sweep->parsed()) {
            std::vector<bsm::StereoDataset> sets;
            sets.reserve(scene_dirs.size());
            for (const std::string& dir : scene_dirs) {
                const std::string name = std::filesystem::path(dir).filename().string();
                const int d = cfg.d_max > 0 ? cfg.d_max : lookup_d_max(name);
                if (d < 1)
                    throw bsm::InvalidArgument("sweep: " + dir +
                                               " is not a known scene, pass --d_max");
                sets.push_back(bsm::load_stereo_dataset(dir, name, d,
                                                        lookup_gt_scale(name, cfg.gt_scale)));
            }
            std::vector<bsm::SweepScene> scenes;
            scenes.reserve(sets.size());
            for (const bsm::StereoDataset& ds : sets)
                scenes.push_back({&ds.left, &ds.right, &ds.gt, pick_region(ds), ds.d_max});
            const std::vector<bsm::SweepPoint> points =
                bsm::length_sweep(scenes, n_values, cfg, threshold);
            std::printf("%6s  %9s  %12s\n", "n", "avg_error", "wall_seconds");
            std::vector<double> xs, ys;
            for (const bsm::SweepPoint& p : points) {
                std::printf("%6d  %9.4f  %12.2f\n", p.n, p.avg_error, p.wall_time);
                xs.push_back(double(p.n));
                ys.push_back(p.wall_time);
            }
            if (points.size() >= 2)
                std::printf("linear fit of time vs n: R^2 = %.4f\n", bsm::linear_fit_r2(xs, ys));
            bsm::write_sweep_csv(out_path, points);
            bsm::save_config(cfg, out_path + ".config.json");
        } else if (radiometric->parsed()) {
            cfg.validate();
            const bsm::RadiometricSet set =
                bsm::load_radiometric_set(left_path, cfg.d_max, cfg.gt_scale);
            const bsm::SamplingPattern pattern = bsm::generate_pattern(cfg);
            const bsm::GrayImage* region = set.mask_nonocc ? &*set.mask_nonocc : nullptr;
            const bsm::RadiometricMatrix m = bsm::radiometric_protocol(
                set.lefts, set.rights, set.gt, region, pattern, cfg, threshold);
            std::printf("%12s %8s %8s %8s\n", "left\\right", "c0", "c1", "c2");
            for (int i = 0; i < 3; ++i)
                std::printf("%12s %8.2f %8.2f %8.2f\n", ("c" + std::to_string(i)).c_str(),
                            m.rate[size_t(i)][0], m.rate[size_t(i)][1], m.rate[size_t(i)][2]);
            std::printf("diagonal mean %.2f, off-diagonal mean %.2f\n", m.diagonal_mean(),
                        m.off_diagonal_mean());
            bsm::write_radiometric_csv(out_path, m);
            bsm::save_config(cfg, out_path + ".config.json");
        } else if (bench->parsed()) {
            const bsm::RgbImage left = bsm::load_image(left_path);
            const bsm::RgbImage right = bsm::load_image(right_path);
            cfg.validate();
            const bsm::SamplingPattern pattern = bsm::generate_pattern(cfg);
            const double secs = bsm::time_pipeline(left, right, pattern, cfg, runs);
            std::printf("median of %d run%s: %.2f s (%dx%d, d_max=%d, n=%d, threads=%d)\n",
                        runs, runs == 1 ? "" : "s", secs, left.width, left.height, cfg.d_max,
                        cfg.n, cfg.threads);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
