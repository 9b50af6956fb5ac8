#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bsm/errors.hpp"
#include "bsm/image.hpp"
#include "bsm/image_io.hpp"

namespace bsm {

// One rectified pair with ground truth and optional evaluation-region masks
// (white = counted).
struct StereoDataset {
    std::string name;
    RgbImage left;
    RgbImage right;
    DisparityMap gt;
    std::optional<GrayImage> mask_nonocc;
    std::optional<GrayImage> mask_all;
    std::optional<GrayImage> mask_disc;
    int d_max = 0;
    double gt_scale = 0.0;
};

struct MiddleburyParams {
    const char* name;
    int d_max;
    double gt_scale;
};

// Search ranges and ground-truth quantization of the standard four scenes.
inline constexpr std::array<MiddleburyParams, 4> kMiddleburyScenes = {{
    {"tsukuba", 16, 16.0},
    {"venus", 20, 8.0},
    {"teddy", 60, 4.0},
    {"cones", 60, 4.0},
}};

namespace detail {

inline std::optional<std::string> find_file(const std::filesystem::path& dir,
                                            std::initializer_list<const char*> names) {
    for (const char* name : names) {
        const std::filesystem::path p = dir / name;
        std::error_code ec;
        if (std::filesystem::exists(p, ec)) return p.string();
    }
    return std::nullopt;
}

inline std::optional<GrayImage> try_load_mask(const std::filesystem::path& dir,
                                              std::initializer_list<const char*> names) {
    const auto path = find_file(dir, names);
    if (!path) return std::nullopt;
    return to_gray(load_image(*path));
}

}  // namespace detail

// Loads one scene directory using the stock Middlebury file names
// (im2/im6/disp2, optional nonocc/all/disc masks).
inline StereoDataset load_stereo_dataset(const std::string& dir, const std::string& name,
                                         int d_max, double gt_scale) {
    const std::filesystem::path root(dir);
    const auto left = detail::find_file(
        root, {"im2.png", "im2.ppm", "im2.pgm", "left.png", "left.ppm", "left.pgm"});
    const auto right = detail::find_file(
        root, {"im6.png", "im6.ppm", "im6.pgm", "right.png", "right.ppm", "right.pgm"});
    const auto gt = detail::find_file(
        root, {"disp2.pgm", "disp2.png", "disp2.pfm", "gt.pgm", "gt.png", "gt.pfm"});
    if (!left || !right || !gt)
        throw IoError("dataset " + dir + ": need left (im2.*), right (im6.*) and ground truth (disp2.*)");

    StereoDataset ds;
    ds.name = name;
    ds.left = load_image(*left);
    ds.right = load_image(*right);
    ds.gt = load_gt_disparity(*gt, gt_scale);
    ds.mask_nonocc = detail::try_load_mask(root, {"nonocc.png", "nonocc.pgm"});
    ds.mask_all = detail::try_load_mask(root, {"all.png", "all.pgm"});
    ds.mask_disc = detail::try_load_mask(root, {"disc.png", "disc.pgm"});
    ds.d_max = d_max;
    ds.gt_scale = gt_scale;
    return ds;
}

// Loads whichever of the standard four scenes exist under root/<name>/.
inline std::vector<StereoDataset> discover_middlebury(const std::string& root) {
    std::vector<StereoDataset> out;
    for (const MiddleburyParams& scene : kMiddleburyScenes) {
        const std::filesystem::path dir = std::filesystem::path(root) / scene.name;
        std::error_code ec;
        if (!std::filesystem::is_directory(dir, ec)) continue;
        out.push_back(load_stereo_dataset(dir.string(), scene.name, scene.d_max, scene.gt_scale));
    }
    return out;
}

// Illumination series: the same scene captured under three conditions per
// view, one ground truth for the left view.
struct RadiometricSet {
    std::array<RgbImage, 3> lefts;
    std::array<RgbImage, 3> rights;
    DisparityMap gt;
    std::optional<GrayImage> mask_nonocc;
    std::optional<GrayImage> mask_all;
    std::optional<GrayImage> mask_disc;
    int d_max = 0;
    double gt_scale = 0.0;
};

// Layout: left_c0..c2 / right_c0..c2 (png/ppm/pgm) + gt.(pgm|pfm|png).
inline RadiometricSet load_radiometric_set(const std::string& dir, int d_max,
                                           double gt_scale) {
    const std::filesystem::path root(dir);
    RadiometricSet set;
    for (int c = 0; c < 3; ++c) {
        const std::string ln = "left_c" + std::to_string(c);
        const std::string rn = "right_c" + std::to_string(c);
        const auto lp = detail::find_file(
            root, {(ln + ".png").c_str(), (ln + ".ppm").c_str(), (ln + ".pgm").c_str()});
        const auto rp = detail::find_file(
            root, {(rn + ".png").c_str(), (rn + ".ppm").c_str(), (rn + ".pgm").c_str()});
        if (!lp) throw IoError("radiometric set " + dir + ": missing " + ln + ".{png,ppm,pgm}");
        if (!rp) throw IoError("radiometric set " + dir + ": missing " + rn + ".{png,ppm,pgm}");
        set.lefts[size_t(c)] = load_image(*lp);
        set.rights[size_t(c)] = load_image(*rp);
    }
    const auto gt = detail::find_file(root, {"gt.pgm", "gt.pfm", "gt.png", "disp2.pgm"});
    if (!gt) throw IoError("radiometric set " + dir + ": missing gt.{pgm,pfm,png}");
    set.gt = load_gt_disparity(*gt, gt_scale);
    set.mask_nonocc = detail::try_load_mask(root, {"nonocc.png", "nonocc.pgm"});
    set.mask_all = detail::try_load_mask(root, {"all.png", "all.pgm"});
    set.mask_disc = detail::try_load_mask(root, {"disc.png", "disc.pgm"});
    set.d_max = d_max;
    set.gt_scale = gt_scale;
    return set;
}

}  // namespace bsm
