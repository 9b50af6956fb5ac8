#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bsm/errors.hpp"
#include "bsm/image.hpp"
#include "bsm/pattern.hpp"

namespace bsm {
namespace detail {

inline double unit_draw(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// Multi-octave value noise in [0, 1]: random grids bilinearly upsampled and
// summed, so the field has both smooth shading and fine detail.
inline std::vector<float> value_noise(int width, int height, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<float> field(size_t(width) * size_t(height), 0.0f);
    const int cells[4] = {32, 12, 5, 2};
    const float amps[4] = {0.45f, 0.25f, 0.18f, 0.12f};
    for (int o = 0; o < 4; ++o) {
        const int cell = cells[o];
        const int gw = width / cell + 2;
        const int gh = height / cell + 2;
        std::vector<float> grid(size_t(gw) * size_t(gh));
        for (float& v : grid) v = float(unit_draw(rng));
        for (int y = 0; y < height; ++y) {
            const double fy = double(y) / cell;
            const int y0 = int(fy);
            const float ty = float(fy - y0);
            for (int x = 0; x < width; ++x) {
                const double fx = double(x) / cell;
                const int x0 = int(fx);
                const float tx = float(fx - x0);
                const float* row0 = grid.data() + size_t(y0) * gw + x0;
                const float* row1 = row0 + gw;
                const float top = row0[0] + tx * (row0[1] - row0[0]);
                const float bot = row1[0] + tx * (row1[1] - row1[0]);
                field[size_t(y) * width + x] += amps[o] * (top + ty * (bot - top));
            }
        }
    }
    return field;
}

inline uint8_t to_byte(float v) {
    const long r = std::lround(v * 255.0f);
    return uint8_t(std::clamp(r, 0l, 255l));
}

inline RgbImage noise_texture(int width, int height, uint64_t seed) {
    RgbImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(size_t(width) * size_t(height));
    const std::vector<float> r = value_noise(width, height, seed * 3 + 1);
    const std::vector<float> g = value_noise(width, height, seed * 3 + 2);
    const std::vector<float> b = value_noise(width, height, seed * 3 + 3);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = {to_byte(r[i]), to_byte(g[i]), to_byte(b[i])};
    return img;
}

inline Rgb8 random_pixel(std::mt19937_64& rng) {
    const uint64_t bits = rng();
    return {uint8_t(bits & 0xff), uint8_t((bits >> 8) & 0xff), uint8_t((bits >> 16) & 0xff)};
}

}  // namespace detail

// A rendered stereo pair with exact ground truth for both views. Left pixels
// whose correspondence falls outside the right image have no ground truth and
// carry fresh noise; likewise for unobserved right pixels.
struct SyntheticScene {
    RgbImage left;
    RgbImage right;
    DisparityMap gt_left;
    DisparityMap gt_right;
    GrayImage mask_nonocc;  // visible in both views
    GrayImage mask_all;     // every pixel with ground truth
    GrayImage mask_disc;    // near disparity jumps, non-occluded only
    int d_max = 0;
};

// Builds a textured fronto-parallel scene: a background plane plus `layers`
// nearer rectangles. The right view is the source texture; each left pixel
// copies its corresponding right pixel, so integer disparities are exact and
// occlusions follow from geometry.
inline SyntheticScene make_synthetic_scene(int width, int height, int d_max,
                                           uint64_t seed, int layers = 4) {
    if (width < 16 || height < 16) throw InvalidArgument("synthetic scene: size too small");
    if (d_max < 2) throw InvalidArgument("synthetic scene: d_max must be >= 2");
    if (layers < 0) throw InvalidArgument("synthetic scene: layers must be >= 0");

    SyntheticScene scene;
    scene.d_max = d_max;
    scene.right = detail::noise_texture(width, height, seed);

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    auto uniform_int = [&](int lo, int hi) {  // inclusive
        return lo + int(detail::unit_draw(rng) * double(hi - lo + 1));
    };

    // Disparity layout for the left view, nearer rectangles painted last.
    const int d_bg = std::max(1, d_max / 5);
    std::vector<int> disp(size_t(width) * size_t(height), d_bg);
    std::vector<int> level(layers > 0 ? size_t(layers) : 0);
    for (int k = 0; k < layers; ++k)
        level[size_t(k)] = d_bg + (d_max - 1 - d_bg) * (k + 1) / std::max(1, layers);
    for (int k = 0; k < layers; ++k) {
        const int rw = uniform_int(width / 6, width / 3);
        const int rh = uniform_int(height / 6, height / 3);
        const int rx = uniform_int(d_max, std::max(d_max, width - rw - 1));
        const int ry = uniform_int(0, std::max(0, height - rh - 1));
        for (int y = ry; y < std::min(height, ry + rh); ++y)
            for (int x = rx; x < std::min(width, rx + rw); ++x)
                disp[size_t(y) * width + x] = level[size_t(k)];
    }

    // Render the left view and forward-map the right ground truth; when two
    // left pixels land on one right pixel the larger disparity is in front.
    scene.left.width = width;
    scene.left.height = height;
    scene.left.pixels.resize(size_t(width) * size_t(height));
    scene.gt_left = DisparityMap(width, height);
    scene.gt_right = DisparityMap(width, height);
    std::fill(scene.gt_left.valid.begin(), scene.gt_left.valid.end(), uint8_t(0));
    std::fill(scene.gt_right.valid.begin(), scene.gt_right.valid.end(), uint8_t(0));
    std::vector<int> right_d(size_t(width) * size_t(height), -1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int d = disp[size_t(y) * width + x];
            const int xr = x - d;
            if (xr < 0) {
                scene.left.at(x, y) = detail::random_pixel(rng);
                continue;
            }
            scene.left.at(x, y) = scene.right.at(xr, y);
            scene.gt_left.d(x, y) = float(d);
            scene.gt_left.set_valid(x, y, true);
            right_d[size_t(y) * width + xr] = std::max(right_d[size_t(y) * width + xr], d);
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (right_d[size_t(y) * width + x] < 0) continue;
            scene.gt_right.d(x, y) = float(right_d[size_t(y) * width + x]);
            scene.gt_right.set_valid(x, y, true);
        }
    }

    // Region masks for the left view. A left pixel is occluded when a nearer
    // surface wins the right pixel it maps to.
    scene.mask_nonocc = GrayImage(width, height);
    scene.mask_all = GrayImage(width, height);
    scene.mask_disc = GrayImage(width, height);
    std::vector<uint8_t> jump(size_t(width) * size_t(height), 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int d = disp[size_t(y) * width + x];
            if (x + 1 < width && disp[size_t(y) * width + x + 1] != d) jump[size_t(y) * width + x] = 1;
            if (y + 1 < height && disp[size_t(y + 1) * width + x] != d) jump[size_t(y) * width + x] = 1;
        }
    }
    const int disc_radius = 4;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!scene.gt_left.is_valid(x, y)) continue;
            scene.mask_all.at(x, y) = 255.0f;
            const int d = disp[size_t(y) * width + x];
            const int xr = x - d;
            if (right_d[size_t(y) * width + xr] != d) continue;
            scene.mask_nonocc.at(x, y) = 255.0f;
            bool near_jump = false;
            for (int dy = -disc_radius; dy <= disc_radius && !near_jump; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= height) continue;
                for (int dx = -disc_radius; dx <= disc_radius; ++dx) {
                    const int xx = x + dx;
                    if (xx < 0 || xx >= width) continue;
                    if (jump[size_t(yy) * width + xx]) {
                        near_jump = true;
                        break;
                    }
                }
            }
            if (near_jump) scene.mask_disc.at(x, y) = 255.0f;
        }
    }
    return scene;
}

// A pair related by one global shift: left(x) = right(x - d) wherever the
// correspondence exists, fresh noise in the uncovered strip.
inline SyntheticScene make_shifted_pair(int width, int height, int d, uint64_t seed) {
    if (d < 0 || d >= width) throw InvalidArgument("shifted pair: d out of range");
    SyntheticScene scene;
    scene.d_max = std::max(2, d + 1);
    scene.right = detail::noise_texture(width, height, seed);
    scene.left.width = width;
    scene.left.height = height;
    scene.left.pixels.resize(size_t(width) * size_t(height));
    scene.gt_left = DisparityMap(width, height);
    scene.gt_right = DisparityMap(width, height);
    std::fill(scene.gt_left.valid.begin(), scene.gt_left.valid.end(), uint8_t(0));
    std::fill(scene.gt_right.valid.begin(), scene.gt_right.valid.end(), uint8_t(0));
    std::mt19937_64 rng(seed + 1);
    scene.mask_nonocc = GrayImage(width, height);
    scene.mask_all = GrayImage(width, height);
    scene.mask_disc = GrayImage(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (x - d >= 0) {
                scene.left.at(x, y) = scene.right.at(x - d, y);
                scene.gt_left.d(x, y) = float(d);
                scene.gt_left.set_valid(x, y, true);
                scene.gt_right.d(x - d, y) = float(d);
                scene.gt_right.set_valid(x - d, y, true);
                scene.mask_nonocc.at(x, y) = 255.0f;
                scene.mask_all.at(x, y) = 255.0f;
            } else {
                scene.left.at(x, y) = detail::random_pixel(rng);
            }
        }
    }
    return scene;
}

// Photometric re-exposure: per-channel gain and gamma in linear 8-bit space,
// quantized back to bytes, with mild sensor noise. Quantization and clipping
// make the mapping between two different conditions non-monotone in places,
// which is what real exposure changes do to sampled images.
inline RgbImage apply_exposure(const RgbImage& src, double gain, double gamma,
                               double noise_sigma, uint64_t seed) {
    if (!(gain > 0.0) || !(gamma > 0.0)) throw InvalidArgument("exposure: gain and gamma must be > 0");
    if (noise_sigma < 0.0) throw InvalidArgument("exposure: noise_sigma must be >= 0");
    detail::GaussianSource noise(seed);
    RgbImage out;
    out.width = src.width;
    out.height = src.height;
    out.pixels.resize(src.pixels.size());
    auto remap = [&](uint8_t v) -> uint8_t {
        double t = 255.0 * gain * std::pow(double(v) / 255.0, gamma);
        if (noise_sigma > 0.0) t += noise_sigma * noise.next();
        return uint8_t(std::clamp(std::lround(t), 0l, 255l));
    };
    for (size_t i = 0; i < src.pixels.size(); ++i) {
        out.pixels[i].r = remap(src.pixels[i].r);
        out.pixels[i].g = remap(src.pixels[i].g);
        out.pixels[i].b = remap(src.pixels[i].b);
    }
    return out;
}

struct ExposureCondition {
    double gain = 1.0;
    double gamma = 1.0;
};

// Three graded exposure conditions from dark-and-crushed to bright-and-
// clipped, applied to each view with independent noise.
inline constexpr std::array<ExposureCondition, 3> kExposureConditions = {{
    {0.55, 1.40},
    {1.00, 1.00},
    {1.70, 0.65},
}};

struct ExposureSeries {
    std::array<RgbImage, 3> lefts;
    std::array<RgbImage, 3> rights;
};

inline ExposureSeries make_exposure_series(const RgbImage& left, const RgbImage& right,
                                           double noise_sigma, uint64_t seed) {
    ExposureSeries series;
    for (int c = 0; c < 3; ++c) {
        const ExposureCondition& cond = kExposureConditions[size_t(c)];
        series.lefts[size_t(c)] =
            apply_exposure(left, cond.gain, cond.gamma, noise_sigma, seed + uint64_t(2 * c));
        series.rights[size_t(c)] =
            apply_exposure(right, cond.gain, cond.gamma, noise_sigma, seed + uint64_t(2 * c + 1));
    }
    return series;
}

}  // namespace bsm
