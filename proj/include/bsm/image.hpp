#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bsm/errors.hpp"

namespace bsm {

struct Rgb8 {
    uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb8> pixels;  // row-major

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(size_t(w) * size_t(h)) {
        if (w < 1 || h < 1) throw InvalidArgument("RgbImage: dimensions must be >= 1");
    }

    Rgb8& at(int x, int y) { return pixels[size_t(y) * size_t(width) + size_t(x)]; }
    const Rgb8& at(int x, int y) const { return pixels[size_t(y) * size_t(width) + size_t(x)]; }
};

// Scalar intensities in [0,255], kept real-valued so later comparisons are
// free of 8-bit quantization ties.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), values(size_t(w) * size_t(h), 0.0f) {
        if (w < 1 || h < 1) throw InvalidArgument("GrayImage: dimensions must be >= 1");
    }

    float& at(int x, int y) { return values[size_t(y) * size_t(width) + size_t(x)]; }
    float at(int x, int y) const { return values[size_t(y) * size_t(width) + size_t(x)]; }
};

struct Lab {
    float l = 0, a = 0, b = 0;
};

struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<Lab> values;

    LabImage() = default;
    LabImage(int w, int h) : width(w), height(h), values(size_t(w) * size_t(h)) {
        if (w < 1 || h < 1) throw InvalidArgument("LabImage: dimensions must be >= 1");
    }

    Lab& at(int x, int y) { return values[size_t(y) * size_t(width) + size_t(x)]; }
    const Lab& at(int x, int y) const { return values[size_t(y) * size_t(width) + size_t(x)]; }
};

// Per-pixel disparity plus a validity flag. Invalid pixels conventionally
// carry disparity 0 when serialized.
struct DisparityMap {
    int width = 0;
    int height = 0;
    std::vector<float> disparity;
    std::vector<uint8_t> valid;

    DisparityMap() = default;
    DisparityMap(int w, int h)
        : width(w), height(h),
          disparity(size_t(w) * size_t(h), 0.0f),
          valid(size_t(w) * size_t(h), 1) {
        if (w < 1 || h < 1) throw InvalidArgument("DisparityMap: dimensions must be >= 1");
    }

    float& d(int x, int y) { return disparity[size_t(y) * size_t(width) + size_t(x)]; }
    float d(int x, int y) const { return disparity[size_t(y) * size_t(width) + size_t(x)]; }
    bool is_valid(int x, int y) const { return valid[size_t(y) * size_t(width) + size_t(x)] != 0; }
    void set_valid(int x, int y, bool v) { valid[size_t(y) * size_t(width) + size_t(x)] = v ? 1 : 0; }

    friend bool operator==(const DisparityMap&, const DisparityMap&) = default;
};

// BT.601 luma, no rounding.
inline GrayImage to_gray(const RgbImage& img) {
    GrayImage out(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        const Rgb8& p = img.pixels[i];
        out.values[i] = 0.299f * float(p.r) + 0.587f * float(p.g) + 0.114f * float(p.b);
    }
    return out;
}

namespace detail {

inline double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

// CIE f() with the standard small-value linear branch.
inline double lab_f(double t) {
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kappa = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

inline Lab rgb_to_lab(Rgb8 p) {
    const double r = srgb_to_linear(p.r / 255.0);
    const double g = srgb_to_linear(p.g / 255.0);
    const double b = srgb_to_linear(p.b / 255.0);

    // sRGB -> XYZ, D65. White normalization uses the matrix row sums so that
    // (255,255,255) lands exactly on L=100, a=b=0.
    const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.9504700;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.0888300;

    const double fx = lab_f(x);
    const double fy = lab_f(y);
    const double fz = lab_f(z);
    // 8-bit sRGB stays inside [0,100]; clamp the rounding residue at black.
    const double l = std::clamp(116.0 * fy - 16.0, 0.0, 100.0);
    return Lab{float(l), float(500.0 * (fx - fy)), float(200.0 * (fy - fz))};
}

}  // namespace detail

// sRGB (D65, gamma-decoded) -> CIELAB.
inline LabImage to_lab(const RgbImage& img) {
    LabImage out(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        out.values[i] = detail::rgb_to_lab(img.pixels[i]);
    }
    return out;
}

// L,a,b absolute-difference sum; the color distance used for both the
// descriptor mask weights and the refinement voting weights.
inline float lab_sad(const Lab& a, const Lab& b) {
    return std::abs(a.l - b.l) + std::abs(a.a - b.a) + std::abs(a.b - b.b);
}

inline int clamp_coord(int v, int hi) {
    return v < 0 ? 0 : (v > hi ? hi : v);
}

}  // namespace bsm
