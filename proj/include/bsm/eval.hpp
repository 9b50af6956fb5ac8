#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bsm/config.hpp"
#include "bsm/errors.hpp"
#include "bsm/image.hpp"
#include "bsm/pipeline.hpp"

namespace bsm {

struct ErrorReport {
    double bad_pixel_rate = 0.0;  // percentage in [0, 100]
    std::string region = "all";
    double threshold = 1.0;
    long counted = 0;  // pixels with valid ground truth inside the region
    long bad = 0;
};

// Percentage of region pixels whose absolute disparity error exceeds the
// threshold. Pixels without ground truth are skipped; estimates the pipeline
// marked invalid count as wrong wherever ground truth exists.
inline ErrorReport bad_pixel_rate(const DisparityMap& result, const DisparityMap& gt,
                                  const GrayImage* region = nullptr,
                                  double threshold = 1.0) {
    if (result.width != gt.width || result.height != gt.height)
        throw DimensionMismatch("bad_pixel_rate: result and ground truth differ in size");
    if (region && (region->width != gt.width || region->height != gt.height))
        throw DimensionMismatch("bad_pixel_rate: region mask size mismatch");
    if (!(threshold > 0.0)) throw InvalidArgument("bad_pixel_rate: threshold must be > 0");

    ErrorReport report;
    report.threshold = threshold;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            if (!gt.is_valid(x, y)) continue;
            if (region && region->at(x, y) < 128.0f) continue;
            ++report.counted;
            if (!result.is_valid(x, y)) {
                ++report.bad;
                continue;
            }
            const double err = std::abs(double(result.d(x, y)) - double(gt.d(x, y)));
            if (err > threshold) ++report.bad;
        }
    }
    if (report.counted == 0) throw EmptyRegion("bad_pixel_rate: no pixels with ground truth in region");
    report.bad_pixel_rate = 100.0 * double(report.bad) / double(report.counted);
    return report;
}

// 3x3 grid of error percentages: entry (i, j) matches left condition i
// against right condition j.
struct RadiometricMatrix {
    std::array<std::array<double, 3>, 3> rate{};

    double diagonal_mean() const {
        return (rate[0][0] + rate[1][1] + rate[2][2]) / 3.0;
    }
    double off_diagonal_mean() const {
        double sum = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) sum += rate[size_t(i)][size_t(j)];
        return sum / 6.0;
    }
};

template <typename LeftSeries, typename RightSeries>
RadiometricMatrix radiometric_protocol(const LeftSeries& lefts, const RightSeries& rights,
                                       const DisparityMap& gt, const GrayImage* region,
                                       const SamplingPattern& pattern, const BsmConfig& cfg,
                                       double threshold = 1.0) {
    RadiometricMatrix m;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const PipelineResult res = run_pipeline(lefts[size_t(i)], rights[size_t(j)], pattern, cfg);
            m.rate[size_t(i)][size_t(j)] =
                bad_pixel_rate(res.refined, gt, region, threshold).bad_pixel_rate;
        }
    }
    return m;
}

struct SweepPoint {
    int n = 0;
    double avg_error = 0.0;  // mean bad-pixel percentage over the scenes
    double wall_time = 0.0;  // seconds
};

struct SweepScene {
    const RgbImage* left = nullptr;
    const RgbImage* right = nullptr;
    const DisparityMap* gt = nullptr;
    const GrayImage* region = nullptr;
    int d_max = 0;
};

// Runs the pipeline at each descriptor length and records accuracy and the
// wall time of the matching stages (pattern generation excluded).
inline std::vector<SweepPoint> length_sweep(const std::vector<SweepScene>& scenes,
                                            const std::vector<int>& n_values,
                                            const BsmConfig& base, double threshold = 1.0) {
    if (scenes.empty()) throw InvalidArgument("length_sweep: no scenes");
    for (int n : n_values)
        if (n < 64) throw InvalidArgument("length_sweep: descriptor lengths below 64 are not supported");

    std::vector<SweepPoint> points;
    points.reserve(n_values.size());
    for (int n : n_values) {
        BsmConfig cfg = base;
        cfg.n = n;
        const SamplingPattern pattern = generate_pattern(cfg);
        SweepPoint point;
        point.n = n;
        double err_sum = 0.0;
        double secs = 0.0;
        for (const SweepScene& scene : scenes) {
            cfg.d_max = scene.d_max;
            const auto t0 = std::chrono::steady_clock::now();
            const PipelineResult res = run_pipeline(*scene.left, *scene.right, pattern, cfg);
            const auto t1 = std::chrono::steady_clock::now();
            secs += std::chrono::duration<double>(t1 - t0).count();
            err_sum += bad_pixel_rate(res.refined, *scene.gt, scene.region, threshold).bad_pixel_rate;
        }
        point.avg_error = err_sum / double(scenes.size());
        point.wall_time = secs;
        points.push_back(point);
    }
    return points;
}

// Median-of-runs wall time of the full pipeline (descriptors through
// refinement) on one pair. Pattern generation and file I/O stay outside the
// timed section.
inline double time_pipeline(const RgbImage& left, const RgbImage& right,
                            const SamplingPattern& pattern, const BsmConfig& cfg,
                            int runs = 3) {
    if (runs < 1) throw InvalidArgument("time_pipeline: runs must be >= 1");
    std::vector<double> secs;
    secs.reserve(size_t(runs));
    for (int r = 0; r < runs; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const PipelineResult res = run_pipeline(left, right, pattern, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        (void)res;
        secs.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(secs.begin(), secs.end());
    return secs[secs.size() / 2];
}

// Least-squares line fit; returns R^2 (1.0 when ys are constant and the fit
// is exact).
inline double linear_fit_r2(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw InvalidArgument("linear_fit_r2: need two or more points");
    const double n = double(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw InvalidArgument("linear_fit_r2: x values are all equal");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double fit = slope * xs[i] + intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "n,avg_error,wall_time\n";
    char line[96];
    for (const SweepPoint& p : points) {
        std::snprintf(line, sizeof(line), "%d,%.6f,%.4f\n", p.n, p.avg_error, p.wall_time);
        out << line;
    }
}

inline void write_radiometric_csv(const std::string& path, const RadiometricMatrix& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "left_condition,right_condition,bad_pixel_rate\n";
    char line[64];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            std::snprintf(line, sizeof(line), "%d,%d,%.6f\n", i, j, m.rate[size_t(i)][size_t(j)]);
            out << line;
        }
    }
}

}  // namespace bsm
