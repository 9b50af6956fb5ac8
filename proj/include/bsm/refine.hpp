#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bsm/errors.hpp"
#include "bsm/image.hpp"
#include "bsm/parallel.hpp"

namespace bsm {

struct RefineParams {
    double lambda_c = 9.0;    // color bandwidth
    double lambda_e = 16.0;   // spatial bandwidth
    double lr_tolerance = 1.0;
    int vote_radius = 20;     // half-width of the square voting neighborhood

    void validate() const {
        if (!(lambda_c > 0)) throw InvalidArgument("refine: lambda_c must be > 0");
        if (!(lambda_e > 0)) throw InvalidArgument("refine: lambda_e must be > 0");
        if (lr_tolerance < 0) throw InvalidArgument("refine: lr_tolerance must be >= 0");
        if (vote_radius < 1) throw InvalidArgument("refine: vote_radius must be >= 1");
    }
};

// Voting weight of candidate p for pixel x: color distance is the CIELAB
// absolute-difference sum, spatial distance plain Euclidean. Shared with the
// reference enumeration in the tests so results compare exactly.
inline double vote_weight(const Lab& at_x, const Lab& at_p, int dx, int dy,
                          double lambda_c, double lambda_e) {
    const double c = double(lab_sad(at_x, at_p));
    const double e = std::sqrt(double(dx) * dx + double(dy) * dy);
    return std::exp(-(c / lambda_c + e / lambda_e));
}

// Marks a left-view pixel valid when its correspondent in the right view is
// in bounds and the two disparities agree within tol. Disparities untouched.
inline DisparityMap lr_check(const DisparityMap& left, const DisparityMap& right,
                             double tol) {
    if (left.width != right.width || left.height != right.height)
        throw DimensionMismatch("lr_check: map dimensions differ");
    DisparityMap out = left;
    for (int y = 0; y < left.height; ++y) {
        for (int x = 0; x < left.width; ++x) {
            const float dl = left.d(x, y);
            const int xr = int(std::lround(double(x) - double(dl)));
            bool ok = xr >= 0 && xr < left.width;
            if (ok) ok = std::abs(double(dl) - double(right.d(xr, y))) <= tol;
            out.set_valid(x, y, ok);
        }
    }
    return out;
}

// Refills invalid pixels from valid neighbors: each valid pixel p in the
// square window votes for its (rounded) disparity with a bilateral weight;
// the best-supported disparity wins, ties toward the smaller one. Valid
// pixels pass through unchanged. A window with no valid pixel leaves the
// pixel invalid with disparity 0. Votes read only the input map, so invalid
// pixels never vote and the result is schedule-independent.
inline DisparityMap vote_refine(const DisparityMap& map, const LabImage& lab,
                                const RefineParams& params, int threads = 1) {
    if (map.width != lab.width || map.height != lab.height)
        throw DimensionMismatch("vote_refine: map/image dimensions differ");
    params.validate();

    int max_bin = 0;
    for (size_t i = 0; i < map.disparity.size(); ++i) {
        if (map.valid[i])
            max_bin = std::max(max_bin, int(std::lround(double(map.disparity[i]))));
    }

    DisparityMap out = map;
    const int radius = params.vote_radius;
    parallel_for(0, map.height, threads, [&](int y) {
        std::vector<double> bins(size_t(max_bin) + 1);
        for (int x = 0; x < map.width; ++x) {
            if (map.is_valid(x, y)) continue;

            std::fill(bins.begin(), bins.end(), 0.0);
            bool any = false;
            const Lab at_x = lab.at(x, y);
            const int y0 = std::max(0, y - radius);
            const int y1 = std::min(map.height - 1, y + radius);
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(map.width - 1, x + radius);
            for (int py = y0; py <= y1; ++py) {
                for (int px = x0; px <= x1; ++px) {
                    if (!map.is_valid(px, py)) continue;
                    const int bin = int(std::lround(double(map.d(px, py))));
                    bins[size_t(bin)] += vote_weight(at_x, lab.at(px, py), px - x, py - y,
                                                     params.lambda_c, params.lambda_e);
                    any = true;
                }
            }
            if (!any) {
                out.d(x, y) = 0.0f;
                out.set_valid(x, y, false);
                continue;
            }
            int best = 0;
            for (int bin = 1; bin <= max_bin; ++bin) {
                if (bins[size_t(bin)] > bins[size_t(best)]) best = bin;
            }
            out.d(x, y) = float(best);
            out.set_valid(x, y, true);
        }
    });
    return out;
}

}  // namespace bsm
