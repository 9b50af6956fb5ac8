#pragma once

#include <climits>
#include <cstdint>
#include <span>
#include <vector>

#include "bsm/bitstring.hpp"
#include "bsm/descriptor.hpp"
#include "bsm/errors.hpp"
#include "bsm/image.hpp"
#include "bsm/parallel.hpp"

namespace bsm {

enum class RefView { left, right };

struct MatchParams {
    int d_max = 0;  // hypotheses d in [0, d_max - 1]
    RefView direction = RefView::left;
};

// popcount((b1 ^ b2) & mask).
inline int masked_hamming(const BitString& b1, const BitString& b2, const BitString& mask) {
    if (b1.size() != b2.size() || b1.size() != mask.size())
        throw DimensionMismatch("masked_hamming: bit lengths differ");
    return masked_hamming_words(b1.words().data(), b2.words().data(),
                                mask.words().data(), b1.words().size());
}

namespace detail {

// Column of the matching pixel in the other view, or -1 when it leaves the
// image. Left reference looks d columns to the left in the right view.
inline int other_column(int x, int d, RefView direction, int width) {
    const int xd = direction == RefView::left ? x - d : x + d;
    return (xd < 0 || xd >= width) ? -1 : xd;
}

}  // namespace detail

// Masked Hamming cost of assigning disparity d to pixel (x, y) of the
// reference view. A correspondence outside the other image costs n + 1,
// one worse than any achievable cost.
inline int cost(const DescriptorField& field_ref, const DescriptorField& field_other,
                int x, int y, int d, const MatchParams& params) {
    if (d < 0 || d >= params.d_max) throw InvalidArgument("cost: disparity out of range");
    if (x < 0 || x >= field_ref.width() || y < 0 || y >= field_ref.height())
        throw InvalidArgument("cost: pixel outside image");
    const int xd = detail::other_column(x, d, params.direction, field_other.width());
    if (xd < 0) return field_ref.bits() + 1;
    return masked_hamming_words(field_ref.descriptor(x, y).data(),
                                field_other.descriptor(xd, y).data(),
                                field_ref.mask(x, y).data(),
                                size_t(field_ref.words_per_string()));
}

// All d_max costs of one pixel.
inline std::vector<int> cost_slice(const DescriptorField& field_ref,
                                   const DescriptorField& field_other,
                                   int x, int y, const MatchParams& params) {
    std::vector<int> out(size_t(params.d_max));
    for (int d = 0; d < params.d_max; ++d) out[size_t(d)] = cost(field_ref, field_other, x, y, d, params);
    return out;
}

// Index of the minimum cost; ties go to the smaller disparity.
inline int wta_select(std::span<const int> costs) {
    if (costs.empty()) throw InvalidArgument("wta_select: empty cost array");
    int best = 0;
    for (size_t d = 1; d < costs.size(); ++d) {
        if (costs[d] < costs[size_t(best)]) best = int(d);
    }
    return best;
}

// Winner-take-all disparity selection over the reference view. Every output
// pixel is marked valid; the left/right check classifies them afterwards.
// Costs stream through a running minimum, so no cost volume is materialized.
inline DisparityMap wta(const DescriptorField& field_ref, const DescriptorField& field_other,
                        const MatchParams& params, int threads = 1, bool use_mask = true) {
    if (field_ref.width() != field_other.width() ||
        field_ref.height() != field_other.height() ||
        field_ref.bits() != field_other.bits())
        throw DimensionMismatch("wta: descriptor fields do not agree in size");
    if (params.d_max < 1) throw InvalidArgument("wta: d_max must be >= 1");

    const int width = field_ref.width();
    const size_t words = size_t(field_ref.words_per_string());
    DisparityMap out(width, field_ref.height());

    parallel_for(0, field_ref.height(), threads, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const uint64_t* ref = field_ref.descriptor(x, y).data();
            const uint64_t* mask = field_ref.mask(x, y).data();
            int best_cost = INT_MAX;
            int best_d = 0;
            for (int d = 0; d < params.d_max; ++d) {
                const int xd = detail::other_column(x, d, params.direction, width);
                if (xd < 0) continue;  // sentinel cost never beats a real one
                const uint64_t* other = field_other.descriptor(xd, y).data();
                const int c = use_mask ? masked_hamming_words(ref, other, mask, words)
                                       : hamming_words(ref, other, words);
                if (c < best_cost) {
                    best_cost = c;
                    best_d = d;
                }
            }
            out.d(x, y) = float(best_d);
        }
    });
    return out;
}

}  // namespace bsm
