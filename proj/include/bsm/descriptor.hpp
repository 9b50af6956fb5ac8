#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "bsm/bitstring.hpp"
#include "bsm/errors.hpp"
#include "bsm/image.hpp"
#include "bsm/parallel.hpp"
#include "bsm/pattern.hpp"

namespace bsm {

// Per-pixel descriptor/mask pair for a whole view, stored as flat packed
// words for locality. All strings share bit length n; pad bits are zero.
class DescriptorField {
public:
    DescriptorField() = default;
    DescriptorField(int width, int height, int n_bits)
        : width_(width), height_(height), n_(n_bits), words_(words_for_bits(n_bits)),
          descriptor_words_(size_t(width) * size_t(height) * size_t(words_), 0),
          mask_words_(size_t(width) * size_t(height) * size_t(words_), 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int bits() const { return n_; }
    int words_per_string() const { return words_; }

    std::span<const uint64_t> descriptor(int x, int y) const {
        return {&descriptor_words_[index(x, y)], size_t(words_)};
    }
    std::span<const uint64_t> mask(int x, int y) const {
        return {&mask_words_[index(x, y)], size_t(words_)};
    }
    std::span<uint64_t> descriptor(int x, int y) {
        return {&descriptor_words_[index(x, y)], size_t(words_)};
    }
    std::span<uint64_t> mask(int x, int y) {
        return {&mask_words_[index(x, y)], size_t(words_)};
    }

    BitString descriptor_at(int x, int y) const { return to_bitstring(descriptor(x, y)); }
    BitString mask_at(int x, int y) const { return to_bitstring(mask(x, y)); }

private:
    size_t index(int x, int y) const {
        return (size_t(y) * size_t(width_) + size_t(x)) * size_t(words_);
    }
    BitString to_bitstring(std::span<const uint64_t> words) const {
        BitString out(n_);
        std::copy(words.begin(), words.end(), out.words().begin());
        return out;
    }

    int width_ = 0, height_ = 0, n_ = 0, words_ = 0;
    std::vector<uint64_t> descriptor_words_;
    std::vector<uint64_t> mask_words_;
};

// Threshold for the mask: the floor(n/4)-th smallest weight, rank counted
// from 1 (at least rank 1 so a constant patch keeps all its pairs).
inline float quarter_threshold(std::span<const float> weights, std::vector<float>& scratch) {
    const size_t n = weights.size();
    if (n == 0) throw InvalidArgument("quarter_threshold: empty weight sequence");
    const size_t rank = std::max<size_t>(1, n / 4);
    scratch.assign(weights.begin(), weights.end());
    std::nth_element(scratch.begin(), scratch.begin() + (rank - 1), scratch.end());
    return scratch[rank - 1];
}

inline float quarter_threshold(std::span<const float> weights) {
    std::vector<float> scratch;
    return quarter_threshold(weights, scratch);
}

namespace detail {

// Sets bit i of out for each i where bit_of(i) is true, packing through a
// word accumulator; pad bits are never touched.
template <typename BitOf>
inline void pack_bits(int n, std::span<uint64_t> out, BitOf&& bit_of) {
    uint64_t acc = 0;
    for (int i = 0; i < n; ++i) {
        if (bit_of(i)) acc |= uint64_t{1} << (i & 63);
        if ((i & 63) == 63) {
            out[size_t(i >> 6)] = acc;
            acc = 0;
        }
    }
    if (n & 63) out[size_t(n >> 6)] = acc;
}

inline void descriptor_clamped(const GrayImage& gray, const SamplingPattern& pat,
                               int x, int y, std::span<uint64_t> out) {
    const int xmax = gray.width - 1;
    const int ymax = gray.height - 1;
    pack_bits(pat.n, out, [&](int i) {
        const PairOffsets& p = pat.pairs[size_t(i)];
        const float ip = gray.at(clamp_coord(x + p.px, xmax), clamp_coord(y + p.py, ymax));
        const float iq = gray.at(clamp_coord(x + p.qx, xmax), clamp_coord(y + p.qy, ymax));
        return ip > iq;
    });
}

// Scratch shared across pixels of one worker.
struct MaskScratch {
    std::vector<float> sad_table;  // (2*half+1)^2 color distances around the pixel
    std::vector<float> weights;
    std::vector<float> select;
};

// Fills the per-offset color-distance table for the window around (x, y),
// then thresholds the per-pair weights max(sad[p], sad[q]) at the quarter
// rank. `clamped` selects border-safe loads; interior pixels take straight
// strides. Both paths compute identical values where they overlap.
inline void mask_at_pixel(const LabImage& lab, const SamplingPattern& pat,
                          std::span<const uint32_t> table_p, std::span<const uint32_t> table_q,
                          int x, int y, bool clamped, MaskScratch& scratch,
                          std::span<uint64_t> out) {
    const int half = pat.half_window();
    const int side = 2 * half + 1;
    scratch.sad_table.resize(size_t(side) * size_t(side));
    scratch.weights.resize(size_t(pat.n));

    const Lab center = lab.at(x, y);
    float* table = scratch.sad_table.data();
    if (clamped) {
        const int xmax = lab.width - 1;
        const int ymax = lab.height - 1;
        for (int dy = -half; dy <= half; ++dy) {
            const int yy = clamp_coord(y + dy, ymax);
            for (int dx = -half; dx <= half; ++dx) {
                table[(dy + half) * side + (dx + half)] =
                    lab_sad(center, lab.at(clamp_coord(x + dx, xmax), yy));
            }
        }
    } else {
        for (int dy = -half; dy <= half; ++dy) {
            const Lab* row = &lab.at(x - half, y + dy);
            float* trow = table + (dy + half) * side;
            for (int dx = 0; dx < side; ++dx) trow[dx] = lab_sad(center, row[dx]);
        }
    }

    float* weights = scratch.weights.data();
    for (int i = 0; i < pat.n; ++i) {
        weights[i] = std::max(table[table_p[size_t(i)]], table[table_q[size_t(i)]]);
    }
    const float threshold =
        quarter_threshold({weights, size_t(pat.n)}, scratch.select);
    pack_bits(pat.n, out, [&](int i) { return weights[i] <= threshold; });
}

// Window-table indices for each pair endpoint, shared by all pixels.
inline void build_table_indices(const SamplingPattern& pat, std::vector<uint32_t>& tp,
                                std::vector<uint32_t>& tq) {
    const int half = pat.half_window();
    const int side = 2 * half + 1;
    tp.resize(size_t(pat.n));
    tq.resize(size_t(pat.n));
    for (int i = 0; i < pat.n; ++i) {
        const PairOffsets& p = pat.pairs[size_t(i)];
        tp[size_t(i)] = uint32_t((p.py + half) * side + (p.px + half));
        tq[size_t(i)] = uint32_t((p.qy + half) * side + (p.qx + half));
    }
}

}  // namespace detail

// Descriptor of one pixel: bit i says whether intensity at the first endpoint
// of pair i exceeds the second. Sample coordinates clamp at the image border.
inline BitString compute_descriptor(const GrayImage& gray, const SamplingPattern& pat,
                                    int x, int y) {
    if (x < 0 || x >= gray.width || y < 0 || y >= gray.height)
        throw InvalidArgument("compute_descriptor: pixel outside image");
    BitString out(pat.n);
    detail::descriptor_clamped(gray, pat, x, y, out.words());
    return out;
}

// Mask of one pixel: bit i survives when both endpoints of pair i are
// photometrically close to the pixel (weight within the quarter-rank
// threshold), ties at the threshold included.
inline BitString compute_mask(const LabImage& lab, const SamplingPattern& pat,
                              int x, int y) {
    if (x < 0 || x >= lab.width || y < 0 || y >= lab.height)
        throw InvalidArgument("compute_mask: pixel outside image");
    std::vector<uint32_t> tp, tq;
    detail::build_table_indices(pat, tp, tq);
    detail::MaskScratch scratch;
    BitString out(pat.n);
    detail::mask_at_pixel(lab, pat, tp, tq, x, y, /*clamped=*/true, scratch, out.words());
    return out;
}

// Whole-view descriptors and masks. Row-parallel; every pixel is a pure
// function of the inputs, so the result is schedule-independent.
inline DescriptorField compute_field(const GrayImage& gray, const LabImage& lab,
                                     const SamplingPattern& pat, int threads = 1) {
    if (gray.width != lab.width || gray.height != lab.height)
        throw DimensionMismatch("compute_field: gray/lab dimensions differ");

    const int width = gray.width;
    const int height = gray.height;
    const int half = pat.half_window();
    DescriptorField field(width, height, pat.n);

    std::vector<uint32_t> tp, tq;
    detail::build_table_indices(pat, tp, tq);

    // Linear strides for the interior fast path.
    std::vector<int32_t> op(size_t(pat.n)), oq(size_t(pat.n));
    for (int i = 0; i < pat.n; ++i) {
        const PairOffsets& p = pat.pairs[size_t(i)];
        op[size_t(i)] = p.py * width + p.px;
        oq[size_t(i)] = p.qy * width + p.qx;
    }

    parallel_for(0, height, threads, [&](int y) {
        detail::MaskScratch scratch;
        const bool y_interior = y >= half && y + half < height;
        for (int x = 0; x < width; ++x) {
            const bool interior = y_interior && x >= half && x + half < width;
            if (interior) {
                const float* base = &gray.values[size_t(y) * size_t(width) + size_t(x)];
                detail::pack_bits(pat.n, field.descriptor(x, y), [&](int i) {
                    return base[op[size_t(i)]] > base[oq[size_t(i)]];
                });
            } else {
                detail::descriptor_clamped(gray, pat, x, y, field.descriptor(x, y));
            }
            detail::mask_at_pixel(lab, pat, tp, tq, x, y, !interior, scratch,
                                  field.mask(x, y));
        }
    });
    return field;
}

}  // namespace bsm
