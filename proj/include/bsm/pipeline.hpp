#pragma once

#include <optional>

#include "bsm/config.hpp"
#include "bsm/descriptor.hpp"
#include "bsm/errors.hpp"
#include "bsm/image.hpp"
#include "bsm/matcher.hpp"
#include "bsm/refine.hpp"

namespace bsm {

struct PipelineResult {
    DisparityMap refined;     // left view after consistency check + voting
    DisparityMap left_wta;    // masked winner-take-all, before the check
    DisparityMap right_wta;
    DisparityMap checked;     // left_wta with validity from the check
    std::optional<DisparityMap> unmasked;  // plain Hamming baseline stage
};

// Full two-view match: descriptors and masks for both views, masked WTA in
// both directions, left/right classification, then voting refinement of the
// left map. `want_unmasked` additionally produces the maskless WTA stage.
inline PipelineResult run_pipeline(const RgbImage& left, const RgbImage& right,
                                   const SamplingPattern& pattern, const BsmConfig& cfg,
                                   bool want_unmasked = false) {
    if (left.width != right.width || left.height != right.height)
        throw DimensionMismatch("pipeline: left/right dimensions differ");
    cfg.validate();

    const GrayImage gray_left = to_gray(left);
    const GrayImage gray_right = to_gray(right);
    const LabImage lab_left = to_lab(left);
    const LabImage lab_right = to_lab(right);

    const DescriptorField field_left = compute_field(gray_left, lab_left, pattern, cfg.threads);
    const DescriptorField field_right = compute_field(gray_right, lab_right, pattern, cfg.threads);

    PipelineResult result;
    result.left_wta = wta(field_left, field_right,
                          MatchParams{cfg.d_max, RefView::left}, cfg.threads);
    result.right_wta = wta(field_right, field_left,
                           MatchParams{cfg.d_max, RefView::right}, cfg.threads);
    if (want_unmasked) {
        result.unmasked = wta(field_left, field_right,
                              MatchParams{cfg.d_max, RefView::left}, cfg.threads,
                              /*use_mask=*/false);
    }

    result.checked = lr_check(result.left_wta, result.right_wta, cfg.lr_tolerance);
    const RefineParams refine_params{cfg.lambda_c, cfg.lambda_e, cfg.lr_tolerance,
                                     cfg.vote_radius};
    result.refined = vote_refine(result.checked, lab_left, refine_params, cfg.threads);
    return result;
}

inline PipelineResult run_pipeline(const RgbImage& left, const RgbImage& right,
                                   const BsmConfig& cfg, bool want_unmasked = false) {
    return run_pipeline(left, right, generate_pattern(cfg), cfg, want_unmasked);
}

}  // namespace bsm
