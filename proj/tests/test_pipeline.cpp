#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "bsm/eval.hpp"
#include "bsm/image_io.hpp"
#include "bsm/pipeline.hpp"
#include "bsm/synthetic.hpp"

using namespace bsm;

namespace {

std::string temp_file(const std::string& name) {
    return (std::filesystem::path(::testing::TempDir()) / name).string();
}

std::string read_bytes(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST(Pipeline, RecoversConstantShift) {
    const SyntheticScene scene = make_shifted_pair(48, 32, 5, 3);
    BsmConfig cfg;
    cfg.n = 1024;
    cfg.d_max = 8;
    const PipelineResult res = run_pipeline(scene.left, scene.right, cfg);
    // interior: window fits and the correspondence strip is clean
    const int margin = cfg.window / 2;
    for (int y = margin; y < 32 - margin; ++y) {
        for (int x = margin + 5; x < 48 - margin; ++x) {
            EXPECT_TRUE(res.refined.is_valid(x, y));
            EXPECT_FLOAT_EQ(res.refined.d(x, y), 5.0f) << "pixel " << x << "," << y;
        }
    }
}

TEST(Pipeline, ByteIdenticalAcrossThreadCounts) {
    const SyntheticScene scene = make_synthetic_scene(40, 32, 8, 7);
    BsmConfig cfg;
    cfg.n = 512;
    cfg.d_max = 8;

    cfg.threads = 1;
    const PipelineResult serial = run_pipeline(scene.left, scene.right, cfg);
    cfg.threads = 5;
    const PipelineResult threaded = run_pipeline(scene.left, scene.right, cfg);

    EXPECT_TRUE(serial.refined == threaded.refined);
    EXPECT_TRUE(serial.left_wta == threaded.left_wta);
    EXPECT_TRUE(serial.right_wta == threaded.right_wta);
    EXPECT_TRUE(serial.checked == threaded.checked);

    const std::string p1 = temp_file("serial.pgm");
    const std::string p5 = temp_file("threaded.pgm");
    save_disparity(serial.refined, p1, 16.0);
    save_disparity(threaded.refined, p5, 16.0);
    EXPECT_EQ(read_bytes(p1), read_bytes(p5));
}

TEST(Pipeline, StagesExposeIntermediateMaps) {
    const SyntheticScene scene = make_shifted_pair(32, 24, 3, 11);
    BsmConfig cfg;
    cfg.n = 256;
    cfg.d_max = 6;
    const PipelineResult with = run_pipeline(scene.left, scene.right,
                                             generate_pattern(cfg), cfg, true);
    ASSERT_TRUE(with.unmasked.has_value());
    EXPECT_EQ(with.unmasked->width, 32);

    const PipelineResult without = run_pipeline(scene.left, scene.right,
                                                generate_pattern(cfg), cfg, false);
    EXPECT_FALSE(without.unmasked.has_value());
    EXPECT_TRUE(with.refined == without.refined);
}

TEST(Pipeline, CheckedStageMarksOcclusionsInvalid) {
    const SyntheticScene scene = make_synthetic_scene(64, 48, 10, 13);
    BsmConfig cfg;
    cfg.n = 512;
    cfg.d_max = 10;
    const PipelineResult res = run_pipeline(scene.left, scene.right, cfg);
    int invalid_checked = 0, invalid_refined = 0;
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 64; ++x) {
            invalid_checked += !res.checked.is_valid(x, y);
            invalid_refined += !res.refined.is_valid(x, y);
        }
    }
    EXPECT_GT(invalid_checked, 0);  // occlusions and the left strip fail the check
    EXPECT_LE(invalid_refined, invalid_checked);  // voting refills
}

TEST(Pipeline, MaskImprovesOrMatchesAccuracyNearEdges) {
    const SyntheticScene scene = make_synthetic_scene(96, 72, 12, 17);
    BsmConfig cfg;
    cfg.n = 1024;
    cfg.d_max = 12;
    const PipelineResult res = run_pipeline(scene.left, scene.right,
                                            generate_pattern(cfg), cfg, true);
    const ErrorReport masked = bad_pixel_rate(res.left_wta, scene.gt_left, &scene.mask_nonocc);
    const ErrorReport unmasked = bad_pixel_rate(*res.unmasked, scene.gt_left, &scene.mask_nonocc);
    EXPECT_LE(masked.bad_pixel_rate, unmasked.bad_pixel_rate + 0.5);
}

TEST(Pipeline, MismatchedInputSizesThrow) {
    const RgbImage left(20, 20);
    const RgbImage right(21, 20);
    BsmConfig cfg;
    cfg.n = 64;
    cfg.d_max = 4;
    EXPECT_THROW(run_pipeline(left, right, cfg), DimensionMismatch);
}

TEST(Pipeline, UnsetDMaxThrows) {
    const RgbImage left(20, 20);
    const RgbImage right(20, 20);
    BsmConfig cfg;
    cfg.n = 64;
    EXPECT_THROW(run_pipeline(left, right, cfg), InvalidArgument);
}
