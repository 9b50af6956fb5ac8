#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bsm/bsm.hpp"

#ifndef BSM_CLI_PATH
#error "BSM_CLI_PATH must point at the bsm executable"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("bsm_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    RunResult run(const std::string& args) const {
        const std::string cmd = std::string(BSM_CLI_PATH) + " " + args + " >" +
                                path("stdout.txt") + " 2>" + path("stderr.txt");
        const int status = std::system(cmd.c_str());
        RunResult r;
        r.out = slurp(path("stdout.txt"));
        r.err = slurp(path("stderr.txt"));
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return r;
    }

    // Small shifted pair plus its ground truth, saved under the temp dir.
    bsm::SyntheticScene write_pair(int width = 64, int height = 48, int d = 3) {
        bsm::SyntheticScene scene = bsm::make_shifted_pair(width, height, d, 7);
        bsm::save_ppm(scene.left, path("left.ppm"));
        bsm::save_ppm(scene.right, path("right.ppm"));
        bsm::save_disparity(scene.gt_left, path("gt.pgm"), 16.0);
        return scene;
    }

    fs::path dir_;
};

TEST_F(CliTest, MatchWritesMapAndConfigSidecar) {
    write_pair();
    const RunResult r = run("match " + path("left.ppm") + " " + path("right.ppm") + " " +
                            path("out.pgm") + " --n 256 --d_max 6 --threads 2");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    ASSERT_TRUE(fs::exists(path("out.pgm")));
    ASSERT_TRUE(fs::exists(path("out.pgm.config.json")));

    const bsm::DisparityMap map = bsm::load_gt_disparity(path("out.pgm"), 16.0);
    EXPECT_EQ(map.width, 64);
    EXPECT_EQ(map.height, 48);

    const bsm::BsmConfig cfg = bsm::load_config(path("out.pgm.config.json"));
    EXPECT_EQ(cfg.n, 256);
    EXPECT_EQ(cfg.d_max, 6);
    EXPECT_EQ(cfg.threads, 2);
}

TEST_F(CliTest, MatchRecoversShiftEndToEnd) {
    write_pair(64, 48, 3);
    const RunResult r = run("match " + path("left.ppm") + " " + path("right.ppm") + " " +
                            path("out.pgm") + " --n 1024 --d_max 6");
    ASSERT_EQ(r.exit_code, 0) << r.err;

    const bsm::DisparityMap map = bsm::load_gt_disparity(path("out.pgm"), 16.0);
    const int margin = 13;  // half the sampling window
    for (int y = margin; y < map.height - margin; ++y)
        for (int x = margin + 3; x < map.width - margin; ++x) {
            ASSERT_TRUE(map.is_valid(x, y)) << x << "," << y;
            ASSERT_FLOAT_EQ(map.d(x, y), 3.0f) << x << "," << y;
        }
}

TEST_F(CliTest, RepeatedMatchRunsAreByteIdentical) {
    write_pair();
    const std::string flags = " --n 256 --d_max 6 --threads 3";
    const std::string base = "match " + path("left.ppm") + " " + path("right.ppm") + " ";
    ASSERT_EQ(run(base + path("a.pgm") + flags).exit_code, 0);
    ASSERT_EQ(run(base + path("b.pgm") + flags).exit_code, 0);
    EXPECT_EQ(slurp(path("a.pgm")), slurp(path("b.pgm")));
}

TEST_F(CliTest, StagesFlagWritesPerStageMaps) {
    write_pair();
    const RunResult r = run("match " + path("left.ppm") + " " + path("right.ppm") + " " +
                            path("out.pgm") + " --n 256 --d_max 6 --stages");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(fs::exists(path("out.unmasked.pgm")));
    EXPECT_TRUE(fs::exists(path("out.masked.pgm")));
    ASSERT_TRUE(fs::exists(path("out.refined.pgm")));
    EXPECT_EQ(slurp(path("out.refined.pgm")), slurp(path("out.pgm")));
}

TEST_F(CliTest, PatternFileOverridesSeed) {
    write_pair();
    const std::string base = "match " + path("left.ppm") + " " + path("right.ppm") + " ";
    ASSERT_EQ(run(base + path("a.pgm") + " --n 256 --d_max 6 --seed 9 --emit-pattern " +
                  path("pat.json"))
                  .exit_code,
              0);
    ASSERT_TRUE(fs::exists(path("pat.json")));
    ASSERT_EQ(run(base + path("b.pgm") + " --n 256 --d_max 6 --pattern " + path("pat.json"))
                  .exit_code,
              0);
    EXPECT_EQ(slurp(path("a.pgm")), slurp(path("b.pgm")));
}

TEST_F(CliTest, ConfigFileProvidesValuesAndFlagsOverride) {
    write_pair();
    bsm::BsmConfig file_cfg;
    file_cfg.n = 128;
    file_cfg.d_max = 6;
    bsm::save_config(file_cfg, path("cfg.json"));

    const RunResult r = run("match " + path("left.ppm") + " " + path("right.ppm") + " " +
                            path("out.pgm") + " --config " + path("cfg.json") + " --n 256");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const bsm::BsmConfig used = bsm::load_config(path("out.pgm.config.json"));
    EXPECT_EQ(used.n, 256);   // flag wins over the file
    EXPECT_EQ(used.d_max, 6); // file wins over the default
}

TEST_F(CliTest, MismatchedInputSizesFail) {
    write_pair(64, 48, 3);
    bsm::save_ppm(bsm::make_shifted_pair(32, 48, 3, 8).right, path("narrow.ppm"));
    const RunResult r = run("match " + path("left.ppm") + " " + path("narrow.ppm") + " " +
                            path("out.pgm") + " --n 256 --d_max 6");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("dimensions differ"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(path("out.pgm")));
}

TEST_F(CliTest, MissingInputFileFails) {
    write_pair();
    const RunResult r = run("match " + path("absent.ppm") + " " + path("right.ppm") + " " +
                            path("out.pgm") + " --n 256 --d_max 6");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("error:"), std::string::npos) << r.err;
}

TEST_F(CliTest, MatchWithoutDMaxFails) {
    write_pair();
    const RunResult r = run("match " + path("left.ppm") + " " + path("right.ppm") + " " +
                            path("out.pgm") + " --n 256");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("d_max"), std::string::npos) << r.err;
}

TEST_F(CliTest, NoSubcommandFails) {
    const RunResult r = run("");
    EXPECT_NE(r.exit_code, 0);
}

TEST_F(CliTest, EvalPerfectResultPrintsZero) {
    write_pair();
    const RunResult r = run("eval " + path("gt.pgm") + " " + path("gt.pgm"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("all"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("0.00"), std::string::npos) << r.out;
    EXPECT_EQ(count_lines(r.out), 1) << r.out;
}

TEST_F(CliTest, EvalWithRegionMasksPrintsOneRowEach) {
    write_pair();
    bsm::RgbImage white(64, 48);
    for (auto& px : white.pixels) px = {255, 255, 255};
    bsm::save_ppm(white, path("white.ppm"));

    const RunResult r = run("eval " + path("gt.pgm") + " " + path("gt.pgm") + " --nonocc " +
                            path("white.ppm") + " --all " + path("white.ppm") + " --disc " +
                            path("white.ppm"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(count_lines(r.out), 3) << r.out;
    EXPECT_NE(r.out.find("nonocc"), std::string::npos);
    EXPECT_NE(r.out.find("all"), std::string::npos);
    EXPECT_NE(r.out.find("disc"), std::string::npos);
}

TEST_F(CliTest, EvalMissingGroundTruthFails) {
    write_pair();
    const RunResult r = run("eval " + path("gt.pgm") + " " + path("absent.pgm"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("error:"), std::string::npos) << r.err;
}

TEST_F(CliTest, SweepWritesCsvAndFitLine) {
    const bsm::SyntheticScene scene = bsm::make_shifted_pair(64, 48, 3, 7);
    fs::create_directories(dir_ / "scene");
    bsm::save_ppm(scene.left, path("scene/im2.ppm"));
    bsm::save_ppm(scene.right, path("scene/im6.ppm"));
    bsm::save_disparity(scene.gt_left, path("scene/disp2.pgm"), 16.0);

    const RunResult r = run("sweep " + path("scene") + " --n_values 128,256 --d_max 6 --out " +
                            path("sweep.csv"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("R^2"), std::string::npos) << r.out;

    const std::string csv = slurp(path("sweep.csv"));
    EXPECT_EQ(csv.rfind("n,avg_error,wall_time\n", 0), 0u) << csv;
    EXPECT_EQ(count_lines(csv), 3) << csv;
    EXPECT_NE(csv.find("\n128,"), std::string::npos) << csv;
    EXPECT_NE(csv.find("\n256,"), std::string::npos) << csv;
}

TEST_F(CliTest, SweepUnknownSceneWithoutDMaxFails) {
    fs::create_directories(dir_ / "scene");
    const RunResult r = run("sweep " + path("scene"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("d_max"), std::string::npos) << r.err;
}

TEST_F(CliTest, RadiometricWritesGridAndCsv) {
    const bsm::SyntheticScene scene = bsm::make_shifted_pair(48, 32, 3, 7);
    const bsm::ExposureSeries series = bsm::make_exposure_series(scene.left, scene.right, 1.5, 21);
    fs::create_directories(dir_ / "set");
    for (int c = 0; c < 3; ++c) {
        bsm::save_ppm(series.lefts[size_t(c)], path("set/left_c" + std::to_string(c) + ".ppm"));
        bsm::save_ppm(series.rights[size_t(c)], path("set/right_c" + std::to_string(c) + ".ppm"));
    }
    bsm::save_disparity(scene.gt_left, path("set/gt.pgm"), 16.0);

    const RunResult r =
        run("radiometric " + path("set") + " --n 128 --d_max 6 --out " + path("radio.csv"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("diagonal mean"), std::string::npos) << r.out;

    const std::string csv = slurp(path("radio.csv"));
    EXPECT_EQ(csv.rfind("left_condition,right_condition,bad_pixel_rate\n", 0), 0u) << csv;
    EXPECT_EQ(count_lines(csv), 10) << csv;
}

TEST_F(CliTest, BenchPrintsMedianLine) {
    write_pair();
    const RunResult r = run("bench " + path("left.ppm") + " " + path("right.ppm") +
                            " --runs 1 --n 128 --d_max 6");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("median of 1 run:"), std::string::npos) << r.out;
}

}  // namespace
