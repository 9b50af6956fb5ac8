#include <gtest/gtest.h>

#include "bsm/image.hpp"

using namespace bsm;

namespace {

RgbImage single_pixel(uint8_t r, uint8_t g, uint8_t b) {
    RgbImage img(1, 1);
    img.at(0, 0) = {r, g, b};
    return img;
}

}  // namespace

TEST(ToGray, WhiteAndBlack) {
    EXPECT_FLOAT_EQ(to_gray(single_pixel(255, 255, 255)).at(0, 0), 255.0f);
    EXPECT_FLOAT_EQ(to_gray(single_pixel(0, 0, 0)).at(0, 0), 0.0f);
}

TEST(ToGray, LumaWeights) {
    // 0.299*100 + 0.587*200 + 0.114*50 = 29.9 + 117.4 + 5.7
    EXPECT_NEAR(to_gray(single_pixel(100, 200, 50)).at(0, 0), 153.0f, 1e-3f);
}

TEST(ToGray, PreservesDimensions) {
    RgbImage img(7, 3);
    const GrayImage g = to_gray(img);
    EXPECT_EQ(g.width, 7);
    EXPECT_EQ(g.height, 3);
    EXPECT_EQ(g.values.size(), 21u);
}

TEST(ToLab, WhitePoint) {
    const Lab white = to_lab(single_pixel(255, 255, 255)).at(0, 0);
    EXPECT_NEAR(white.l, 100.0f, 0.01f);
    EXPECT_NEAR(white.a, 0.0f, 0.01f);
    EXPECT_NEAR(white.b, 0.0f, 0.01f);
}

TEST(ToLab, Black) {
    const Lab black = to_lab(single_pixel(0, 0, 0)).at(0, 0);
    EXPECT_NEAR(black.l, 0.0f, 1e-4f);
    EXPECT_NEAR(black.a, 0.0f, 1e-4f);
    EXPECT_NEAR(black.b, 0.0f, 1e-4f);
}

TEST(ToLab, PrimaryRed) {
    const Lab red = to_lab(single_pixel(255, 0, 0)).at(0, 0);
    EXPECT_NEAR(red.l, 53.2408f, 0.01f);
    EXPECT_NEAR(red.a, 80.0925f, 0.01f);
    EXPECT_NEAR(red.b, 67.2032f, 0.01f);
}

TEST(ToLab, LightnessRange) {
    for (int v = 0; v <= 255; v += 15) {
        const Lab lab = to_lab(single_pixel(uint8_t(v), uint8_t(v), uint8_t(v))).at(0, 0);
        EXPECT_GE(lab.l, 0.0f);
        EXPECT_LE(lab.l, 100.01f);
        EXPECT_NEAR(lab.a, 0.0f, 0.01f);  // gray axis
        EXPECT_NEAR(lab.b, 0.0f, 0.01f);
    }
}

TEST(LabSad, SumsChannelDistances) {
    const Lab a{10.0f, -5.0f, 3.0f};
    const Lab b{12.0f, -1.0f, -4.0f};
    EXPECT_FLOAT_EQ(lab_sad(a, b), 2.0f + 4.0f + 7.0f);
    EXPECT_FLOAT_EQ(lab_sad(a, a), 0.0f);
}

TEST(Image, ConstructorRejectsEmpty) {
    EXPECT_THROW(RgbImage(0, 5), InvalidArgument);
    EXPECT_THROW(GrayImage(5, 0), InvalidArgument);
    EXPECT_THROW(DisparityMap(0, 0), InvalidArgument);
}

TEST(DisparityMap, ValidityFlags) {
    DisparityMap map(3, 2);
    EXPECT_TRUE(map.is_valid(2, 1));
    map.set_valid(2, 1, false);
    EXPECT_FALSE(map.is_valid(2, 1));
    map.d(0, 0) = 4.5f;
    EXPECT_FLOAT_EQ(map.d(0, 0), 4.5f);
}

TEST(ClampCoord, Bounds) {
    EXPECT_EQ(clamp_coord(-3, 9), 0);
    EXPECT_EQ(clamp_coord(4, 9), 4);
    EXPECT_EQ(clamp_coord(12, 9), 9);
}
