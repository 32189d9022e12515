#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "marlow/quality.hpp"
#include "oracles.hpp"

using marlow::Image;

namespace {

Image add_uniform(const Image& img, double amp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    Image out = img;
    for (auto& v : out.data()) v += u(rng);
    return out;
}

}  // namespace

TEST(Psnr, IdenticalIsInfinite) {
    std::mt19937_64 rng(1);
    const Image a = oracle::random_image(rng, 9, 9, 3);
    EXPECT_EQ(marlow::psnr(a, a), marlow::kInfinitePsnr);
    EXPECT_TRUE(std::isinf(marlow::kInfinitePsnr));
}

TEST(Psnr, OneLevelUniformError) {
    Image a(16, 16, 1, 0.5), b(16, 16, 1, 0.5 + 1.0 / 255.0);
    EXPECT_NEAR(marlow::psnr(a, b), 48.1308, 1e-3);
    EXPECT_NEAR(marlow::psnr(a, b), 20.0 * std::log10(255.0), 1e-9);
}

TEST(Psnr, AgreesWithScalarLoop) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const int ch = trial % 2 ? 3 : 1;
        const Image a = oracle::random_image(rng, 13, 17, ch), b = oracle::random_image(rng, 13, 17, ch);
        EXPECT_NEAR(marlow::psnr(a, b), oracle::psnr(a, b), 1e-10);
    }
}

TEST(Psnr, SymmetricAndMonotone) {
    std::mt19937_64 rng(3);
    const Image a = oracle::random_image(rng, 20, 20, 1);
    double prev = marlow::kInfinitePsnr;
    for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        const Image b = add_uniform(a, amp, 99);
        EXPECT_EQ(marlow::psnr(a, b), marlow::psnr(b, a));
        const double p = marlow::psnr(a, b);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(Psnr, ShapeMismatchThrows) {
    EXPECT_THROW(marlow::psnr(Image(4, 4, 1), Image(4, 5, 1)), marlow::Error);
    EXPECT_THROW(marlow::psnr(Image(4, 4, 1), Image(4, 4, 3)), marlow::Error);
}

TEST(Ssim, IdenticalIsExactlyOne) {
    std::mt19937_64 rng(4);
    for (int ch : {1, 3}) {
        const Image a = oracle::random_image(rng, 23, 19, ch);
        EXPECT_EQ(marlow::ssim(a, a), 1.0);
    }
    EXPECT_EQ(marlow::ssim(Image(11, 11, 1, 0.0), Image(11, 11, 1, 0.0)), 1.0);
}

TEST(Ssim, ConstantZeroVersusOne) {
    const double c1 = 0.01 * 0.01;
    EXPECT_NEAR(marlow::ssim(Image(15, 12, 1, 0.0), Image(15, 12, 1, 1.0)), c1 / (1.0 + c1), 1e-15);
}

TEST(Ssim, AgreesWithDirectWindowFormula) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int ch = trial % 2 ? 3 : 1;
        const Image a = oracle::random_image(rng, 11 + trial, 14, ch);
        const Image b = add_uniform(a, 0.05 * (trial + 1), trial);
        EXPECT_NEAR(marlow::ssim(a, b), oracle::ssim(a, b), 1e-9);
    }
}

TEST(Ssim, SymmetricAndBounded) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const Image a = oracle::random_image(rng, 12, 12, 1);
        Image b = oracle::random_image(rng, 12, 12, 1);
        if (trial % 2) for (auto& v : b.data()) v = 1.0 - v;
        const double s = marlow::ssim(a, b);
        EXPECT_EQ(s, marlow::ssim(b, a));
        EXPECT_GE(s, -1.0);
        EXPECT_LE(s, 1.0);
    }
    // Anti-correlated structure drives SSIM negative, still bounded.
    Image a(12, 12, 1), b(12, 12, 1);
    for (int r = 0; r < 12; ++r)
        for (int c = 0; c < 12; ++c) {
            a.at(r, c) = (r + c) % 2;
            b.at(r, c) = 1 - a.at(r, c);
        }
    EXPECT_LT(marlow::ssim(a, b), 0.0);
    EXPECT_GE(marlow::ssim(a, b), -1.0);
}

TEST(Ssim, TooSmallThrows) { EXPECT_THROW(marlow::ssim(Image(10, 20, 1), Image(10, 20, 1)), marlow::Error); }

TEST(Evaluate, ColorCarriesPerChannelBreakdown) {
    std::mt19937_64 rng(7);
    const Image a = oracle::random_image(rng, 16, 16, 3);
    const Image b = add_uniform(a, 0.1, 3);
    const auto q = marlow::evaluate(b, a);
    ASSERT_TRUE(q.per_channel.has_value());
    ASSERT_EQ(q.per_channel->size(), 3u);
    double mean_ssim = 0.0;
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR((*q.per_channel)[k].psnr_db, oracle::psnr(b.channel(k), a.channel(k)), 1e-10);
        mean_ssim += (*q.per_channel)[k].ssim / 3;
    }
    EXPECT_NEAR(q.ssim, mean_ssim, 1e-12);
    EXPECT_NEAR(q.psnr_db, oracle::psnr(b, a), 1e-10);
    EXPECT_FALSE(marlow::evaluate(a.channel(0), a.channel(0)).per_channel.has_value());
}
