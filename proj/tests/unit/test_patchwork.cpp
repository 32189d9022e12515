#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "marlow/patchwork.hpp"
#include "oracles.hpp"

using marlow::Image;
using marlow::PatchGeometry;
using marlow::PatchGroup;
using marlow::Position;

namespace {

PatchGeometry geom(int n, int stride, int radius, int N, int ch = 1) {
    PatchGeometry g;
    g.n = n;
    g.stride = stride;
    g.search_radius = radius;
    g.group_size = N;
    g.channels = ch;
    return g;
}

PatchGroup random_group(std::mt19937_64& rng, int w, int h, int n, int N, int ch) {
    PatchGroup g{{}, n, ch};
    for (int i = 0; i < N; ++i)
        g.coords.push_back({static_cast<int>(rng() % (h - n + 1)), static_cast<int>(rng() % (w - n + 1))});
    return g;
}

}  // namespace

TEST(EnumerateRefs, SinglePositionWhenPatchFillsImage) {
    const auto refs = marlow::enumerate_refs(8, 8, geom(8, 4, 20, 1));
    ASSERT_EQ(refs.size(), 1u);
    EXPECT_EQ(refs[0], (Position{0, 0}));
}

TEST(EnumerateRefs, LastRowClampedToBorder) {
    // 12 rows, 8 columns: row starts 0 and 4 (= 12 - 8).
    const auto refs = marlow::enumerate_refs(8, 12, geom(8, 4, 20, 1));
    ASSERT_EQ(refs.size(), 2u);
    EXPECT_EQ(refs[0], (Position{0, 0}));
    EXPECT_EQ(refs[1], (Position{4, 0}));
}

TEST(EnumerateRefs, LatticeCount) {
    EXPECT_EQ(marlow::enumerate_refs(64, 64, geom(8, 4, 20, 1)).size(), 225u);
    const auto refs = marlow::enumerate_refs(13, 10, geom(5, 4, 20, 1));
    // rows {0,4,5}, cols {0,4,8}
    ASSERT_EQ(refs.size(), 9u);
    EXPECT_EQ(refs.back(), (Position{5, 8}));
    EXPECT_TRUE(std::is_sorted(refs.begin(), refs.end()));
}

TEST(EnumerateRefs, EveryPixelCovered) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const int stride = 1 + static_cast<int>(rng() % n);
        const int w = n + static_cast<int>(rng() % 20), h = n + static_cast<int>(rng() % 20);
        std::vector<int> cover(w * h, 0);
        for (auto p : marlow::enumerate_refs(w, h, geom(n, stride, 1, 1)))
            for (int y = 0; y < n; ++y)
                for (int x = 0; x < n; ++x) ++cover[(p.row + y) * w + p.col + x];
        EXPECT_EQ(std::count(cover.begin(), cover.end(), 0), 0);
    }
}

TEST(Geometry, RejectsInconsistentSettings) {
    EXPECT_THROW(geom(0, 1, 1, 1).validate(), marlow::Error);
    EXPECT_THROW(geom(4, 5, 1, 1).validate(), marlow::Error);
    EXPECT_THROW(geom(4, 0, 1, 1).validate(), marlow::Error);
    EXPECT_THROW(geom(4, 2, -1, 1).validate(), marlow::Error);
    EXPECT_THROW(geom(4, 2, 1, 0).validate(), marlow::Error);
    EXPECT_THROW(geom(4, 2, 1, 1, 2).validate(), marlow::Error);
}

TEST(MatchPatches, ConstantImageTiesBreakByRaster) {
    const Image img(10, 10, 1, 0.4);
    const auto g = marlow::match_patches(img, {1, 1}, geom(4, 2, 20, 5));
    const std::vector<Position> expected{{1, 1}, {0, 0}, {0, 1}, {0, 2}, {0, 3}};
    EXPECT_EQ(g.coords, expected);
}

TEST(MatchPatches, DuplicateOfReferenceRanksFirst) {
    std::mt19937_64 rng(21);
    Image img = oracle::random_image(rng, 16, 16, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) img.at(9 + y, 10 + x) = img.at(2 + y, 3 + x);
    const auto g = marlow::match_patches(img, {2, 3}, geom(4, 2, 16, 3));
    EXPECT_EQ(g.coords[0], (Position{2, 3}));
    EXPECT_EQ(g.coords[1], (Position{9, 10}));
    EXPECT_EQ(marlow::patch_distance(img, {2, 3}, {9, 10}, 4), 0.0);
}

TEST(MatchPatches, AgreesWithExhaustiveScan) {
    std::mt19937_64 rng(5);
    const Image img = oracle::random_image(rng, 16, 16, 1);
    const auto g = geom(4, 2, 16, 8);
    for (int r = 0; r <= 12; ++r)
        for (int c = 0; c <= 12; ++c) EXPECT_EQ(marlow::match_patches(img, {r, c}, g).coords, oracle::brute_match(img, {r, c}, g));
}

TEST(MatchPatches, SmallWindowsAndColorAgreeWithExhaustiveScan) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const int ch = trial % 2 ? 3 : 1;
        const int n = 2 + static_cast<int>(rng() % 3);
        const int w = n + 4 + static_cast<int>(rng() % 10), h = n + 4 + static_cast<int>(rng() % 10);
        Image img = oracle::random_image(rng, w, h, ch);
        // Quantize so that exact cost ties occur.
        for (auto& v : img.data()) v = std::floor(v * 3) / 3;
        const auto g = geom(n, 1, static_cast<int>(rng() % 4), 2 + static_cast<int>(rng() % 12), ch);
        const Position ref{static_cast<int>(rng() % (h - n + 1)), static_cast<int>(rng() % (w - n + 1))};
        EXPECT_EQ(marlow::match_patches(img, ref, g).coords, oracle::brute_match(img, ref, g));
    }
}

TEST(MatchPatches, TooFewPositionsThrows) {
    EXPECT_THROW(marlow::match_patches(Image(5, 5, 1), {0, 0}, geom(4, 1, 4, 5)), marlow::Error);
}

TEST(ExtractGroup, LayoutOfSinglePatch) {
    const Image img(2, 2, 1, std::vector<double>{0.1, 0.2, 0.3, 0.4});
    const auto m = marlow::extract_group(img, PatchGroup{{{0, 0}}, 2, 1});
    ASSERT_EQ(m.rows(), 4);
    EXPECT_EQ(m(0, 0), 0.1);
    EXPECT_EQ(m(1, 0), 0.2);
    EXPECT_EQ(m(2, 0), 0.3);
    EXPECT_EQ(m(3, 0), 0.4);
}

TEST(ExtractGroup, ConstantImageGivesRankOne) {
    const Image img(6, 6, 1, 0.3);
    const auto m = marlow::extract_group(img, PatchGroup{{{0, 0}, {2, 1}, {1, 2}}, 3, 1});
    EXPECT_TRUE((m.array() == 0.3).all());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    EXPECT_EQ(svd.setThreshold(1e-12).rank(), 1);
}

TEST(ExtractGroup, ColorBlocksInChannelOrder) {
    const Image img(1, 1, 3, std::vector<double>{0.1, 0.5, 0.9});
    const auto m = marlow::extract_group(img, PatchGroup{{{0, 0}}, 1, 3});
    EXPECT_EQ(m(0, 0), 0.1);
    EXPECT_EQ(m(1, 0), 0.5);
    EXPECT_EQ(m(2, 0), 0.9);
}

TEST(ExtractGroup, IsLinear) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int ch = trial % 2 ? 3 : 1;
        const Image a = oracle::random_image(rng, 9, 7, ch), b = oracle::random_image(rng, 9, 7, ch);
        const auto g = random_group(rng, 9, 7, 3, 5, ch);
        const double alpha = 0.3, beta = -1.7;
        Image comb(9, 7, ch);
        for (std::size_t i = 0; i < comb.size(); ++i) comb.data()[i] = alpha * a.data()[i] + beta * b.data()[i];
        const Eigen::MatrixXd lhs = marlow::extract_group(comb, g);
        const Eigen::MatrixXd rhs = alpha * marlow::extract_group(a, g) + beta * marlow::extract_group(b, g);
        EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(ExtractGroup, ScatterIsAdjoint) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const int ch = trial % 2 ? 3 : 1;
        const Image x = oracle::random_image(rng, 10, 8, ch);
        const auto g = random_group(rng, 10, 8, 4, 6, ch);
        const Eigen::MatrixXd p = oracle::random_matrix(rng, 16 * ch, 6);
        Image scattered(10, 8, ch, 0.0);
        marlow::scatter_group(p, g, scattered, nullptr);
        const double lhs = (marlow::extract_group(x, g).array() * p.array()).sum();
        double rhs = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) rhs += x.data()[i] * scattered.data()[i];
        EXPECT_LE(std::abs(lhs - rhs), 1e-12);
    }
}

TEST(Aggregate, SinglePatchReproducesFootprint) {
    std::mt19937_64 rng(14);
    const Image img = oracle::random_image(rng, 3, 3, 1);
    const PatchGroup g{{{0, 0}}, 3, 1};
    const std::vector<marlow::GroupEstimate> est{{g, marlow::extract_group(img, g)}};
    EXPECT_EQ(marlow::aggregate(est, 3, 3, 1), img);
}

TEST(Aggregate, PartitionOfUnity) {
    const auto refs = marlow::enumerate_refs(11, 9, geom(4, 3, 1, 1));
    std::vector<marlow::GroupEstimate> est;
    for (auto p : refs) est.push_back({PatchGroup{{p}, 4, 1}, Eigen::MatrixXd::Constant(16, 1, 0.625)});
    const Image out = marlow::aggregate(est, 11, 9, 1);
    for (double v : out.data()) EXPECT_EQ(v, 0.625);
}

TEST(Aggregate, OverlapIsUniformAverage) {
    std::vector<marlow::GroupEstimate> est{
        {PatchGroup{{{0, 0}}, 2, 1}, Eigen::MatrixXd::Zero(4, 1)},
        {PatchGroup{{{0, 1}}, 2, 1}, Eigen::MatrixXd::Ones(4, 1)},
    };
    const Image out = marlow::aggregate(est, 3, 2, 1);
    EXPECT_EQ(out.at(0, 0), 0.0);
    EXPECT_EQ(out.at(1, 1), 0.5);
    EXPECT_EQ(out.at(0, 2), 1.0);
}

TEST(Aggregate, ExtractThenAggregateIsIdentity) {
    std::mt19937_64 rng(15);
    for (int ch : {1, 3}) {
        const Image img = oracle::random_image(rng, 20, 17, ch);
        const auto g = geom(5, 4, 6, 6, ch);
        std::vector<marlow::GroupEstimate> est;
        for (auto ref : marlow::enumerate_refs(20, 17, g)) {
            auto grp = marlow::match_patches(img, ref, g);
            est.push_back({grp, marlow::extract_group(img, grp)});
        }
        const Image out = marlow::aggregate(est, 20, 17, ch);
        for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(out.data()[i], img.data()[i], 1e-15);
    }
}

TEST(Aggregate, UncoveredPixelThrows) {
    std::vector<marlow::GroupEstimate> est{{PatchGroup{{{0, 0}}, 2, 1}, Eigen::MatrixXd::Zero(4, 1)}};
    EXPECT_THROW(marlow::aggregate(est, 3, 3, 1), marlow::Error);
}
