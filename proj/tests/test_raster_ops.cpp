#include "doctest.h"
#include "support/oracle.hpp"
#include "vospp/raster_ops.hpp"

using namespace vospp;

namespace {

BinaryMask block(Extent e, int r0, int c0, int h, int w) {
    BinaryMask m(e);
    for (int r = r0; r < r0 + h; ++r)
        for (int c = c0; c < c0 + w; ++c) m.set(r, c);
    return m;
}

RgbFrame solid(Extent e, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbFrame f(e.width, e.height);
    for (int y = 0; y < e.height; ++y)
        for (int x = 0; x < e.width; ++x) {
            f.at(y, x)[0] = r;
            f.at(y, x)[1] = g;
            f.at(y, x)[2] = b;
        }
    return f;
}

}  // namespace

TEST_SUITE("raster_ops") {

TEST_CASE("connected components") {
    const Extent e{10, 10};
    CHECK(connected_components(BinaryMask(e)).components.empty());

    const BinaryMask two = mask_union(block(e, 0, 0, 2, 2), block(e, 5, 5, 2, 2));
    const ComponentSet set = connected_components(two, Connectivity::eight);
    REQUIRE(set.components.size() == 2);
    CHECK(area(set.components[0]) == 4);
    CHECK(area(set.components[1]) == 4);
    CHECK(set.components[0].get(0, 0));

    // diagonal touch: one component under 8, two under 4
    const BinaryMask diag = mask_union(block(e, 0, 0, 2, 2), block(e, 2, 2, 2, 2));
    CHECK(connected_components(diag, Connectivity::eight).components.size() == 1);
    CHECK(connected_components(diag, Connectivity::four).components.size() == 2);
}

TEST_CASE("connected components match flood fill") {
    oracle::Gen gen(21);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = gen.noise_mask({16, 16}, 0.45);
        for (int conn : {4, 8}) {
            int expected = 0;
            const std::vector<int> flood = oracle::flood_components(m, conn, &expected);
            const ComponentSet set = connected_components(m, conn == 4 ? Connectivity::four : Connectivity::eight);
            REQUIRE(static_cast<int>(set.components.size()) == expected);
            // the oracle numbers components in scanline order of first pixel too
            for (int k = 0; k < expected; ++k) {
                for (std::size_t i = 0; i < flood.size(); ++i) CHECK(set.components[k].test(i) == (flood[i] == k));
            }
        }
    }
}

TEST_CASE("erode") {
    const Extent e{12, 12};
    oracle::Gen gen(8);
    const BinaryMask m = gen.blob_mask(e, 4);
    CHECK(erode(m, 0) == m);
    CHECK_THROWS_AS(erode(m, -1), ContractError);

    const BinaryMask b3 = block(e, 4, 4, 3, 3);
    const BinaryMask center = erode(b3, 1);
    CHECK(area(center) == 1);
    CHECK(center.get(5, 5));

    const BinaryMask line = block(e, 5, 1, 1, 10);
    CHECK(erode(line, 1).empty());

    for (int radius = 1; radius <= 3; ++radius) CHECK(erode(m, radius) == oracle::erode(m, radius));
}

TEST_CASE("remove_small_components") {
    const Extent e{12, 12};
    const BinaryMask m = mask_union(block(e, 0, 0, 2, 2), block(e, 6, 6, 3, 3));
    CHECK(remove_small_components(m, 0) == m);
    CHECK(remove_small_components(m, 5) == block(e, 6, 6, 3, 3));

    oracle::Gen gen(9);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask r = gen.noise_mask({14, 14}, 0.4);
        const std::size_t min_area = static_cast<std::size_t>(gen.uniform(1, 6));
        int n = 0;
        const auto flood = oracle::flood_components(r, 8, &n);
        std::vector<std::size_t> sizes(n, 0);
        for (int v : flood)
            if (v >= 0) ++sizes[v];
        BinaryMask expected(r.extent());
        for (std::size_t i = 0; i < flood.size(); ++i) expected.bits()[i] = flood[i] >= 0 && sizes[flood[i]] >= min_area;
        CHECK(remove_small_components(r, min_area) == expected);
    }
}

TEST_CASE("fill_small_holes") {
    const Extent e{9, 9};
    const BinaryMask solid_block = block(e, 2, 2, 5, 5);
    CHECK(fill_small_holes(solid_block, 4) == solid_block);

    BinaryMask ring = block(e, 2, 2, 5, 5);
    ring.set(4, 4, false);
    CHECK(fill_small_holes(ring, 1) == solid_block);

    BinaryMask big_hole = block(e, 1, 1, 6, 6);
    for (int r = 3; r < 5; ++r)
        for (int c = 3; c < 5; ++c) big_hole.set(r, c, false);
    CHECK(fill_small_holes(big_hole, 3) == big_hole);
    CHECK(area(fill_small_holes(big_hole, 4)) == 36);

    // background touching the border is never a hole
    BinaryMask open = block(e, 0, 0, 9, 3);
    CHECK(fill_small_holes(open, 100) == open);
}

TEST_CASE("center_of_mass") {
    const Extent e{10, 10};
    BinaryMask one(e);
    one.set(3, 7);
    CHECK(center_of_mass(one).row == 3.0);
    CHECK(center_of_mass(one).col == 7.0);
    const Centroid c = center_of_mass(block(e, 0, 0, 2, 2));
    CHECK(c.row == 0.5);
    CHECK(c.col == 0.5);
    CHECK_THROWS_AS(center_of_mass(BinaryMask(e)), UndefinedCentroid);

    oracle::Gen gen(4);
    const BinaryMask m = gen.noise_mask(e, 0.3);
    double sr = 0, sc = 0, n = 0;
    for (int r = 0; r < 10; ++r)
        for (int col = 0; col < 10; ++col)
            if (m.get(r, col)) sr += r, sc += col, n += 1;
    CHECK(center_of_mass(m).row == doctest::Approx(sr / n).epsilon(1e-12));
    CHECK(center_of_mass(m).col == doctest::Approx(sc / n).epsilon(1e-12));
}

TEST_CASE("histogram_region") {
    const Extent e{5, 4};
    const RgbFrame gray = solid(e, 128, 128, 128);
    const RgbHistogram empty = histogram_region(gray, BinaryMask(e));
    CHECK(empty.counts.size() == 96);
    CHECK(empty.total() == 0);

    BinaryMask ten(e);
    for (int i = 0; i < 10; ++i) ten.bits()[i] = 1;
    const RgbHistogram h = histogram_region(gray, ten, 32);
    for (int ch = 0; ch < 3; ++ch) {
        for (int bin = 0; bin < 32; ++bin) CHECK(h.counts[ch * 32 + bin] == (bin == 16 ? 10u : 0u));
    }
    CHECK(manhattan_distance(h, histogram_region(gray, ten, 32)) == 0.0);
    CHECK_THROWS_AS(histogram_region(gray, ten, 3), ContractError);

    oracle::Gen gen(12);
    const RgbFrame f = gen.frame(e);
    const BinaryMask region = gen.noise_mask(e, 0.5);
    const RgbHistogram rh = histogram_region(f, region, 16);
    std::vector<std::uint32_t> expected(48, 0);
    for (int r = 0; r < e.height; ++r)
        for (int c = 0; c < e.width; ++c)
            if (region.get(r, c))
                for (int ch = 0; ch < 3; ++ch) ++expected[ch * 16 + f.at(r, c)[ch] / 16];
    CHECK(rh.counts == expected);
    CHECK(rh.total() == 3 * area(region));
}

TEST_CASE("manhattan_distance") {
    const Extent e{4, 4};
    const BinaryMask all(e, true);
    const RgbHistogram dark = histogram_region(solid(e, 0, 0, 0), all);
    const RgbHistogram light = histogram_region(solid(e, 255, 255, 255), all);
    CHECK(manhattan_distance(dark, light) == 2.0 * 3 * 16);
    CHECK(manhattan_distance(dark, dark) == 0.0);

    RgbHistogram other = dark;
    other.bins_per_channel = 16;
    other.counts.resize(48);
    CHECK_THROWS_AS(manhattan_distance(dark, other), ContractError);

    oracle::Gen gen(13);
    const RgbHistogram a = histogram_region(gen.frame(e), all, 8), b = histogram_region(gen.frame(e), all, 8);
    double expected = 0;
    for (std::size_t i = 0; i < a.counts.size(); ++i)
        expected += std::abs(static_cast<double>(a.counts[i]) - static_cast<double>(b.counts[i]));
    CHECK(manhattan_distance(a, b) == expected);
}

}
