#include "doctest.h"
#include "support/oracle.hpp"
#include "vospp/mask_model.hpp"

using namespace vospp;

namespace {

BinaryMask block(Extent e, int r0, int c0, int h, int w) {
    BinaryMask m(e);
    for (int r = r0; r < r0 + h; ++r)
        for (int c = c0; c < c0 + w; ++c) m.set(r, c);
    return m;
}

}  // namespace

TEST_SUITE("mask_model") {

TEST_CASE("frame and mask buffers are validated") {
    CHECK_THROWS_AS(RgbFrame(2, 2, std::vector<std::uint8_t>(11)), ContractError);
    CHECK_THROWS_AS(BinaryMask(Extent{2, 2}, std::vector<std::uint8_t>(3)), ContractError);
    CHECK_THROWS_AS(LabelMap(Extent{2, 2}, std::vector<ObjectId>(5)), ContractError);
    const BinaryMask m(Extent{2, 1}, std::vector<std::uint8_t>{0, 7});
    CHECK(m.bits()[1] == 1);
}

TEST_CASE("extract_object") {
    const Extent e{4, 4};
    LabelMap zeros(e);
    CHECK(area(extract_object(zeros, 1)) == 0);

    LabelMap top(e);
    for (int c = 0; c < 4; ++c) top.set(0, c, 1);
    CHECK(area(extract_object(top, 1)) == 4);

    CHECK_THROWS_AS(extract_object(top, kBackground), ContractError);

    oracle::Gen gen(11);
    const LabelMap random = gen.label_map({16, 16}, 5);
    for (ObjectId id = 1; id <= 5; ++id) {
        std::size_t expected = 0;
        for (ObjectId v : random.labels()) expected += v == id;
        CHECK(area(extract_object(random, id)) == expected);
    }
}

TEST_CASE("area") {
    CHECK(area(BinaryMask(Extent{5, 5})) == 0);
    CHECK(area(BinaryMask(Extent{3, 3}, true)) == 9);
    const Extent e{8, 8};
    CHECK(area(mask_union(block(e, 0, 0, 2, 2), block(e, 5, 5, 2, 2))) == 8);
}

TEST_CASE("set algebra examples") {
    const Extent e{8, 8};
    oracle::Gen gen(3);
    const BinaryMask a = gen.noise_mask(e, 0.5);
    CHECK(mask_union(a, a) == a);
    CHECK(mask_intersect(a, a) == a);
    CHECK(mask_subtract(a, a).empty());

    const BinaryMask x = block(e, 0, 0, 3, 3), y = block(e, 4, 4, 3, 3);
    CHECK(mask_intersect(x, y).empty());
    CHECK(area(mask_union(x, y)) == area(x) + area(y));

    const BinaryMask b = gen.noise_mask(e, 0.5);
    CHECK(mask_union(a, b) == oracle::per_pixel(a, b, [](bool p, bool q) { return p || q; }));
    CHECK(mask_intersect(a, b) == oracle::per_pixel(a, b, [](bool p, bool q) { return p && q; }));
    CHECK(mask_subtract(a, b) == oracle::per_pixel(a, b, [](bool p, bool q) { return p && !q; }));
    CHECK(mask_complement(a) == oracle::per_pixel(a, a, [](bool p, bool) { return !p; }));
}

TEST_CASE("dimension mismatch is a contract error") {
    const BinaryMask a(Extent{4, 4}), b(Extent{4, 5});
    CHECK_THROWS_AS(mask_union(a, b), ContractError);
    CHECK_THROWS_AS(mask_intersect(a, b), ContractError);
    CHECK_THROWS_AS(mask_subtract(a, b), ContractError);
}

TEST_CASE("shift_mask drops pixels leaving the raster") {
    const Extent e{6, 6};
    const BinaryMask m = block(e, 1, 3, 2, 3);
    const BinaryMask s = shift_mask(m, 1, 2);
    CHECK(area(s) == 2);
    CHECK(s.get(2, 5));
    CHECK(s.get(3, 5));
    CHECK(shift_mask(m, 0, 0) == m);
}

TEST_CASE("bundle validation and registry") {
    const Extent e{3, 2};
    LabelMap a(e), b(e);
    a.set(0, 0, 4);
    b.set(1, 2, 9);
    SequenceBundle bundle = make_bundle("s", {RgbFrame(3, 2), RgbFrame(3, 2)}, {a, b});
    CHECK(bundle.object_ids == std::set<ObjectId>{4, 9});
    CHECK(bundle.size() == 2);

    CHECK_THROWS_AS(make_bundle("s", {}, {}), ContractError);
    CHECK_THROWS_AS(make_bundle("s", {RgbFrame(3, 2)}, {a, b}), ContractError);
    CHECK_THROWS_AS(make_bundle("s", {RgbFrame(3, 2), RgbFrame(2, 2)}, {a, b}), ContractError);

    bundle.object_ids.erase(9);
    CHECK_THROWS_AS(bundle.validate(), ContractError);
}

TEST_CASE("labels and background partition every pixel") {
    oracle::Gen gen(5);
    const LabelMap m = gen.label_map({12, 9}, 4);
    std::vector<int> hits(m.extent().area(), 0);
    auto add = [&](const BinaryMask& mask) {
        for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += mask.test(i);
    };
    for (ObjectId id : m.ids()) add(extract_object(m, id));
    BinaryMask background(m.extent());
    for (std::size_t i = 0; i < hits.size(); ++i) background.bits()[i] = m.labels()[i] == kBackground;
    add(background);
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

}
