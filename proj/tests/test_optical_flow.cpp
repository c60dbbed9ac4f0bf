#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support/oracle.hpp"
#include "vospp/optical_flow.hpp"
#include "vospp/synthetic.hpp"

using namespace vospp;

namespace {

RgbFrame textured(int width, int height, std::uint64_t seed) {
    SceneScript s;
    s.width = width;
    s.height = height;
    s.frames = 1;
    s.seed = seed;
    s.background = {{120, 120, 120}, 60, 4.0};
    return render(s).clean.frames[0];
}

// dst(r, c) = src(r - dr, c - dc) with replicated borders.
RgbFrame translate(const RgbFrame& src, int dr, int dc) {
    RgbFrame out(src.width(), src.height());
    for (int r = 0; r < src.height(); ++r)
        for (int c = 0; c < src.width(); ++c) {
            const int sr = std::clamp(r - dr, 0, src.height() - 1);
            const int sc = std::clamp(c - dc, 0, src.width() - 1);
            std::copy_n(src.at(sr, sc), 3, out.at(r, c));
        }
    return out;
}

// dst(r, c) = src(r, c - 0.5) by bilinear resampling.
RgbFrame half_pixel_right(const RgbFrame& src) {
    RgbFrame out(src.width(), src.height());
    for (int r = 0; r < src.height(); ++r)
        for (int c = 0; c < src.width(); ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const int left = src.at(r, std::max(c - 1, 0))[ch];
                out.at(r, c)[ch] = static_cast<std::uint8_t>((left + src.at(r, c)[ch] + 1) / 2);
            }
    return out;
}

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

// Median of each component over pixels at least `margin` from the border.
std::pair<double, double> interior_median(const FlowField& f, int margin) {
    std::vector<double> rows, cols;
    for (int r = margin; r < f.height() - margin; ++r)
        for (int c = margin; c < f.width() - margin; ++c) {
            rows.push_back(f.drow(r, c));
            cols.push_back(f.dcol(r, c));
        }
    return {median(rows), median(cols)};
}

}  // namespace

TEST_SUITE("optical_flow") {

TEST_CASE("params validation") {
    FlowParams p;
    CHECK_NOTHROW(p.validate());
    p.window_size = 4;
    CHECK_THROWS_AS(p.validate(), ContractError);
    p = {};
    p.pyramid_levels = 0;
    CHECK_THROWS_AS(p.validate(), ContractError);
    p = {};
    p.iterations_per_level = 0;
    CHECK_THROWS_AS(p.validate(), ContractError);
    CHECK_THROWS_AS(estimate_flow(RgbFrame(8, 8), RgbFrame(9, 8)), ContractError);
}

TEST_CASE("identical frames give zero flow") {
    const RgbFrame f = textured(64, 48, 3);
    const FlowEstimate e = estimate_flow(f, f);
    float worst = 0;
    for (std::size_t i = 0; i < e.flow.drow_plane().size(); ++i) {
        worst = std::max({worst, std::abs(e.flow.drow_plane()[i]), std::abs(e.flow.dcol_plane()[i])});
    }
    CHECK(worst < 1e-3f);
    CHECK_FALSE(e.degenerate);
}

TEST_CASE("integer translation is recovered") {
    const RgbFrame src = textured(96, 96, 5);
    for (auto [dr, dc] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{-2, 1}}) {
        CAPTURE(dr);
        CAPTURE(dc);
        const FlowEstimate e = estimate_flow(src, translate(src, dr, dc));
        const auto [mr, mc] = interior_median(e.flow, 10);
        CHECK(std::abs(mr - dr) < 0.5);
        CHECK(std::abs(mc - dc) < 0.5);
    }
}

TEST_CASE("extra iterations do not drift away from a converged estimate") {
    const RgbFrame src = textured(64, 64, 12);
    const RgbFrame dst = translate(src, 1, 0);
    for (int iterations : {5, 50}) {
        CAPTURE(iterations);
        FlowParams p;
        p.iterations_per_level = iterations;
        const FlowEstimate e = estimate_flow(src, dst, p);
        int far = 0;
        for (int r = 8; r < 56; ++r)
            for (int c = 8; c < 56; ++c) far += std::hypot(e.flow.drow(r, c) - 1.0f, e.flow.dcol(r, c)) > 0.1f;
        CHECK(far == 0);
    }
}

TEST_CASE("half-pixel translation is recovered") {
    const RgbFrame src = textured(96, 96, 8);
    const FlowEstimate e = estimate_flow(src, half_pixel_right(src));
    const auto [mr, mc] = interior_median(e.flow, 10);
    CHECK(std::abs(mc - 0.5) < 0.25);
    CHECK(std::abs(mr) < 0.25);
}

TEST_CASE("constant frames are degenerate with zero flow") {
    RgbFrame flat(40, 30);
    std::fill(flat.pixels().begin(), flat.pixels().end(), 77);
    const FlowEstimate e = estimate_flow(flat, flat);
    CHECK(e.degenerate);
    CHECK(area(e.low_confidence) == flat.extent().area());
    CHECK(std::all_of(e.flow.drow_plane().begin(), e.flow.drow_plane().end(), [](float v) { return v == 0.0f; }));
    CHECK(std::all_of(e.flow.dcol_plane().begin(), e.flow.dcol_plane().end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("gated pixels keep the prior estimate") {
    // single level: windows around the centre of the flat 56x56 patch see no
    // gradient, so the centre keeps the zero prior while the surround moves
    RgbFrame src = textured(128, 128, 9);
    for (int r = 36; r < 92; ++r)
        for (int c = 36; c < 92; ++c) std::fill_n(src.at(r, c), 3, 100);
    const RgbFrame dst = translate(src, 1, 1);
    FlowParams p;
    p.pyramid_levels = 1;
    const FlowEstimate e = estimate_flow(src, dst, p);
    CHECK(e.flow.drow(64, 64) == 0.0f);
    CHECK(e.flow.dcol(64, 64) == 0.0f);
    CHECK(e.low_confidence.get(64, 64));
    CHECK_FALSE(e.low_confidence.get(10, 10));
    CHECK(std::abs(e.flow.dcol(10, 10) - 1.0f) < 0.5f);
}

TEST_CASE("estimate_flow is deterministic") {
    const RgbFrame a = textured(50, 40, 1), b = textured(50, 40, 2);
    const FlowEstimate e1 = estimate_flow(a, b), e2 = estimate_flow(a, b);
    CHECK(e1.flow == e2.flow);
    CHECK(e1.low_confidence == e2.low_confidence);
}

TEST_CASE("warp_mask") {
    const Extent e{10, 8};
    oracle::Gen gen(31);
    const BinaryMask m = gen.blob_mask(e, 3);
    CHECK(warp_mask(m, FlowField(e)) == m);

    BinaryMask block(e);
    for (int r = 2; r < 5; ++r)
        for (int c = 6; c < 10; ++c) block.set(r, c);
    const BinaryMask shifted = warp_mask(block, FlowField::uniform(e, 0, 2));
    CHECK(area(shifted) == 6);
    CHECK(shifted.get(2, 8));
    CHECK(shifted.get(4, 9));
    CHECK_FALSE(shifted.get(2, 7));

    for (int trial = 0; trial < 10; ++trial) {
        const BinaryMask src = gen.noise_mask(e, 0.4);
        FlowField f(e);
        for (int r = 0; r < e.height; ++r)
            for (int c = 0; c < e.width; ++c)
                f.set(r, c, static_cast<float>(gen.uniform(-2, 2)), static_cast<float>(gen.uniform(-2, 2)));
        BinaryMask expected(e);
        for (int r = 0; r < e.height; ++r)
            for (int c = 0; c < e.width; ++c) {
                if (!src.get(r, c)) continue;
                const int tr = r + static_cast<int>(f.drow(r, c)), tc = c + static_cast<int>(f.dcol(r, c));
                if (e.contains(tr, tc)) expected.set(tr, tc);
            }
        const BinaryMask out = warp_mask(src, f);
        CHECK(out == expected);
        CHECK(area(out) <= area(src));
    }
    CHECK_THROWS_AS(warp_mask(m, FlowField(Extent{3, 3})), ContractError);
}

TEST_CASE("negate_flow") {
    const Extent e{6, 5};
    CHECK(negate_flow(FlowField(e)) == FlowField(e));
    CHECK(negate_flow(FlowField::uniform(e, 2, 3)) == FlowField::uniform(e, -2, -3));
    FlowField f(e);
    oracle::Gen gen(2);
    for (int r = 0; r < e.height; ++r)
        for (int c = 0; c < e.width; ++c) f.set(r, c, static_cast<float>(gen.real(-5, 5)), static_cast<float>(gen.real(-5, 5)));
    CHECK(negate_flow(negate_flow(f)) == f);
}

TEST_CASE("pyramid helpers") {
    using flow_detail::Plane;
    Plane p{4, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
    CHECK(flow_detail::sample_bilinear(p, 1.0f, 2.0f) == 6.0f);
    CHECK(flow_detail::sample_bilinear(p, 0.5f, 0.5f) == doctest::Approx(2.5));
    CHECK(flow_detail::sample_bilinear(p, -3.0f, -3.0f) == 0.0f);
    CHECK(flow_detail::sample_bilinear(p, 10.0f, 10.0f) == 11.0f);

    Plane constant{9, 7, std::vector<float>(63, 0.25f)};
    const Plane mean = flow_detail::box_mean(constant, 5);
    for (float v : mean.values) CHECK(v == doctest::Approx(0.25f));
    const Plane small = flow_detail::downsample(constant);
    CHECK(small.width == 5);
    CHECK(small.height == 4);
    for (float v : small.values) CHECK(v == doctest::Approx(0.25f));

    // box mean against a direct windowed average with replicated borders
    oracle::Gen gen(6);
    Plane q{11, 8, std::vector<float>(88)};
    for (float& v : q.values) v = static_cast<float>(gen.real(0, 1));
    const Plane bm = flow_detail::box_mean(q, 3);
    for (int r = 0; r < q.height; ++r)
        for (int c = 0; c < q.width; ++c) {
            double sum = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    sum += q.at(std::clamp(r + dy, 0, q.height - 1), std::clamp(c + dx, 0, q.width - 1));
            CHECK(bm.at(r, c) == doctest::Approx(sum / 9).epsilon(1e-5));
        }
}

}
