#include <cstdio>
#include <cstdlib>

#include <jpeglib.h>

#include "doctest.h"
#include "support/oracle.hpp"
#include "support/tempdir.hpp"
#include "vospp/sequence_io.hpp"

using namespace vospp;
namespace fs = std::filesystem;

namespace {

void write_jpeg(const fs::path& path, const RgbFrame& frame) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    REQUIRE(f);
    jpeg_compress_struct cinfo;
    jpeg_error_mgr err;
    cinfo.err = jpeg_std_error(&err);
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, f);
    cinfo.image_width = static_cast<JDIMENSION>(frame.width());
    cinfo.image_height = static_cast<JDIMENSION>(frame.height());
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, 100, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    for (int r = 0; r < frame.height(); ++r) {
        JSAMPROW row = const_cast<JSAMPROW>(frame.at(r, 0));
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::fclose(f);
}

RgbFrame gray(Extent e, std::uint8_t v) {
    RgbFrame f(e.width, e.height);
    std::fill(f.pixels().begin(), f.pixels().end(), v);
    return f;
}

IoErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const IoError& e) {
        return e.kind();
    }
    FAIL("no IoError thrown");
    return IoErrorKind::layout;
}

// frames and raw masks for one sequence under `root`
void write_sequence(const DatasetLayout& layout, const std::string& name, const std::vector<RgbFrame>& frames,
                    const std::vector<LabelMap>& masks) {
    save_frames(frames, layout.frames_dir(name));
    save_label_maps(masks, layout.raw_masks_dir(name));
}

}  // namespace

TEST_SUITE("sequence_io") {

TEST_CASE("frame_stem") {
    CHECK(frame_stem(0) == "00000");
    CHECK(frame_stem(42) == "00042");
    CHECK(frame_stem(99999) == "99999");
}

TEST_CASE("palette colours") {
    CHECK(davis_palette_color(0) == std::array<std::uint8_t, 3>{0, 0, 0});
    CHECK(davis_palette_color(1) == std::array<std::uint8_t, 3>{128, 0, 0});
    CHECK(davis_palette_color(2) == std::array<std::uint8_t, 3>{0, 128, 0});
    CHECK(davis_palette_color(3) == std::array<std::uint8_t, 3>{128, 128, 0});
    CHECK(davis_palette_color(4) == std::array<std::uint8_t, 3>{0, 0, 128});
    CHECK(davis_palette_color(8) == std::array<std::uint8_t, 3>{64, 0, 0});
}

TEST_CASE("one all-zero frame loads as an empty registry") {
    fixtures::TempDir tmp;
    DatasetLayout layout;
    layout.root = tmp.path();
    write_sequence(layout, "blank", {gray({6, 4}, 10)}, {LabelMap({6, 4})});
    const SequenceBundle b = load_sequence(layout, "blank");
    CHECK(b.size() == 1);
    CHECK(b.object_ids.empty());
    CHECK(b.extent() == Extent{6, 4});
    CHECK(list_sequences(layout) == std::vector<std::string>{"blank"});
}

TEST_CASE("two-frame sequence with two objects") {
    fixtures::TempDir tmp;
    DatasetLayout layout;
    layout.root = tmp.path();
    const Extent e{8, 5};
    LabelMap m0(e), m1(e);
    m0.set(0, 0, 1);
    m1.set(4, 7, 2);
    const RgbFrame f0 = oracle::Gen(1).frame(e), f1 = oracle::Gen(2).frame(e);
    write_sequence(layout, "two", {f0, f1}, {m0, m1});
    const SequenceBundle b = load_sequence(layout, "two", 2);
    CHECK(b.object_ids == std::set<ObjectId>{1, 2});
    CHECK(b.masks[0] == m0);
    CHECK(b.masks[1] == m1);
    CHECK(b.frames[0] == f0);
    CHECK(b.frames[1] == f1);
}

TEST_CASE("layout errors") {
    fixtures::TempDir tmp;
    DatasetLayout layout;
    layout.root = tmp.path();
    const Extent e{8, 5};

    SUBCASE("dimension mismatch") {
        write_sequence(layout, "s", {gray(e, 0), gray({9, 5}, 0)}, {LabelMap(e), LabelMap({9, 5})});
        CHECK(kind_of([&] { load_sequence(layout, "s"); }) == IoErrorKind::dimension_mismatch);
    }
    SUBCASE("mask size differs from frame") {
        write_sequence(layout, "s", {gray(e, 0)}, {LabelMap({4, 4})});
        CHECK(kind_of([&] { load_sequence(layout, "s"); }) == IoErrorKind::dimension_mismatch);
    }
    SUBCASE("index gap") {
        write_sequence(layout, "s", {gray(e, 0), gray(e, 0), gray(e, 0)}, {LabelMap(e), LabelMap(e), LabelMap(e)});
        fs::remove(layout.raw_masks_dir("s") / "00001.png");
        CHECK(kind_of([&] { load_sequence(layout, "s"); }) == IoErrorKind::index_gap);
    }
    SUBCASE("missing mask file") {
        write_sequence(layout, "s", {gray(e, 0), gray(e, 0)}, {LabelMap(e), LabelMap(e)});
        fs::remove(layout.raw_masks_dir("s") / "00001.png");
        CHECK(kind_of([&] { load_sequence(layout, "s"); }) == IoErrorKind::missing_file);
    }
    SUBCASE("missing directory") {
        CHECK(kind_of([&] { load_sequence(layout, "nothing"); }) == IoErrorKind::missing_file);
    }
    SUBCASE("undecodable mask") {
        write_sequence(layout, "s", {gray(e, 0)}, {LabelMap(e)});
        std::FILE* f = std::fopen((layout.raw_masks_dir("s") / "00000.png").c_str(), "wb");
        std::fputs("not a png", f);
        std::fclose(f);
        CHECK(kind_of([&] { load_sequence(layout, "s"); }) == IoErrorKind::decode);
    }
}

TEST_CASE("label maps round-trip up to id 255") {
    fixtures::TempDir tmp;
    oracle::Gen gen(4);
    std::vector<LabelMap> maps;
    for (int i = 0; i < 3; ++i) maps.push_back(gen.label_map({13, 7}, 255));
    maps[0].set(0, 0, 255);
    save_label_maps(maps, tmp.path() / "m");
    CHECK(load_label_maps(tmp.path() / "m", 3) == maps);
    const SequenceBundle b = load_mask_bundle(tmp.path() / "m", "m");
    CHECK(b.object_ids.contains(255));
    CHECK(b.frames.empty());

    LabelMap big({2, 2});
    big.set(1, 1, 256);
    CHECK(kind_of([&] { save_label_maps({big}, tmp.path() / "big"); }) == IoErrorKind::unencodable_id);
}

TEST_CASE("save_masks writes into the output directory") {
    fixtures::TempDir tmp;
    DatasetLayout layout;
    layout.root = tmp.path();
    layout.output_subdir = "out";
    LabelMap m({4, 4});
    m.set(2, 2, 3);
    SequenceBundle b = make_bundle("x", {gray({4, 4}, 0)}, {m});
    save_masks(b, layout, "x");
    CHECK(fs::exists(tmp.path() / "out" / "x" / "00000.png"));
    CHECK(load_label_maps(layout.output_dir("x")) == std::vector<LabelMap>{m});
}

TEST_CASE("written masks are palette images with DAVIS colours") {
    fixtures::TempDir tmp;
    LabelMap m({3, 1});
    m.set(0, 1, 1);
    m.set(0, 2, 2);
    save_label_maps({m}, tmp.path());
    const RgbFrame rgb = read_rgb_image(tmp.path() / "00000.png");
    CHECK(rgb.at(0, 0)[0] == 0);
    CHECK(rgb.at(0, 1)[0] == 128);
    CHECK(rgb.at(0, 2)[1] == 128);
}

TEST_CASE("JPEG frames load") {
    fixtures::TempDir tmp;
    DatasetLayout layout;
    layout.root = tmp.path();
    const Extent e{16, 8};
    fs::create_directories(layout.frames_dir("j"));
    write_jpeg(layout.frames_dir("j") / "00000.jpg", gray(e, 120));
    save_label_maps({LabelMap(e)}, layout.raw_masks_dir("j"));
    const SequenceBundle b = load_sequence(layout, "j");
    REQUIRE(b.size() == 1);
    CHECK(b.extent() == e);
    CHECK(std::abs(int(b.frames[0].at(3, 5)[1]) - 120) <= 2);
}

TEST_CASE("environment overrides the layout") {
    setenv("VOSPP_ROOT", "/data/davis", 1);
    setenv("VOSPP_OUTPUT_DIR", "/tmp/results", 1);
    const DatasetLayout l = DatasetLayout::from_environment();
    unsetenv("VOSPP_ROOT");
    unsetenv("VOSPP_OUTPUT_DIR");
    CHECK(l.frames_dir("a") == fs::path("/data/davis/JPEGImages/a"));
    CHECK(l.output_dir("a") == fs::path("/tmp/results/a"));
    CHECK(DatasetLayout::from_environment().root == fs::path("."));
}

}
