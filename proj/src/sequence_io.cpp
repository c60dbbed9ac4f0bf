#include "vospp/sequence_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "vospp/parallel.hpp"

namespace fs = std::filesystem;

namespace vospp {

namespace {

bool is_frame_extension(std::string ext) {
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png";
}

// Index -> path for files whose stem is exactly five digits.
std::map<std::size_t, fs::path> scan_indexed(const fs::path& dir, bool frames) {
    if (!fs::is_directory(dir)) throw IoError(IoErrorKind::missing_file, "missing directory " + dir.string());
    std::map<std::size_t, fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& p = entry.path();
        const std::string stem = p.stem().string();
        if (stem.size() != 5 || !std::all_of(stem.begin(), stem.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
            continue;
        }
        if (frames ? !is_frame_extension(p.extension().string()) : p.extension() != ".png") continue;
        const std::size_t index = static_cast<std::size_t>(std::stoul(stem));
        if (!files.emplace(index, p).second) {
            throw IoError(IoErrorKind::layout, "duplicate frame index " + stem + " in " + dir.string());
        }
    }
    if (files.empty()) throw IoError(IoErrorKind::missing_file, "no indexed images in " + dir.string());
    std::size_t expected = 0;
    for (const auto& [index, path] : files) {
        if (index != expected) {
            throw IoError(IoErrorKind::index_gap, dir.string() + ": index " + frame_stem(expected) + " is missing (next is " +
                                                      frame_stem(index) + ")");
        }
        ++expected;
    }
    return files;
}

std::vector<fs::path> ordered(const std::map<std::size_t, fs::path>& files) {
    std::vector<fs::path> out;
    out.reserve(files.size());
    for (const auto& [index, path] : files) out.push_back(path);
    return out;
}

void set_from_env(fs::path& field, const char* var) {
    if (const char* v = std::getenv(var); v && *v) field = v;
}

}  // namespace

DatasetLayout DatasetLayout::from_environment(DatasetLayout base) {
    set_from_env(base.root, "VOSPP_ROOT");
    set_from_env(base.frames_subdir, "VOSPP_FRAMES_DIR");
    set_from_env(base.raw_masks_subdir, "VOSPP_RAW_DIR");
    set_from_env(base.gt_subdir, "VOSPP_GT_DIR");
    set_from_env(base.output_subdir, "VOSPP_OUTPUT_DIR");
    return base;
}

std::string frame_stem(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%05zu", index);
    return buf;
}

std::vector<std::string> list_sequences(const DatasetLayout& layout) {
    const fs::path dir = layout.frames_dir("");
    if (!fs::is_directory(dir)) throw IoError(IoErrorKind::missing_file, "missing directory " + dir.string());
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

LabelMap label_map_from_indices(const IndexImage& image) {
    std::vector<ObjectId> labels(image.indices.begin(), image.indices.end());
    return LabelMap(image.extent, std::move(labels));
}

IndexImage indices_from_label_map(const LabelMap& map) {
    IndexImage image;
    image.extent = map.extent();
    image.indices.resize(map.extent().area());
    const auto labels = map.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 255) {
            throw IoError(IoErrorKind::unencodable_id,
                          "object id " + std::to_string(labels[i]) + " does not fit an 8-bit palette index");
        }
        image.indices[i] = static_cast<std::uint8_t>(labels[i]);
    }
    return image;
}

std::vector<LabelMap> load_label_maps(const fs::path& dir, unsigned jobs) {
    const std::vector<fs::path> paths = ordered(scan_indexed(dir, false));
    std::vector<LabelMap> maps(paths.size());
    parallel_for(paths.size(), jobs, [&](std::size_t i) { maps[i] = label_map_from_indices(read_index_png(paths[i])); });
    return maps;
}

std::vector<RgbFrame> load_frames(const fs::path& dir, unsigned jobs) {
    const std::vector<fs::path> paths = ordered(scan_indexed(dir, true));
    std::vector<RgbFrame> frames(paths.size());
    parallel_for(paths.size(), jobs, [&](std::size_t i) { frames[i] = read_rgb_image(paths[i]); });
    return frames;
}

SequenceBundle load_mask_bundle(const fs::path& dir, const std::string& name, unsigned jobs) {
    SequenceBundle bundle;
    bundle.name = name;
    bundle.masks = load_label_maps(dir, jobs);
    const Extent e = bundle.masks.front().extent();
    for (std::size_t i = 0; i < bundle.masks.size(); ++i) {
        if (!(bundle.masks[i].extent() == e)) {
            throw IoError(IoErrorKind::dimension_mismatch,
                          (dir / (frame_stem(i) + ".png")).string() + ": dimensions differ from frame 00000");
        }
    }
    bundle.rebuild_registry();
    return bundle;
}

SequenceBundle load_sequence(const DatasetLayout& layout, const std::string& name, unsigned jobs) {
    const fs::path frame_dir = layout.frames_dir(name);
    const fs::path mask_dir = layout.raw_masks_dir(name);
    std::vector<RgbFrame> frames = load_frames(frame_dir, jobs);
    std::vector<LabelMap> masks = load_label_maps(mask_dir, jobs);
    if (frames.size() != masks.size()) {
        const bool mask_short = masks.size() < frames.size();
        const std::size_t index = std::min(frames.size(), masks.size());
        throw IoError(IoErrorKind::missing_file, (mask_short ? mask_dir : frame_dir).string() + ": no file for index " +
                                                     frame_stem(index) + " (sequence '" + name + "')");
    }
    const Extent e = frames.front().extent();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!(frames[i].extent() == e) || !(masks[i].extent() == e)) {
            throw IoError(IoErrorKind::dimension_mismatch,
                          "sequence '" + name + "' frame " + frame_stem(i) + ": frame is " + std::to_string(frames[i].width()) +
                              "x" + std::to_string(frames[i].height()) + ", mask is " + std::to_string(masks[i].width()) +
                              "x" + std::to_string(masks[i].height()) + ", expected " + std::to_string(e.width) + "x" +
                              std::to_string(e.height));
        }
    }
    return make_bundle(name, std::move(frames), std::move(masks));
}

void save_label_maps(const std::vector<LabelMap>& masks, const fs::path& dir) {
    std::vector<IndexImage> images;
    images.reserve(masks.size());
    for (const LabelMap& m : masks) images.push_back(indices_from_label_map(m));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(IoErrorKind::encode, "cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < images.size(); ++i) write_index_png(dir / (frame_stem(i) + ".png"), images[i]);
}

void save_masks(const SequenceBundle& bundle, const DatasetLayout& layout, const std::string& name) {
    save_label_maps(bundle.masks, layout.output_dir(name));
}

void save_frames(const std::vector<RgbFrame>& frames, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(IoErrorKind::encode, "cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < frames.size(); ++i) write_rgb_png(dir / (frame_stem(i) + ".png"), frames[i]);
}

}  // namespace vospp
