#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vospp/image_codec.hpp"
#include "vospp/mask_model.hpp"

namespace vospp {

/// DAVIS-style directory layout. Each subdirectory holds one folder per
/// sequence with files named by 5-digit zero-padded frame index.
struct DatasetLayout {
    std::filesystem::path root = ".";
    std::filesystem::path frames_subdir = "JPEGImages";
    std::filesystem::path raw_masks_subdir = "RawMasks";
    std::filesystem::path gt_subdir = "Annotations";
    std::filesystem::path output_subdir = "Results";

    std::filesystem::path frames_dir(const std::string& seq) const { return resolve(frames_subdir) / seq; }
    std::filesystem::path raw_masks_dir(const std::string& seq) const { return resolve(raw_masks_subdir) / seq; }
    std::filesystem::path gt_dir(const std::string& seq) const { return resolve(gt_subdir) / seq; }
    std::filesystem::path output_dir(const std::string& seq) const { return resolve(output_subdir) / seq; }

    /// Applies VOSPP_ROOT, VOSPP_FRAMES_DIR, VOSPP_RAW_DIR, VOSPP_GT_DIR and
    /// VOSPP_OUTPUT_DIR when set.
    static DatasetLayout from_environment(DatasetLayout base);
    static DatasetLayout from_environment() { return from_environment(DatasetLayout()); }

private:
    std::filesystem::path resolve(const std::filesystem::path& sub) const {
        return sub.is_absolute() ? sub : root / sub;
    }
};

/// "00042"
std::string frame_stem(std::size_t index);

/// Sorted sequence names found under the frames directory.
std::vector<std::string> list_sequences(const DatasetLayout& layout);

/// Frames plus raw proposal masks.
SequenceBundle load_sequence(const DatasetLayout& layout, const std::string& name, unsigned jobs = 1);

/// Label maps only (frames left empty). Indices must run 00000..n-1 without gaps.
std::vector<LabelMap> load_label_maps(const std::filesystem::path& dir, unsigned jobs = 1);

/// Mask-only bundle from `dir`; registry built from the labels.
SequenceBundle load_mask_bundle(const std::filesystem::path& dir, const std::string& name, unsigned jobs = 1);

std::vector<RgbFrame> load_frames(const std::filesystem::path& dir, unsigned jobs = 1);

/// Writes one palette PNG per label map into `dir` (created if needed).
void save_label_maps(const std::vector<LabelMap>& masks, const std::filesystem::path& dir);

/// Writes the bundle's masks into the layout's output directory.
void save_masks(const SequenceBundle& bundle, const DatasetLayout& layout, const std::string& name);

void save_frames(const std::vector<RgbFrame>& frames, const std::filesystem::path& dir);

LabelMap label_map_from_indices(const IndexImage& image);
IndexImage indices_from_label_map(const LabelMap& map);

}  // namespace vospp
