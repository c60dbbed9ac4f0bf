#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vospp/error.hpp"

namespace vospp {

using ObjectId = std::uint16_t;
inline constexpr ObjectId kBackground = 0;

/// Raster extent shared by frames, label maps and masks.
struct Extent {
    int width = 0;
    int height = 0;

    std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    bool contains(int row, int col) const { return row >= 0 && col >= 0 && row < height && col < width; }
    friend bool operator==(const Extent&, const Extent&) = default;
};

/// Row-major interleaved 8-bit RGB image.
class RgbFrame {
public:
    RgbFrame() = default;
    RgbFrame(int width, int height);
    RgbFrame(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return extent_.width; }
    int height() const { return extent_.height; }
    const Extent& extent() const { return extent_; }

    std::span<const std::uint8_t> pixels() const { return pixels_; }
    std::span<std::uint8_t> pixels() { return pixels_; }

    const std::uint8_t* at(int row, int col) const { return &pixels_[offset(row, col)]; }
    std::uint8_t* at(int row, int col) { return &pixels_[offset(row, col)]; }

    friend bool operator==(const RgbFrame&, const RgbFrame&) = default;

private:
    std::size_t offset(int row, int col) const {
        return (static_cast<std::size_t>(row) * extent_.width + col) * 3;
    }

    Extent extent_;
    std::vector<std::uint8_t> pixels_;
};

/// Row-major boolean raster stored one byte per pixel (0 or 1).
class BinaryMask {
public:
    BinaryMask() = default;
    explicit BinaryMask(Extent extent, bool value = false);
    BinaryMask(Extent extent, std::vector<std::uint8_t> bits);

    int width() const { return extent_.width; }
    int height() const { return extent_.height; }
    const Extent& extent() const { return extent_; }

    bool get(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool value = true) { bits_[index(row, col)] = value ? 1 : 0; }
    bool test(std::size_t i) const { return bits_[i] != 0; }

    std::span<const std::uint8_t> bits() const { return bits_; }
    std::span<std::uint8_t> bits() { return bits_; }

    bool empty() const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * extent_.width + col; }

    Extent extent_;
    std::vector<std::uint8_t> bits_;
};

/// Per-pixel object ids; 0 is background.
class LabelMap {
public:
    LabelMap() = default;
    explicit LabelMap(Extent extent, ObjectId fill = kBackground);
    LabelMap(Extent extent, std::vector<ObjectId> labels);

    int width() const { return extent_.width; }
    int height() const { return extent_.height; }
    const Extent& extent() const { return extent_; }

    ObjectId get(int row, int col) const { return labels_[index(row, col)]; }
    void set(int row, int col, ObjectId id) { labels_[index(row, col)] = id; }

    std::span<const ObjectId> labels() const { return labels_; }
    std::span<ObjectId> labels() { return labels_; }

    /// Distinct nonzero ids present in the map, ascending.
    std::set<ObjectId> ids() const;

    /// Writes `id` at every true pixel of `mask`.
    void paint(const BinaryMask& mask, ObjectId id);

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * extent_.width + col; }

    Extent extent_;
    std::vector<ObjectId> labels_;
};

/// A video: frames, index-aligned label maps and the registry of object ids.
struct SequenceBundle {
    std::string name;
    std::vector<RgbFrame> frames;
    std::vector<LabelMap> masks;
    std::set<ObjectId> object_ids;

    std::size_t size() const { return frames.size(); }
    Extent extent() const { return frames.empty() ? Extent{} : frames.front().extent(); }

    /// Throws ContractError when the bundle breaks its invariants.
    void validate() const;

    /// Rebuilds `object_ids` from the labels actually present.
    void rebuild_registry();
};

/// Builds a bundle and registers every id observed in `masks`.
SequenceBundle make_bundle(std::string name, std::vector<RgbFrame> frames, std::vector<LabelMap> masks);

BinaryMask extract_object(const LabelMap& map, ObjectId id);

std::size_t area(const BinaryMask& mask);

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b);
/// a AND NOT b
BinaryMask mask_subtract(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_complement(const BinaryMask& a);

/// Translates a mask by an integer offset; pixels leaving the raster are dropped.
BinaryMask shift_mask(const BinaryMask& mask, int drow, int dcol);

}  // namespace vospp
