#pragma once

#include <cstdint>
#include <vector>

#include "vospp/mask_model.hpp"

namespace vospp {

enum class Connectivity { four = 4, eight = 8 };

/// Disjoint connected pieces of a mask, ordered by the scanline position of
/// each component's first pixel.
struct ComponentSet {
    std::vector<BinaryMask> components;
    Connectivity connectivity = Connectivity::eight;
};

struct RgbHistogram {
    int bins_per_channel = 32;
    /// Red bins, then green, then blue.
    std::vector<std::uint32_t> counts;

    std::uint64_t total() const;
    friend bool operator==(const RgbHistogram&, const RgbHistogram&) = default;
};

struct Centroid {
    double row = 0.0;
    double col = 0.0;
};

inline constexpr int kDefaultHistogramBins = 32;

ComponentSet connected_components(const BinaryMask& mask, Connectivity connectivity = Connectivity::eight);

/// Per-pixel component index (-1 for background) plus component areas, for
/// callers that only need labels.
struct ComponentLabels {
    std::vector<int> labels;
    std::vector<std::size_t> areas;
};
ComponentLabels label_components(const BinaryMask& mask, Connectivity connectivity);

/// Square structuring element of side 2*radius+1. Pixels outside the raster
/// count as background.
BinaryMask erode(const BinaryMask& mask, int radius);

BinaryMask remove_small_components(const BinaryMask& mask, std::size_t min_area,
                                   Connectivity connectivity = Connectivity::eight);

/// Fills background regions (4-connected) that do not touch the raster border
/// and have at most max_hole_area pixels.
BinaryMask fill_small_holes(const BinaryMask& mask, std::size_t max_hole_area);

/// Throws UndefinedCentroid for an empty mask.
Centroid center_of_mass(const BinaryMask& mask);

/// bins_per_channel must divide 256.
RgbHistogram histogram_region(const RgbFrame& frame, const BinaryMask& region, int bins_per_channel = kDefaultHistogramBins);

double manhattan_distance(const RgbHistogram& a, const RgbHistogram& b);

}  // namespace vospp
