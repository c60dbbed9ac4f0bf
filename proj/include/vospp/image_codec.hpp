#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vospp/mask_model.hpp"

namespace vospp {

enum class IoErrorKind { missing_file, index_gap, dimension_mismatch, decode, encode, unencodable_id, layout };

class IoError : public std::runtime_error {
public:
    IoError(IoErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    IoErrorKind kind() const { return kind_; }

private:
    IoErrorKind kind_;
};

/// 8-bit index image. Palette-type PNGs yield their palette indices;
/// grayscale PNGs yield their gray values.
struct IndexImage {
    Extent extent;
    std::vector<std::uint8_t> indices;
};

IndexImage read_index_png(const std::filesystem::path& path);
void write_index_png(const std::filesystem::path& path, const IndexImage& image);

/// RGB frame from PNG or JPEG (decided by file signature).
RgbFrame read_rgb_image(const std::filesystem::path& path);
void write_rgb_png(const std::filesystem::path& path, const RgbFrame& frame);

/// DAVIS palette: bits of the index interleaved across the colour channels.
std::array<std::uint8_t, 3> davis_palette_color(std::uint8_t index);

}  // namespace vospp
