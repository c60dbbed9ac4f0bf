#pragma once

// Data-parallel inner loops behind the raster, histogram and flow code.
//
// Every kernel has a scalar reference implementation. Vector variants are
// selected once at startup from the CPU's capabilities and must produce
// bit-identical results: float kernels perform the same operations in the
// same order per element and are compiled without FP contraction.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace vospp::kernels {

enum class Level { scalar, avx2 };

struct KernelTable {
    Level level;
    std::string_view name;

    // Byte masks holding 0/1.
    void (*mask_or)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
    void (*mask_and)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
    void (*mask_andnot)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
    std::size_t (*count_nonzero)(const std::uint8_t* a, std::size_t n);

    // sum |a[i] - b[i]|
    std::uint64_t (*abs_diff_sum)(const std::uint32_t* a, const std::uint32_t* b, std::size_t n);

    // Interleaved RGB to luminance in [0, 1].
    void (*rgb_to_luma)(const std::uint8_t* rgb, float* out, std::size_t pixels);

    void (*mul)(const float* a, const float* b, float* out, std::size_t n);
    void (*add_inplace)(float* acc, const float* x, std::size_t n);

    // out = current - reference, the temporal difference used by LK.

    // One Lucas-Kanade update over n pixels. Inputs are windowed sums of
    // Ix*Ix, Ix*Iy, Iy*Iy, Ix*It, Iy*It divided by the window pixel count.
    // Pixels whose structure tensor's smallest eigenvalue is below
    // eigen_floor keep their flow and get gated[i] = 1.
    void (*lk_update)(const float* sxx, const float* sxy, const float* syy, const float* sxt, const float* syt,
                      float eigen_floor, float* flow_row, float* flow_col, std::uint8_t* gated, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Active table; honours VOSPP_KERNELS=scalar|avx2 on first use.
const KernelTable& active();

/// Overrides the active table (tests and benchmarking). Returns false when
/// the requested level is not available.
bool select(Level level);

}  // namespace vospp::kernels
