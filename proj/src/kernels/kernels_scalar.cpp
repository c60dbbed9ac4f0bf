#include <cmath>

#include "kernels_internal.hpp"

namespace vospp::kernels::scalar {

void mask_or(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] | b[i];
}

void mask_and(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] & b[i];
}

void mask_andnot(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] & static_cast<std::uint8_t>(b[i] ^ 1u);
}

std::size_t count_nonzero(const std::uint8_t* a, std::size_t n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += a[i] != 0;
    return count;
}

std::uint64_t abs_diff_sum(const std::uint32_t* a, const std::uint32_t* b, std::size_t n) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    return sum;
}

void rgb_to_luma(const std::uint8_t* rgb, float* out, std::size_t pixels) {
    for (std::size_t i = 0; i < pixels; ++i) {
        const float r = rgb[3 * i];
        const float g = rgb[3 * i + 1];
        const float b = rgb[3 * i + 2];
        out[i] = (kLumaR * r + kLumaG * g + kLumaB * b) * kInv255;
    }
}

void mul(const float* a, const float* b, float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void add_inplace(float* acc, const float* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void lk_update(const float* sxx, const float* sxy, const float* syy, const float* sxt, const float* syt,
               float eigen_floor, float* flow_row, float* flow_col, std::uint8_t* gated, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float a = sxx[i];
        const float b = sxy[i];
        const float c = syy[i];
        const float half_trace = 0.5f * (a + c);
        const float half_diff = 0.5f * (a - c);
        const float min_eigen = half_trace - std::sqrt(half_diff * half_diff + b * b);
        if (!(min_eigen >= eigen_floor)) {
            gated[i] = 1;
            continue;
        }
        gated[i] = 0;
        const float det = a * c - b * b;
        flow_col[i] += (b * syt[i] - c * sxt[i]) / det;
        flow_row[i] += (b * sxt[i] - a * syt[i]) / det;
    }
}

}  // namespace vospp::kernels::scalar
