#pragma once

#include "vospp/kernels.hpp"

namespace vospp::kernels {

inline constexpr float kLumaR = 0.299f;
inline constexpr float kLumaG = 0.587f;
inline constexpr float kLumaB = 0.114f;
inline constexpr float kInv255 = 1.0f / 255.0f;

namespace scalar {
void mask_or(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
void mask_and(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
void mask_andnot(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
std::size_t count_nonzero(const std::uint8_t* a, std::size_t n);
std::uint64_t abs_diff_sum(const std::uint32_t* a, const std::uint32_t* b, std::size_t n);
void rgb_to_luma(const std::uint8_t* rgb, float* out, std::size_t pixels);
void mul(const float* a, const float* b, float* out, std::size_t n);
void add_inplace(float* acc, const float* x, std::size_t n);
void lk_update(const float* sxx, const float* sxy, const float* syy, const float* sxt, const float* syt,
               float eigen_floor, float* flow_row, float* flow_col, std::uint8_t* gated, std::size_t n);
}  // namespace scalar

#if defined(VOSPP_WITH_AVX2)
namespace avx2 {
void mask_or(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
void mask_and(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
void mask_andnot(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
std::size_t count_nonzero(const std::uint8_t* a, std::size_t n);
std::uint64_t abs_diff_sum(const std::uint32_t* a, const std::uint32_t* b, std::size_t n);
void rgb_to_luma(const std::uint8_t* rgb, float* out, std::size_t pixels);
void mul(const float* a, const float* b, float* out, std::size_t n);
void add_inplace(float* acc, const float* x, std::size_t n);
void lk_update(const float* sxx, const float* sxy, const float* syy, const float* sxt, const float* syt,
               float eigen_floor, float* flow_row, float* flow_col, std::uint8_t* gated, std::size_t n);
}  // namespace avx2
#endif

}  // namespace vospp::kernels
