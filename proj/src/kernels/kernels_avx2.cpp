#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace vospp::kernels::avx2 {

namespace {

constexpr std::size_t kBytes = 32;
constexpr std::size_t kFloats = 8;

template <typename Op, typename Tail>
void byte_binary(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n, Op op, Tail tail) {
    std::size_t i = 0;
    for (; i + kBytes <= n; i += kBytes) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), op(va, vb));
    }
    if (i < n) tail(a + i, b + i, out + i, n - i);
}

}  // namespace

void mask_or(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    byte_binary(a, b, out, n, [](__m256i x, __m256i y) { return _mm256_or_si256(x, y); }, scalar::mask_or);
}

void mask_and(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    byte_binary(a, b, out, n, [](__m256i x, __m256i y) { return _mm256_and_si256(x, y); }, scalar::mask_and);
}

void mask_andnot(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    // operands hold 0/1, so a & ~b equals a & (b ^ 1)
    byte_binary(a, b, out, n, [](__m256i x, __m256i y) { return _mm256_andnot_si256(y, x); }, scalar::mask_andnot);
}

std::size_t count_nonzero(const std::uint8_t* a, std::size_t n) {
    std::size_t count = 0;
    std::size_t i = 0;
    const __m256i zero = _mm256_setzero_si256();
    for (; i + kBytes <= n; i += kBytes) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const auto zero_bits = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
        count += static_cast<std::size_t>(__builtin_popcount(~zero_bits));
    }
    for (; i < n; ++i) count += a[i] != 0;
    return count;
}

std::uint64_t abs_diff_sum(const std::uint32_t* a, const std::uint32_t* b, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + kFloats <= n; i += kFloats) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        const __m256i diff = _mm256_sub_epi32(_mm256_max_epu32(va, vb), _mm256_min_epu32(va, vb));
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_castsi256_si128(diff)));
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_extracti128_si256(diff, 1)));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) sum += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    return sum;
}

void rgb_to_luma(const std::uint8_t* rgb, float* out, std::size_t pixels) {
    const __m256i offsets = _mm256_setr_epi32(0, 3, 6, 9, 12, 15, 18, 21);
    const __m256i low_byte = _mm256_set1_epi32(0xFF);
    const __m256 wr = _mm256_set1_ps(kLumaR);
    const __m256 wg = _mm256_set1_ps(kLumaG);
    const __m256 wb = _mm256_set1_ps(kLumaB);
    const __m256 scale = _mm256_set1_ps(kInv255);
    std::size_t i = 0;
    // each gather lane reads 4 bytes; the blue read of lane 7 ends 3 bytes into pixel i + 8
    for (; i + kFloats + 1 <= pixels; i += kFloats) {
        const auto* base = reinterpret_cast<const int*>(rgb + 3 * i);
        const __m256i raw_r = _mm256_i32gather_epi32(base, offsets, 1);
        const __m256i raw_g = _mm256_i32gather_epi32(reinterpret_cast<const int*>(rgb + 3 * i + 1), offsets, 1);
        const __m256i raw_b = _mm256_i32gather_epi32(reinterpret_cast<const int*>(rgb + 3 * i + 2), offsets, 1);
        const __m256 r = _mm256_cvtepi32_ps(_mm256_and_si256(raw_r, low_byte));
        const __m256 g = _mm256_cvtepi32_ps(_mm256_and_si256(raw_g, low_byte));
        const __m256 b = _mm256_cvtepi32_ps(_mm256_and_si256(raw_b, low_byte));
        const __m256 sum = _mm256_add_ps(_mm256_add_ps(_mm256_mul_ps(wr, r), _mm256_mul_ps(wg, g)), _mm256_mul_ps(wb, b));
        _mm256_storeu_ps(out + i, _mm256_mul_ps(sum, scale));
    }
    if (i < pixels) scalar::rgb_to_luma(rgb + 3 * i, out + i, pixels - i);
}

void mul(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kFloats <= n; i += kFloats) {
        _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void add_inplace(float* acc, const float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + kFloats <= n; i += kFloats) {
        _mm256_storeu_ps(acc + i, _mm256_add_ps(_mm256_loadu_ps(acc + i), _mm256_loadu_ps(x + i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

void lk_update(const float* sxx, const float* sxy, const float* syy, const float* sxt, const float* syt,
               float eigen_floor, float* flow_row, float* flow_col, std::uint8_t* gated, std::size_t n) {
    const __m256 half = _mm256_set1_ps(0.5f);
    const __m256 floor = _mm256_set1_ps(eigen_floor);
    std::size_t i = 0;
    for (; i + kFloats <= n; i += kFloats) {
        const __m256 a = _mm256_loadu_ps(sxx + i);
        const __m256 b = _mm256_loadu_ps(sxy + i);
        const __m256 c = _mm256_loadu_ps(syy + i);
        const __m256 xt = _mm256_loadu_ps(sxt + i);
        const __m256 yt = _mm256_loadu_ps(syt + i);
        const __m256 half_trace = _mm256_mul_ps(half, _mm256_add_ps(a, c));
        const __m256 half_diff = _mm256_mul_ps(half, _mm256_sub_ps(a, c));
        const __m256 radius =
            _mm256_sqrt_ps(_mm256_add_ps(_mm256_mul_ps(half_diff, half_diff), _mm256_mul_ps(b, b)));
        const __m256 min_eigen = _mm256_sub_ps(half_trace, radius);
        const __m256 keep = _mm256_cmp_ps(min_eigen, floor, _CMP_GE_OQ);

        const __m256 det = _mm256_sub_ps(_mm256_mul_ps(a, c), _mm256_mul_ps(b, b));
        const __m256 dcol = _mm256_div_ps(_mm256_sub_ps(_mm256_mul_ps(b, yt), _mm256_mul_ps(c, xt)), det);
        const __m256 drow = _mm256_div_ps(_mm256_sub_ps(_mm256_mul_ps(b, xt), _mm256_mul_ps(a, yt)), det);

        const __m256 col = _mm256_loadu_ps(flow_col + i);
        const __m256 row = _mm256_loadu_ps(flow_row + i);
        _mm256_storeu_ps(flow_col + i, _mm256_blendv_ps(col, _mm256_add_ps(col, dcol), keep));
        _mm256_storeu_ps(flow_row + i, _mm256_blendv_ps(row, _mm256_add_ps(row, drow), keep));

        const int keep_bits = _mm256_movemask_ps(keep);
        for (std::size_t k = 0; k < kFloats; ++k) gated[i + k] = ((keep_bits >> k) & 1) ? 0 : 1;
    }
    if (i < n) {
        scalar::lk_update(sxx + i, sxy + i, syy + i, sxt + i, syt + i, eigen_floor, flow_row + i, flow_col + i,
                          gated + i, n - i);
    }
}

}  // namespace vospp::kernels::avx2
