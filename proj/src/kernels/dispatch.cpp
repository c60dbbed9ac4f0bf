#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace vospp::kernels {

namespace {

const KernelTable kScalar{
    Level::scalar,       "scalar",          scalar::mask_or, scalar::mask_and, scalar::mask_andnot,
    scalar::count_nonzero, scalar::abs_diff_sum, scalar::rgb_to_luma, scalar::mul, scalar::add_inplace,
    scalar::lk_update,
};

#if defined(VOSPP_WITH_AVX2)
const KernelTable kAvx2{
    Level::avx2,       "avx2",          avx2::mask_or, avx2::mask_and, avx2::mask_andnot,
    avx2::count_nonzero, avx2::abs_diff_sum, avx2::rgb_to_luma, avx2::mul, avx2::add_inplace,
    avx2::lk_update,
};
#endif

const KernelTable* initial_table() {
    const KernelTable* best = avx2_table();
    if (const char* forced = std::getenv("VOSPP_KERNELS")) {
        if (std::string_view(forced) == "scalar") return &kScalar;
    }
    return best ? best : &kScalar;
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(VOSPP_WITH_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(Level level) {
    const KernelTable* table = level == Level::scalar ? &kScalar : avx2_table();
    if (table == nullptr) return false;
    current().store(table, std::memory_order_release);
    return true;
}

}  // namespace vospp::kernels
