#include "embedkey/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace embedkey::kernels {

const KernelTable& scalar_table()
{
    static const KernelTable table{"scalar", scalar::dot, scalar::axpy, scalar::dist2, scalar::hamming};
    return table;
}

const KernelTable* avx2_table()
{
#if defined(EMBEDKEY_HAVE_AVX2)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    static const KernelTable table{"avx2", avx2::dot, avx2::axpy, avx2::dist2, avx2::hamming};
    return supported ? &table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active()
{
    static const KernelTable& chosen = []() -> const KernelTable& {
        const char* forced = std::getenv("EMBEDKEY_KERNELS");
        if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
        if (const KernelTable* t = avx2_table()) return *t;
        return scalar_table();
    }();
    return chosen;
}

} // namespace embedkey::kernels
