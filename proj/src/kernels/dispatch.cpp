#include <cstdlib>
#include <string_view>

#include "fpattack/kernels.hpp"

namespace fpattack::kernels {

#if defined(FPATTACK_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table_impl();
}
#endif

const KernelTable* avx2_table() {
#if defined(FPATTACK_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &detail::avx2_table_impl() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        const char* force = std::getenv("FPATTACK_FORCE_SCALAR");
        if (force != nullptr && std::string_view(force) != "0") return scalar_table();
        if (const KernelTable* t = avx2_table()) return *t;
        return scalar_table();
    }();
    return chosen;
}

}  // namespace fpattack::kernels
