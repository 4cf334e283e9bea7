#include "gpdf/kernel_rows.hpp"

#include <cstdlib>

namespace gpdf {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

#if !(defined(__x86_64__) || defined(_M_X64))
const KernelRowBackend& avx2_backend() { return scalar_backend(); }
#endif

const KernelRowBackend& active_backend() {
    static const KernelRowBackend& chosen = []() -> const KernelRowBackend& {
        const char* force = std::getenv("GPDF_FORCE_SCALAR");
        if (force && force[0] == '1') return scalar_backend();
        if (avx2_available()) return avx2_backend();
        return scalar_backend();
    }();
    return chosen;
}

}  // namespace gpdf
