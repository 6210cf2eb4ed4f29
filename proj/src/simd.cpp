#include "sausagelab/simd.hpp"

#include <atomic>
#include <stdexcept>

namespace sausagelab::simd {

#if SAUSAGELAB_HAVE_AVX2_TU
const Kernels& avx2_kernels_impl();
#endif

bool avx2_available() {
#if SAUSAGELAB_HAVE_AVX2_TU
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
std::atomic<const Kernels*> g_active{nullptr};

const Kernels* resolve_auto() {
#if SAUSAGELAB_HAVE_AVX2_TU
    if (avx2_available()) return &avx2_kernels_impl();
#endif
    return &scalar_kernels();
}
}  // namespace

const Kernels& kernels() {
    const Kernels* k = g_active.load(std::memory_order_acquire);
    if (!k) {
        k = resolve_auto();
        g_active.store(k, std::memory_order_release);
    }
    return *k;
}

void select_backend(const std::string& name) {
    if (name == "auto") {
        g_active.store(resolve_auto(), std::memory_order_release);
    } else if (name == "scalar") {
        g_active.store(&scalar_kernels(), std::memory_order_release);
    } else if (name == "avx2") {
#if SAUSAGELAB_HAVE_AVX2_TU
        if (!avx2_available())
            throw std::invalid_argument("avx2 backend not supported on this CPU");
        g_active.store(&avx2_kernels_impl(), std::memory_order_release);
#else
        throw std::invalid_argument("avx2 backend not compiled in");
#endif
    } else {
        throw std::invalid_argument("unknown simd backend: " + name);
    }
}

std::string active_backend() { return kernels().name; }

}  // namespace sausagelab::simd
