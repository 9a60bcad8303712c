#include "rkrfm/simd/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace rkrfm::simd {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa startup_isa() {
    const char* env = std::getenv("RKRFM_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{startup_isa()};
    return isa;
}

}  // namespace

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const Kernels& kernels(Isa isa) { return isa == Isa::Avx2 ? detail::avx2_kernels() : detail::scalar_kernels(); }

const Kernels& kernels() { return kernels(current().load(std::memory_order_relaxed)); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa)) throw std::runtime_error(std::string("instruction set not available: ") + isa_name(isa));
    current().store(isa, std::memory_order_relaxed);
}

}  // namespace rkrfm::simd
