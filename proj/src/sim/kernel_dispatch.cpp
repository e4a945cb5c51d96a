#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "qlock/kernels.hpp"

namespace qlock::sim {

std::string_view isa_name(KernelIsa isa) { return isa == KernelIsa::Avx2 ? "avx2" : "scalar"; }

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    static const bool has = __builtin_cpu_supports("avx2");
    return has;
#else
    return false;
#endif
}

namespace {

KernelIsa detect() {
    if (const char* env = std::getenv("QLOCK_KERNEL")) {
        const std::string want(env);
        if (want == "scalar") return KernelIsa::Scalar;
        if (want == "avx2" && cpu_has_avx2()) return KernelIsa::Avx2;
    }
    return cpu_has_avx2() ? KernelIsa::Avx2 : KernelIsa::Scalar;
}

std::atomic<KernelIsa>& selected() {
    static std::atomic<KernelIsa> isa{detect()};
    return isa;
}

}  // namespace

KernelIsa active_isa() { return selected().load(std::memory_order_relaxed); }

void set_active_isa(KernelIsa isa) {
    if (isa == KernelIsa::Avx2 && !cpu_has_avx2()) throw std::invalid_argument("AVX2 not supported on this CPU");
    selected().store(isa, std::memory_order_relaxed);
}

void apply_1q(std::span<Amplitude> state, int target, uint64_t ctrl_mask, const Matrix2& m) {
    if (active_isa() == KernelIsa::Avx2) {
        kernels::apply_1q_avx2(state, target, ctrl_mask, m);
    } else {
        kernels::apply_1q_scalar(state, target, ctrl_mask, m);
    }
}

void probabilities(std::span<const Amplitude> state, std::span<double> out) {
    if (active_isa() == KernelIsa::Avx2) {
        kernels::probabilities_avx2(state, out);
    } else {
        kernels::probabilities_scalar(state, out);
    }
}

}  // namespace qlock::sim
