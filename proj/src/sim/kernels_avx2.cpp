#include "qlock/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define QLOCK_X86 1
#include <immintrin.h>
#else
#define QLOCK_X86 0
#endif

namespace qlock::sim::kernels {

#if QLOCK_X86

namespace {

// Two complex doubles per register: (re0, im0, re1, im1).
__attribute__((target("avx2"))) inline __m256d cmul(__m256d a, __m256d re, __m256d im) {
    const __m256d swapped = _mm256_permute_pd(a, 0b0101);
    return _mm256_addsub_pd(_mm256_mul_pd(a, re), _mm256_mul_pd(swapped, im));
}

}  // namespace

__attribute__((target("avx2"))) void apply_1q_avx2(std::span<Amplitude> state, int target, uint64_t ctrl_mask,
                                                    const Matrix2& m) {
    // Pairs (i, i+1) share every bit except bit 0, so the vector path needs
    // the target and all controls above bit 0.
    if (state.size() < 4 || target == 0 || (ctrl_mask & 1)) {
        apply_1q_scalar(state, target, ctrl_mask, m);
        return;
    }
    const __m256d m00r = _mm256_set1_pd(m.m00.real()), m00i = _mm256_set1_pd(m.m00.imag());
    const __m256d m01r = _mm256_set1_pd(m.m01.real()), m01i = _mm256_set1_pd(m.m01.imag());
    const __m256d m10r = _mm256_set1_pd(m.m10.real()), m10i = _mm256_set1_pd(m.m10.imag());
    const __m256d m11r = _mm256_set1_pd(m.m11.real()), m11i = _mm256_set1_pd(m.m11.imag());

    auto* data = reinterpret_cast<double*>(state.data());
    const uint64_t tbit = uint64_t{1} << target;
    const uint64_t low = tbit - 1;
    const uint64_t half = state.size() / 2;
    for (uint64_t k = 0; k < half; k += 2) {
        const uint64_t i0 = ((k & ~low) << 1) | (k & low);
        if ((i0 & ctrl_mask) != ctrl_mask) continue;
        const uint64_t i1 = i0 | tbit;
        const __m256d a0 = _mm256_loadu_pd(data + 2 * i0);
        const __m256d a1 = _mm256_loadu_pd(data + 2 * i1);
        const __m256d r0 = _mm256_add_pd(cmul(a0, m00r, m00i), cmul(a1, m01r, m01i));
        const __m256d r1 = _mm256_add_pd(cmul(a0, m10r, m10i), cmul(a1, m11r, m11i));
        _mm256_storeu_pd(data + 2 * i0, r0);
        _mm256_storeu_pd(data + 2 * i1, r1);
    }
}

__attribute__((target("avx2"))) void probabilities_avx2(std::span<const Amplitude> state, std::span<double> out) {
    const auto* data = reinterpret_cast<const double*>(state.data());
    const size_t n = state.size();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v01 = _mm256_loadu_pd(data + 2 * i);
        const __m256d v23 = _mm256_loadu_pd(data + 2 * i + 4);
        // hadd yields (p0, p2, p1, p3); reorder to (p0, p1, p2, p3).
        const __m256d sums = _mm256_hadd_pd(_mm256_mul_pd(v01, v01), _mm256_mul_pd(v23, v23));
        _mm256_storeu_pd(out.data() + i, _mm256_permute4x64_pd(sums, 0b11011000));
    }
    if (i < n) probabilities_scalar(state.subspan(i), out.subspan(i));
}

#else

void apply_1q_avx2(std::span<Amplitude> state, int target, uint64_t ctrl_mask, const Matrix2& m) {
    apply_1q_scalar(state, target, ctrl_mask, m);
}

void probabilities_avx2(std::span<const Amplitude> state, std::span<double> out) { probabilities_scalar(state, out); }

#endif

}  // namespace qlock::sim::kernels
