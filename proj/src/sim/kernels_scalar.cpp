#include "qlock/kernels.hpp"

namespace qlock::sim::kernels {

namespace {

inline Amplitude cmul(const Amplitude& a, const Amplitude& b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

void apply_1q_scalar(std::span<Amplitude> state, int target, uint64_t ctrl_mask, const Matrix2& m) {
    const uint64_t tbit = uint64_t{1} << target;
    const uint64_t low = tbit - 1;
    const uint64_t half = state.size() / 2;
    for (uint64_t k = 0; k < half; ++k) {
        const uint64_t i0 = ((k & ~low) << 1) | (k & low);
        if ((i0 & ctrl_mask) != ctrl_mask) continue;
        const uint64_t i1 = i0 | tbit;
        const Amplitude a0 = state[i0];
        const Amplitude a1 = state[i1];
        state[i0] = cmul(m.m00, a0) + cmul(m.m01, a1);
        state[i1] = cmul(m.m10, a0) + cmul(m.m11, a1);
    }
}

void probabilities_scalar(std::span<const Amplitude> state, std::span<double> out) {
    for (size_t i = 0; i < state.size(); ++i) {
        out[i] = state[i].real() * state[i].real() + state[i].imag() * state[i].imag();
    }
}

}  // namespace qlock::sim::kernels
