#pragma once

// Statevector inner loops. Every gate in the alphabet is a 2x2 matrix on one
// target qubit, optionally restricted to basis states where a control mask is
// fully set, so one kernel family covers the whole simulator.
//
// Each kernel has a scalar reference and an AVX2 variant; the dispatcher picks
// one at runtime. Variants are equivalence-tested against the reference.

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>

namespace qlock::sim {

using Amplitude = std::complex<double>;

struct Matrix2 {
    Amplitude m00, m01, m10, m11;
};

enum class KernelIsa { Scalar, Avx2 };

std::string_view isa_name(KernelIsa isa);

namespace kernels {

/// state[i], state[i | 1<<target] <- m * (state[i], state[i | 1<<target]) for
/// every i with the target bit clear and all bits of ctrl_mask set.
void apply_1q_scalar(std::span<Amplitude> state, int target, uint64_t ctrl_mask, const Matrix2& m);
void apply_1q_avx2(std::span<Amplitude> state, int target, uint64_t ctrl_mask, const Matrix2& m);

/// out[i] = |state[i]|^2
void probabilities_scalar(std::span<const Amplitude> state, std::span<double> out);
void probabilities_avx2(std::span<const Amplitude> state, std::span<double> out);

}  // namespace kernels

bool cpu_has_avx2();

/// Best ISA supported by this CPU, unless overridden with set_active_isa or
/// the QLOCK_KERNEL environment variable ("scalar" or "avx2").
KernelIsa active_isa();

/// Throws std::invalid_argument if the CPU lacks the requested ISA.
void set_active_isa(KernelIsa isa);

void apply_1q(std::span<Amplitude> state, int target, uint64_t ctrl_mask, const Matrix2& m);
void probabilities(std::span<const Amplitude> state, std::span<double> out);

}  // namespace qlock::sim
