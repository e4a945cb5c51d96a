#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qlock/circuit.hpp"
#include "qlock/kernels.hpp"

namespace qlock::sim {

/// 2x2 matrix a gate applies to its target (the last operand); controls
/// are the leading operands.
Matrix2 gate_matrix(GateKind kind, const std::vector<double>& params);

/// Dense statevector, little-endian: qubit q is bit q of the basis index.
class StateVector {
  public:
    explicit StateVector(int num_qubits);
    StateVector(int num_qubits, std::vector<Amplitude> amplitudes);

    int num_qubits() const { return num_qubits_; }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    std::span<Amplitude> amplitudes() { return amps_; }

    void apply(const Gate& gate);
    void apply(const Circuit& circuit);  // gates only; barriers and measures skipped

    double norm() const;
    std::vector<double> probabilities() const;

  private:
    int num_qubits_;
    std::vector<Amplitude> amps_;
};

struct NoiseConfig {
    bool enabled = false;
    double p1 = 0.001;
    double p2 = 0.01;
    uint64_t seed = 0;

    void validate() const;
};

/// Measurement counts keyed by outcome strings. Strings are binary numbers of
/// width `bits` whose least-significant (rightmost) character is clbit 0.
struct Distribution {
    int shots = 0;
    int bits = 0;
    std::map<std::string, int> counts;

    std::string to_json() const;
    static Distribution from_json(const std::string& text);
    bool operator==(const Distribution&) const = default;
};

std::string outcome_string(uint64_t value, int bits);

/// Samples `shots` measurement outcomes. Without noise the state is evolved
/// once and each shot draws from |amplitude|^2; with noise every shot is a
/// trajectory with a random Pauli inserted after a gate with probability p1
/// (one qubit) or p2 (two or more). Shot s always uses stream
/// derive_seed(seed, s), so results do not depend on evaluation order.
/// Circuits without measurements are measured on every qubit.
Distribution run(const Circuit& circuit, int shots, const NoiseConfig& noise, uint64_t seed);
Distribution run(const Circuit& circuit, const StateVector& initial, int shots, const NoiseConfig& noise, uint64_t seed);

/// Row-major dim x dim unitary.
struct Unitary {
    int dim = 0;
    std::vector<Amplitude> data;

    Amplitude at(int row, int col) const { return data[static_cast<size_t>(row) * dim + col]; }
};

constexpr int kMaxUnitaryQubits = 10;

/// Product of the gate unitaries in circuit order; barriers and measurements
/// are ignored. Rejects circuits above kMaxUnitaryQubits.
Unitary unitary_of(const Circuit& circuit);

}  // namespace qlock::sim
