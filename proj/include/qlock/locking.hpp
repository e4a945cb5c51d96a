#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlock/circuit.hpp"

namespace qlock::lock {

enum class Occupancy { ExistingGate, EmptySlot };

/// An obfuscation location. For an existing gate `qubit` is the lowest qubit
/// the gate acts on.
struct Site {
    int layer = 0;
    int qubit = 0;
    Occupancy occupancy = Occupancy::EmptySlot;

    bool operator==(const Site&) const = default;
};

struct ObfuscationPlan {
    std::vector<Site> logic_sites;
    std::vector<Site> phase_sites;
    uint64_t seed = 0;

    bool empty() const { return logic_sites.empty() && phase_sites.empty(); }
};

enum class Strategy { Random, LightCone };

using KeyBits = std::vector<bool>;

enum class EntryKind { Logic, Phase };

struct KeyEntry {
    EntryKind kind = EntryKind::Logic;
    int layer = 0;
    int qubit = 0;
    int span = 1;   // 1 for logic, 3 for phase
    int kappa = 0;  // phase entries: angle index, angle = kappa * pi/4

    bool operator==(const KeyEntry&) const = default;
};

/// Logic entries come first, then phase entries, each group layer-major and
/// qubit-minor. Phase entries own three bits, most significant first.
struct Key {
    KeyBits bits;
    std::vector<KeyEntry> schedule;

    std::string bit_string() const;
    size_t logic_count() const;
    size_t phase_count() const;
    /// Bits of the logic entries in schedule order.
    KeyBits logic_bits(const KeyBits& candidate) const;

    bool operator==(const Key&) const = default;
};

KeyBits bits_from_string(const std::string& text);
std::string bits_to_string(const KeyBits& bits);

struct ObfuscationRecord {
    Circuit locked_circuit;
    std::optional<int> ancilla;  // q_k, present iff there are logic sites
    Key key;
    ObfuscationPlan plan;
    Metrics original_metrics;
    Metrics locked_metrics;
};

enum class DummyKind {
    ControlledX,       // CX(q_k, slot)
    RandomControlled,  // uniform over CX, CY, CZ, CH
};

struct LockOptions {
    DummyKind dummy = DummyKind::ControlledX;
};

/// kappa in 0..7 when alpha is within 1e-9 of kappa*pi/4 (mod 2pi).
std::optional<int> normalize_phase_angle(double alpha);

struct Candidates {
    std::vector<Site> logic;
    std::vector<Site> phase;
};

/// Every lockable location: controllable gates and free qubits of non-phase
/// layers for logic keys, pi/4-grid phase gates and free qubits of phase
/// layers for phase keys.
Candidates candidate_sites(const LayeredCircuit& layered);

ObfuscationPlan select_sites(const LayeredCircuit& layered, int n_logic, int n_phase, Strategy strategy,
                             uint64_t seed);

/// Every eligible existing gate plus one empty slot per layer.
ObfuscationPlan dense_plan(const LayeredCircuit& layered, Strategy strategy, uint64_t seed);

ObfuscationRecord obfuscate(const Circuit& circuit, const ObfuscationPlan& plan, uint64_t seed,
                            const LockOptions& options = {});

std::string export_key(const Key& key);
/// Throws SemanticError on malformed input or a span/bit-length mismatch.
Key import_key(const std::string& text);

}  // namespace qlock::lock
