#pragma once

#include <optional>
#include <vector>

#include "qlock/circuit.hpp"
#include "qlock/locking.hpp"

namespace qlock::unlock {

/// Removes the Hadamards on the key qubit and inserts an X on it before each
/// key section whose bit differs from the previous one (the first section is
/// compared against |0>). A key section is a multi-qubit gate controlled by
/// the key qubit.
Circuit insert_key_toggles(const Circuit& locked, const lock::KeyBits& logic_bits, int ancilla);

struct PhaseAssignment {
    int layer = 0;
    int qubit = 0;
    int kappa = 0;
};

/// Sets the angle of the phase gate at each (layer, qubit) to kappa*pi/4.
/// Layers are the spans between barriers of the locked circuit.
Circuit apply_phase_key(const Circuit& locked, const std::vector<PhaseAssignment>& assignments);

/// Resolves gates controlled by a classically known key qubit, deletes
/// zero-angle phase gates and removes the key qubit. Throws SemanticError when
/// the key qubit is not classical (e.g. a Hadamard survived).
Circuit simplify(const Circuit& toggled, std::optional<int> ancilla);

/// Decodes the phase assignments of `candidate` (three bits per phase entry,
/// most significant first).
std::vector<PhaseAssignment> phase_assignments(const lock::Key& key, const lock::KeyBits& candidate);

struct UnlockResult {
    Circuit restored;
    lock::KeyBits applied_bits;
    bool simplified = false;
};

/// Applies a candidate key using the schedule of `key`. The key qubit
/// defaults to the last qubit of the locked circuit when there are logic
/// entries.
UnlockResult unlock(const Circuit& locked, const lock::Key& key, const lock::KeyBits& candidate, bool simplify,
                    std::optional<int> ancilla = std::nullopt);

inline UnlockResult unlock(const lock::ObfuscationRecord& record, const lock::KeyBits& candidate, bool simplify) {
    return unlock(record.locked_circuit, record.key, candidate, simplify, record.ancilla);
}

}  // namespace qlock::unlock
