#include "qlock/unlocking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qlock::unlock {

namespace {

bool involves(const Gate& g, int q) { return std::find(g.qubits.begin(), g.qubits.end(), q) != g.qubits.end(); }

bool is_zero_angle(const Gate& g) {
    if (g.kind != GateKind::RZ && g.kind != GateKind::P) return false;
    const double r = std::remainder(g.params.at(0), 2 * std::numbers::pi);
    return std::abs(r) <= 1e-9;
}

}  // namespace

Circuit insert_key_toggles(const Circuit& locked, const lock::KeyBits& logic_bits, int ancilla) {
    if (ancilla < 0 || ancilla >= locked.num_qubits) throw SemanticError("key qubit index out of range");
    Circuit out = locked;
    out.ops.clear();
    size_t section = 0;
    bool state = false;
    for (const auto& op : locked.ops) {
        const auto* g = std::get_if<Gate>(&op);
        if (!g || !involves(*g, ancilla)) {
            out.ops.push_back(op);
            continue;
        }
        if (g->qubits.size() == 1) {
            if (g->kind == GateKind::H) continue;
            throw SemanticError("unexpected '" + std::string(gate_name(g->kind)) + "' on the key qubit of a locked circuit");
        }
        if (g->qubits.front() != ancilla) throw SemanticError("key qubit must be the control of every key section");
        if (section >= logic_bits.size()) {
            throw SemanticError("locked circuit has more key sections than the " + std::to_string(logic_bits.size()) +
                                " logic bits supplied");
        }
        const bool bit = logic_bits[section++];
        if (bit != state) {
            out.add(Gate{GateKind::X, {}, {ancilla}, Origin::Inserted});
            state = bit;
        }
        out.ops.push_back(op);
    }
    if (section != logic_bits.size()) {
        throw SemanticError("logic bit count " + std::to_string(logic_bits.size()) + " does not match " +
                            std::to_string(section) + " key sections");
    }
    return out;
}

Circuit apply_phase_key(const Circuit& locked, const std::vector<PhaseAssignment>& assignments) {
    Circuit out = locked;
    std::vector<bool> done(assignments.size(), false);
    int layer = 0;
    for (auto& op : out.ops) {
        if (std::holds_alternative<Barrier>(op)) {
            ++layer;
            continue;
        }
        auto* g = std::get_if<Gate>(&op);
        if (!g || !is_phase_kind(g->kind)) continue;
        for (size_t i = 0; i < assignments.size(); ++i) {
            const auto& a = assignments[i];
            if (a.layer != layer || g->qubits.front() != a.qubit) continue;
            if (done[i]) throw SemanticError("two phase gates match one key site");
            g->kind = GateKind::RZ;
            g->params = {a.kappa * std::numbers::pi / 4};
            done[i] = true;
        }
    }
    for (size_t i = 0; i < assignments.size(); ++i) {
        if (!done[i]) {
            throw SemanticError("phase key site (" + std::to_string(assignments[i].layer) + ", " +
                                std::to_string(assignments[i].qubit) + ") not found in locked circuit");
        }
    }
    return out;
}

Circuit simplify(const Circuit& toggled, std::optional<int> ancilla) {
    Circuit out = toggled;
    out.ops.clear();
    const int k = ancilla.value_or(-1);
    auto remap = [&](int q) { return (ancilla && q > k) ? q - 1 : q; };

    bool state = false;
    for (const auto& op : toggled.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) {
            if (ancilla && involves(*g, k)) {
                if (g->qubits.size() == 1) {
                    if (g->kind != GateKind::X) {
                        throw SemanticError("key qubit is not classical: '" + std::string(gate_name(g->kind)) +
                                            "' acts on it");
                    }
                    state = !state;
                    continue;
                }
                if (g->qubits.front() != k) throw SemanticError("key qubit used as a gate target");
                if (!state) continue;
                Gate resolved{*uncontrolled_form(g->kind), g->params, {}, g->origin};
                for (size_t i = 1; i < g->qubits.size(); ++i) resolved.qubits.push_back(remap(g->qubits[i]));
                if (resolved.origin == Origin::Converted) resolved.origin = Origin::Original;
                out.add(std::move(resolved));
                continue;
            }
            if (is_zero_angle(*g)) continue;
            Gate copy = *g;
            for (int& q : copy.qubits) q = remap(q);
            if (copy.origin == Origin::Converted) copy.origin = Origin::Original;
            out.add(std::move(copy));
        } else if (const auto* b = std::get_if<Barrier>(&op)) {
            Barrier copy;
            for (int q : b->qubits) {
                if (q != k) copy.qubits.push_back(remap(q));
            }
            if (!copy.qubits.empty()) out.ops.emplace_back(std::move(copy));
        } else {
            Measure m = std::get<Measure>(op);
            if (m.qubit == k) throw SemanticError("key qubit is measured");
            m.qubit = remap(m.qubit);
            out.ops.emplace_back(m);
        }
    }

    if (ancilla) {
        int offset = 0;
        bool removed = false;
        for (auto it = out.qregs.begin(); it != out.qregs.end(); ++it) {
            if (k >= offset && k < offset + it->size) {
                if (it->size == 1) {
                    out.qregs.erase(it);
                } else {
                    --it->size;
                }
                removed = true;
                break;
            }
            offset += it->size;
        }
        if (!removed) throw SemanticError("key qubit index out of range");
        --out.num_qubits;
    }
    return out;
}

std::vector<PhaseAssignment> phase_assignments(const lock::Key& key, const lock::KeyBits& candidate) {
    std::vector<PhaseAssignment> out;
    size_t offset = 0;
    for (const auto& e : key.schedule) {
        if (e.kind == lock::EntryKind::Phase) {
            const int kappa = (candidate.at(offset) << 2) | (candidate.at(offset + 1) << 1) |
                              static_cast<int>(candidate.at(offset + 2));
            out.push_back({e.layer, e.qubit, kappa});
        }
        offset += static_cast<size_t>(e.span);
    }
    return out;
}

UnlockResult unlock(const Circuit& locked, const lock::Key& key, const lock::KeyBits& candidate, bool simplify,
                    std::optional<int> ancilla) {
    if (candidate.size() != key.bits.size()) {
        throw SemanticError("candidate key has " + std::to_string(candidate.size()) + " bits, expected " +
                            std::to_string(key.bits.size()));
    }
    const bool has_logic = key.logic_count() > 0;
    if (has_logic && !ancilla) ancilla = locked.num_qubits - 1;
    if (!has_logic) ancilla.reset();

    Circuit c = has_logic ? insert_key_toggles(locked, key.logic_bits(candidate), *ancilla) : locked;
    c = apply_phase_key(c, phase_assignments(key, candidate));

    UnlockResult result;
    result.applied_bits = candidate;
    result.simplified = simplify;
    result.restored = simplify ? unlock::simplify(c, ancilla) : std::move(c);
    return result;
}

}  // namespace qlock::unlock
