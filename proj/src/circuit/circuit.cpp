#include "qlock/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace qlock {

namespace {

struct KindInfo {
    GateKind kind;
    std::string_view name;
    int arity;
    int params;
};

constexpr std::array<KindInfo, 14> kKinds{{
    {GateKind::X, "x", 1, 0},
    {GateKind::Y, "y", 1, 0},
    {GateKind::Z, "z", 1, 0},
    {GateKind::H, "h", 1, 0},
    {GateKind::S, "s", 1, 0},
    {GateKind::T, "t", 1, 0},
    {GateKind::RZ, "rz", 1, 1},
    {GateKind::P, "p", 1, 1},
    {GateKind::U3, "u3", 1, 3},
    {GateKind::CX, "cx", 2, 0},
    {GateKind::CY, "cy", 2, 0},
    {GateKind::CZ, "cz", 2, 0},
    {GateKind::CH, "ch", 2, 0},
    {GateKind::CCX, "ccx", 3, 0},
}};

const KindInfo& info(GateKind kind) { return kKinds[static_cast<size_t>(kind)]; }

}  // namespace

std::string_view gate_name(GateKind kind) { return info(kind).name; }

std::optional<GateKind> gate_from_name(std::string_view name) {
    for (const auto& k : kKinds) {
        if (k.name == name) return k.kind;
    }
    return std::nullopt;
}

int gate_arity(GateKind kind) { return info(kind).arity; }
int gate_param_count(GateKind kind) { return info(kind).params; }

bool is_phase_kind(GateKind kind) {
    switch (kind) {
        case GateKind::RZ:
        case GateKind::P:
        case GateKind::S:
        case GateKind::T:
            return true;
        default:
            return false;
    }
}

std::optional<GateKind> controlled_form(GateKind kind) {
    switch (kind) {
        case GateKind::X: return GateKind::CX;
        case GateKind::Y: return GateKind::CY;
        case GateKind::Z: return GateKind::CZ;
        case GateKind::H: return GateKind::CH;
        case GateKind::CX: return GateKind::CCX;
        default: return std::nullopt;
    }
}

std::optional<GateKind> uncontrolled_form(GateKind kind) {
    switch (kind) {
        case GateKind::CX: return GateKind::X;
        case GateKind::CY: return GateKind::Y;
        case GateKind::CZ: return GateKind::Z;
        case GateKind::CH: return GateKind::H;
        case GateKind::CCX: return GateKind::CX;
        default: return std::nullopt;
    }
}

double phase_angle(GateKind kind, const std::vector<double>& params) {
    switch (kind) {
        case GateKind::S: return std::numbers::pi / 2;
        case GateKind::T: return std::numbers::pi / 4;
        case GateKind::RZ:
        case GateKind::P: return params.at(0);
        default: throw SemanticError("phase_angle: '" + std::string(gate_name(kind)) + "' is not a phase gate");
    }
}

Circuit Circuit::with_qubits(int num_qubits, int num_clbits) {
    Circuit c;
    c.num_qubits = num_qubits;
    c.num_clbits = num_clbits;
    if (num_qubits > 0) c.qregs.push_back({"q", num_qubits});
    if (num_clbits > 0) c.cregs.push_back({"c", num_clbits});
    return c;
}

Circuit& Circuit::add(Gate gate) {
    ops.emplace_back(std::move(gate));
    return *this;
}

Circuit& Circuit::add(GateKind kind, std::vector<int> qubits, std::vector<double> params) {
    return add(Gate{kind, std::move(params), std::move(qubits), Origin::Original});
}

Circuit& Circuit::barrier(std::vector<int> qubits) {
    ops.emplace_back(Barrier{std::move(qubits)});
    return *this;
}

Circuit& Circuit::measure(int qubit, int clbit) {
    ops.emplace_back(Measure{qubit, clbit});
    return *this;
}

Circuit& Circuit::measure_all() {
    if (num_clbits < num_qubits) {
        cregs.push_back({"meas", num_qubits - num_clbits});
        num_clbits = num_qubits;
    }
    for (int q = 0; q < num_qubits; ++q) measure(q, q);
    return *this;
}

std::vector<std::string> Circuit::qubit_labels() const {
    std::vector<std::string> labels;
    for (const auto& r : qregs) {
        for (int i = 0; i < r.size; ++i) labels.push_back(r.name + "[" + std::to_string(i) + "]");
    }
    return labels;
}

bool Circuit::has_measurements() const {
    return std::any_of(ops.begin(), ops.end(), [](const Op& op) { return std::holds_alternative<Measure>(op); });
}

std::vector<int> Circuit::output_qubits() const {
    std::set<int> out;
    for (const auto& op : ops) {
        if (const auto* m = std::get_if<Measure>(&op)) out.insert(m->qubit);
    }
    if (out.empty()) {
        for (int q = 0; q < num_qubits; ++q) out.insert(q);
    }
    return {out.begin(), out.end()};
}

std::vector<Gate> Circuit::gates() const {
    std::vector<Gate> result;
    for (const auto& op : ops) {
        if (const auto* g = std::get_if<Gate>(&op)) result.push_back(*g);
    }
    return result;
}

void Circuit::validate() const {
    if (num_qubits < 0 || num_clbits < 0) throw SemanticError("negative register size");
    auto check_qubit = [&](int q) {
        if (q < 0 || q >= num_qubits) {
            throw SemanticError("qubit index " + std::to_string(q) + " out of range (" + std::to_string(num_qubits) +
                                " qubits)");
        }
    };
    std::vector<bool> measured(static_cast<size_t>(num_qubits), false);
    for (const auto& op : ops) {
        if (const auto* g = std::get_if<Gate>(&op)) {
            if (static_cast<int>(g->qubits.size()) != gate_arity(g->kind)) {
                throw SemanticError("gate '" + std::string(gate_name(g->kind)) + "' expects " +
                                    std::to_string(gate_arity(g->kind)) + " operands");
            }
            if (static_cast<int>(g->params.size()) != gate_param_count(g->kind)) {
                throw SemanticError("gate '" + std::string(gate_name(g->kind)) + "' expects " +
                                    std::to_string(gate_param_count(g->kind)) + " parameters");
            }
            for (size_t i = 0; i < g->qubits.size(); ++i) {
                check_qubit(g->qubits[i]);
                if (measured[static_cast<size_t>(g->qubits[i])]) {
                    throw SemanticError("gate after measurement on qubit " + std::to_string(g->qubits[i]));
                }
                for (size_t j = 0; j < i; ++j) {
                    if (g->qubits[i] == g->qubits[j]) throw SemanticError("repeated operand in gate");
                }
            }
        } else if (const auto* b = std::get_if<Barrier>(&op)) {
            for (int q : b->qubits) check_qubit(q);
        } else {
            const auto& m = std::get<Measure>(op);
            check_qubit(m.qubit);
            if (m.clbit < 0 || m.clbit >= num_clbits) {
                throw SemanticError("clbit index " + std::to_string(m.clbit) + " out of range");
            }
            measured[static_cast<size_t>(m.qubit)] = true;
        }
    }
}

Metrics metrics(const Circuit& circuit) {
    std::vector<int> level(static_cast<size_t>(circuit.num_qubits), 0);
    Metrics m;
    for (const auto& op : circuit.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) {
            int start = 0;
            for (int q : g->qubits) start = std::max(start, level[static_cast<size_t>(q)]);
            for (int q : g->qubits) level[static_cast<size_t>(q)] = start + 1;
            ++m.gate_count;
        } else if (const auto* b = std::get_if<Barrier>(&op)) {
            int sync = 0;
            for (int q : b->qubits) sync = std::max(sync, level[static_cast<size_t>(q)]);
            for (int q : b->qubits) level[static_cast<size_t>(q)] = sync;
        }
    }
    for (int l : level) m.depth = std::max(m.depth, l);
    return m;
}

}  // namespace qlock
