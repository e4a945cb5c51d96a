#include <algorithm>
#include <set>

#include "qlock/circuit.hpp"

namespace qlock {

namespace {

int min_qubit(const Gate& g) { return *std::min_element(g.qubits.begin(), g.qubits.end()); }

LayerKind kind_of(const Gate& g) { return is_phase_kind(g.kind) ? LayerKind::Phase : LayerKind::NonPhase; }

LayerKind other(LayerKind k) { return k == LayerKind::Phase ? LayerKind::NonPhase : LayerKind::Phase; }

bool touches(const Gate& g, const std::vector<bool>& in_set) {
    return std::any_of(g.qubits.begin(), g.qubits.end(), [&](int q) { return in_set[static_cast<size_t>(q)]; });
}

}  // namespace

std::optional<size_t> Layer::gate_on(int qubit) const {
    for (size_t i = 0; i < gates.size(); ++i) {
        const auto& qs = gates[i].qubits;
        if (std::find(qs.begin(), qs.end(), qubit) != qs.end()) return i;
    }
    return std::nullopt;
}

LayeredCircuit layerize(const Circuit& circuit) {
    LayeredCircuit out;
    out.header = circuit;
    out.header.ops.clear();

    std::vector<int> last_touch(static_cast<size_t>(circuit.num_qubits), -1);
    size_t boundary = 0;

    for (const auto& op : circuit.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) {
            const LayerKind kind = kind_of(*g);
            size_t lo = boundary;
            for (int q : g->qubits) lo = std::max(lo, static_cast<size_t>(last_touch[static_cast<size_t>(q)] + 1));

            size_t target = lo;
            while (target < out.layers.size() && out.layers[target].kind != kind) ++target;
            if (target == out.layers.size()) {
                if (!out.layers.empty() && out.layers.back().kind == kind) {
                    out.layers.push_back(Layer{other(kind), {}});
                }
                out.layers.push_back(Layer{kind, {}});
                target = out.layers.size() - 1;
            }

            auto& gates = out.layers[target].gates;
            const int key = min_qubit(*g);
            auto pos = std::find_if(gates.begin(), gates.end(), [&](const Gate& other_gate) {
                return min_qubit(other_gate) > key;
            });
            gates.insert(pos, *g);
            for (int q : g->qubits) last_touch[static_cast<size_t>(q)] = static_cast<int>(target);
        } else if (std::holds_alternative<Barrier>(op)) {
            boundary = out.layers.size();
        } else {
            out.measures.push_back(std::get<Measure>(op));
        }
    }
    return out;
}

Circuit flatten(const LayeredCircuit& layered) {
    Circuit c = layered.header;
    c.ops.clear();
    std::vector<int> all(static_cast<size_t>(c.num_qubits));
    for (int q = 0; q < c.num_qubits; ++q) all[static_cast<size_t>(q)] = q;

    for (size_t i = 0; i < layered.layers.size(); ++i) {
        if (i > 0) c.barrier(all);
        for (const auto& g : layered.layers[i].gates) c.add(g);
    }
    for (const auto& m : layered.measures) c.ops.emplace_back(m);
    return c;
}

LightConeRank light_cone_rank(const LayeredCircuit& layered) {
    const int n = layered.header.num_qubits;
    std::vector<bool> is_output(static_cast<size_t>(n), false);
    for (const auto& m : layered.measures) is_output[static_cast<size_t>(m.qubit)] = true;
    if (layered.measures.empty()) std::fill(is_output.begin(), is_output.end(), true);

    LightConeRank rank;
    rank.num_outputs = static_cast<int>(std::count(is_output.begin(), is_output.end(), true));
    const size_t rows = layered.layers.size() + 1;
    rank.scores.assign(rows, std::vector<int>(static_cast<size_t>(n), 0));

    for (size_t start = 0; start < rows; ++start) {
        for (int q = 0; q < n; ++q) {
            std::vector<bool> cone(static_cast<size_t>(n), false);
            cone[static_cast<size_t>(q)] = true;
            for (size_t l = start; l < layered.layers.size(); ++l) {
                for (const auto& g : layered.layers[l].gates) {
                    if (touches(g, cone)) {
                        for (int t : g.qubits) cone[static_cast<size_t>(t)] = true;
                    }
                }
            }
            int score = 0;
            for (int t = 0; t < n; ++t) score += (cone[static_cast<size_t>(t)] && is_output[static_cast<size_t>(t)]) ? 1 : 0;
            rank.scores[start][static_cast<size_t>(q)] = score;
        }
    }
    return rank;
}

LightConeRank light_cone_rank(const Circuit& circuit) { return light_cone_rank(layerize(circuit)); }

}  // namespace qlock
