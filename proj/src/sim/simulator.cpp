#include "qlock/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "qlock/rng.hpp"

namespace qlock::sim {

namespace {

using namespace std::complex_literals;

Amplitude expi(double a) { return {std::cos(a), std::sin(a)}; }

constexpr Matrix2 kPauliX{0, 1, 1, 0};
constexpr Matrix2 kPauliY{0, -1i, 1i, 0};
constexpr Matrix2 kPauliZ{1, 0, 0, -1};

struct MeasurementMap {
    int bits = 0;
    std::vector<std::pair<int, int>> qubit_to_clbit;  // in program order
};

MeasurementMap measurement_map(const Circuit& c) {
    MeasurementMap map;
    for (const auto& op : c.ops) {
        if (const auto* m = std::get_if<Measure>(&op)) map.qubit_to_clbit.emplace_back(m->qubit, m->clbit);
    }
    if (map.qubit_to_clbit.empty()) {
        map.bits = c.num_qubits;
        for (int q = 0; q < c.num_qubits; ++q) map.qubit_to_clbit.emplace_back(q, q);
    } else {
        map.bits = c.num_clbits;
    }
    return map;
}

uint64_t outcome_of(uint64_t basis_index, const MeasurementMap& map) {
    uint64_t v = 0;
    for (const auto& [q, c] : map.qubit_to_clbit) {
        const uint64_t bit = (basis_index >> q) & 1;
        v = (v & ~(uint64_t{1} << c)) | (bit << c);
    }
    return v;
}

std::vector<double> cumulative(const StateVector& s) {
    std::vector<double> cdf = s.probabilities();
    double acc = 0;
    for (auto& p : cdf) {
        acc += p;
        p = acc;
    }
    return cdf;
}

uint64_t sample_index(const std::vector<double>& cdf, double u) {
    const double scaled = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), scaled);
    if (it == cdf.end()) --it;
    return static_cast<uint64_t>(it - cdf.begin());
}

struct PauliEvent {
    size_t gate;
    uint64_t pauli;  // base-4 digits, one per gate qubit, never all zero
};

void apply_pauli(StateVector& s, const Gate& g, uint64_t code) {
    for (int q : g.qubits) {
        switch (code & 3) {
            case 1: apply_1q(s.amplitudes(), q, 0, kPauliX); break;
            case 2: apply_1q(s.amplitudes(), q, 0, kPauliY); break;
            case 3: apply_1q(s.amplitudes(), q, 0, kPauliZ); break;
            default: break;
        }
        code >>= 2;
    }
}

}  // namespace

Matrix2 gate_matrix(GateKind kind, const std::vector<double>& params) {
    const double r = std::numbers::sqrt2 / 2;
    switch (kind) {
        case GateKind::X:
        case GateKind::CX:
        case GateKind::CCX: return kPauliX;
        case GateKind::Y:
        case GateKind::CY: return kPauliY;
        case GateKind::Z:
        case GateKind::CZ: return kPauliZ;
        case GateKind::H:
        case GateKind::CH: return {r, r, r, -r};
        case GateKind::S: return {1, 0, 0, 1i};
        case GateKind::T: return {1, 0, 0, expi(std::numbers::pi / 4)};
        case GateKind::RZ: return {expi(-params.at(0) / 2), 0, 0, expi(params.at(0) / 2)};
        case GateKind::P: return {1, 0, 0, expi(params.at(0))};
        case GateKind::U3: {
            const double theta = params.at(0), phi = params.at(1), lambda = params.at(2);
            const double c = std::cos(theta / 2), s = std::sin(theta / 2);
            return {c, -expi(lambda) * s, expi(phi) * s, expi(phi + lambda) * c};
        }
    }
    throw SemanticError("unknown gate kind");
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 0 || num_qubits > 30) throw SemanticError("unsupported qubit count " + std::to_string(num_qubits));
    amps_.assign(size_t{1} << num_qubits, Amplitude{0, 0});
    amps_[0] = 1;
}

StateVector::StateVector(int num_qubits, std::vector<Amplitude> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits < 0 || num_qubits > 30 || amps_.size() != (size_t{1} << num_qubits)) {
        throw SemanticError("amplitude vector length does not match qubit count");
    }
}

void StateVector::apply(const Gate& gate) {
    uint64_t ctrl = 0;
    for (int q : gate.qubits) {
        if (q < 0 || q >= num_qubits_) {
            throw SemanticError("qubit index " + std::to_string(q) + " out of range for " +
                                std::to_string(num_qubits_) + "-qubit state");
        }
    }
    for (size_t i = 0; i + 1 < gate.qubits.size(); ++i) ctrl |= uint64_t{1} << gate.qubits[i];
    apply_1q(amps_, gate.qubits.back(), ctrl, gate_matrix(gate.kind, gate.params));
}

void StateVector::apply(const Circuit& circuit) {
    for (const auto& op : circuit.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) apply(*g);
    }
}

double StateVector::norm() const {
    double acc = 0;
    for (double p : probabilities()) acc += p;
    return std::sqrt(acc);
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> out(amps_.size());
    sim::probabilities(amps_, out);
    return out;
}

void NoiseConfig::validate() const {
    if (!(p1 >= 0 && p1 <= 1) || !(p2 >= 0 && p2 <= 1)) {
        throw SemanticError("depolarizing probabilities must lie in [0, 1]");
    }
}

std::string outcome_string(uint64_t value, int bits) {
    std::string s(static_cast<size_t>(bits), '0');
    for (int b = 0; b < bits; ++b) {
        if ((value >> b) & 1) s[static_cast<size_t>(bits - 1 - b)] = '1';
    }
    return s;
}

std::string Distribution::to_json() const {
    nlohmann::json j;
    j["shots"] = shots;
    j["bits"] = bits;
    j["counts"] = nlohmann::json::object();
    for (const auto& [k, v] : counts) j["counts"][k] = v;
    return j.dump(2) + "\n";
}

Distribution Distribution::from_json(const std::string& text) {
    Distribution d;
    try {
        const auto j = nlohmann::json::parse(text);
        d.shots = j.at("shots").get<int>();
        d.bits = j.at("bits").get<int>();
        long total = 0;
        for (const auto& [k, v] : j.at("counts").items()) {
            if (static_cast<int>(k.size()) != d.bits || k.find_first_not_of("01") != std::string::npos) {
                throw SemanticError("outcome '" + k + "' is not a " + std::to_string(d.bits) + "-bit string");
            }
            d.counts[k] = v.get<int>();
            if (d.counts[k] < 0) throw SemanticError("negative count");
            total += d.counts[k];
        }
        if (total != d.shots) throw SemanticError("counts do not sum to shots");
    } catch (const nlohmann::json::exception& e) {
        throw SemanticError(std::string("malformed distribution JSON: ") + e.what());
    }
    return d;
}

Distribution run(const Circuit& circuit, int shots, const NoiseConfig& noise, uint64_t seed) {
    return run(circuit, StateVector(circuit.num_qubits), shots, noise, seed);
}

Distribution run(const Circuit& circuit, const StateVector& initial, int shots, const NoiseConfig& noise,
                 uint64_t seed) {
    if (shots <= 0) throw SemanticError("shot count must be positive");
    circuit.validate();
    if (initial.num_qubits() != circuit.num_qubits) throw SemanticError("initial state size does not match circuit");
    if (noise.enabled) noise.validate();

    const MeasurementMap map = measurement_map(circuit);
    std::vector<Gate> gates = circuit.gates();

    StateVector ideal = initial;
    for (const auto& g : gates) ideal.apply(g);
    const std::vector<double> ideal_cdf = cumulative(ideal);

    std::map<uint64_t, int> tally;
    for (int shot = 0; shot < shots; ++shot) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(shot)));
        std::vector<PauliEvent> events;
        if (noise.enabled) {
            Rng noise_rng(derive_seed(derive_seed(seed, static_cast<uint64_t>(shot)), noise.seed));
            for (size_t k = 0; k < gates.size(); ++k) {
                const double p = gates[k].qubits.size() == 1 ? noise.p1 : noise.p2;
                const double u = noise_rng.uniform();
                if (u < p) {
                    const uint64_t choices = (uint64_t{1} << (2 * gates[k].qubits.size())) - 1;
                    events.push_back({k, noise_rng.below(choices) + 1});
                }
            }
        }
        const double u = rng.uniform();
        uint64_t index;
        if (events.empty()) {
            index = sample_index(ideal_cdf, u);
        } else {
            StateVector s = initial;
            size_t next = 0;
            for (size_t k = 0; k < gates.size(); ++k) {
                s.apply(gates[k]);
                while (next < events.size() && events[next].gate == k) apply_pauli(s, gates[k], events[next++].pauli);
            }
            index = sample_index(cumulative(s), u);
        }
        ++tally[outcome_of(index, map)];
    }

    Distribution d;
    d.shots = shots;
    d.bits = map.bits;
    for (const auto& [v, n] : tally) d.counts[outcome_string(v, map.bits)] = n;
    return d;
}

Unitary unitary_of(const Circuit& circuit) {
    if (circuit.num_qubits > kMaxUnitaryQubits) {
        throw SemanticError("unitary_of supports at most " + std::to_string(kMaxUnitaryQubits) + " qubits");
    }
    const int dim = 1 << circuit.num_qubits;
    Unitary u;
    u.dim = dim;
    u.data.assign(static_cast<size_t>(dim) * dim, Amplitude{0, 0});
    const std::vector<Gate> gates = circuit.gates();
    for (int col = 0; col < dim; ++col) {
        std::vector<Amplitude> basis(static_cast<size_t>(dim), Amplitude{0, 0});
        basis[static_cast<size_t>(col)] = 1;
        StateVector s(circuit.num_qubits, std::move(basis));
        for (const auto& g : gates) s.apply(g);
        for (int row = 0; row < dim; ++row) u.data[static_cast<size_t>(row) * dim + col] = s.amplitudes()[row];
    }
    return u;
}

}  // namespace qlock::sim
