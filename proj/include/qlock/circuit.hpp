#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qlock {

/// Raised for malformed circuits or requests that violate a module contract.
class SemanticError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Gate alphabet. sdg/tdg are parsed into P with negative angles; CH/CY/CZ
// exist so that key-controlled versions of H/Y/Z stay inside the alphabet.
enum class GateKind : uint8_t { X, Y, Z, H, S, T, RZ, P, U3, CX, CY, CZ, CH, CCX };

enum class Origin : uint8_t { Original, Dummy, Converted, Inserted };

std::string_view gate_name(GateKind kind);
std::optional<GateKind> gate_from_name(std::string_view name);

/// Number of qubit operands for a gate kind.
int gate_arity(GateKind kind);
/// Number of angle parameters for a gate kind.
int gate_param_count(GateKind kind);

/// Phase classification follows a fixed list: rz, p, s, t (and the sdg/tdg
/// forms folded into p). Z is deliberately non-phase.
bool is_phase_kind(GateKind kind);

/// Key-controlled form used for logic locking, if one exists in the alphabet.
std::optional<GateKind> controlled_form(GateKind kind);
/// Inverse of controlled_form: drops the leading control.
std::optional<GateKind> uncontrolled_form(GateKind kind);

/// Rotation angle of a phase gate (s -> pi/2, t -> pi/4, rz/p -> param).
double phase_angle(GateKind kind, const std::vector<double>& params);

struct Gate {
    GateKind kind = GateKind::X;
    std::vector<double> params;
    std::vector<int> qubits;  // controls first, target last
    Origin origin = Origin::Original;

    bool operator==(const Gate&) const = default;
};

struct Barrier {
    std::vector<int> qubits;
    bool operator==(const Barrier&) const = default;
};

struct Measure {
    int qubit = 0;
    int clbit = 0;
    bool operator==(const Measure&) const = default;
};

using Op = std::variant<Gate, Barrier, Measure>;

struct Register {
    std::string name;
    int size = 0;
    bool operator==(const Register&) const = default;
};

/// Ordered op list over flat qubit/clbit indices. Registers are kept only so
/// that the circuit can be written back with its original names; flat index
/// i belongs to the register covering it in declaration order.
struct Circuit {
    int num_qubits = 0;
    int num_clbits = 0;
    std::vector<Register> qregs;
    std::vector<Register> cregs;
    std::vector<Op> ops;

    /// Builds a circuit with a single `q` register (and `c` if clbits > 0).
    static Circuit with_qubits(int num_qubits, int num_clbits = 0);

    Circuit& add(Gate gate);
    Circuit& add(GateKind kind, std::vector<int> qubits, std::vector<double> params = {});
    Circuit& barrier(std::vector<int> qubits);
    Circuit& measure(int qubit, int clbit);
    Circuit& measure_all();

    std::vector<std::string> qubit_labels() const;
    bool has_measurements() const;
    /// Qubits that feed a measurement; every qubit when nothing is measured.
    std::vector<int> output_qubits() const;
    std::vector<Gate> gates() const;

    /// Checks index ranges, arities, operand distinctness and measurement
    /// terminality. Throws SemanticError on the first violation.
    void validate() const;

    bool operator==(const Circuit&) const = default;
};

struct Metrics {
    int depth = 0;
    int gate_count = 0;
    bool operator==(const Metrics&) const = default;
};

/// Depth counts gates only; barriers synchronize the qubits they span and
/// measurements contribute nothing.
Metrics metrics(const Circuit& circuit);

enum class LayerKind : uint8_t { Phase, NonPhase };

struct Layer {
    LayerKind kind = LayerKind::NonPhase;
    std::vector<Gate> gates;

    /// Index into `gates` of the gate touching `qubit`, if any.
    std::optional<size_t> gate_on(int qubit) const;
};

struct LayeredCircuit {
    Circuit header;  // registers and sizes only; ops empty
    std::vector<Layer> layers;
    std::vector<Measure> measures;
};

/// Greedy as-soon-as-possible packing into kind-homogeneous layers. Gates
/// never move past an earlier gate on a shared qubit, a barrier, or a layer
/// of the other kind touching their qubits. When two layers of the same kind
/// would be adjacent an empty layer of the other kind separates them, so
/// kinds always alternate.
LayeredCircuit layerize(const Circuit& circuit);

/// Concatenates layers with a full-width barrier between consecutive layers,
/// then appends the measurements.
Circuit flatten(const LayeredCircuit& layered);

/// Per-(layer, qubit) count of output qubits reachable forward from that
/// location. Row `layers.size()` is the trailing slot after the last layer.
struct LightConeRank {
    std::vector<std::vector<int>> scores;
    int num_outputs = 0;

    int at(size_t layer, int qubit) const { return scores.at(layer).at(static_cast<size_t>(qubit)); }
};

LightConeRank light_cone_rank(const LayeredCircuit& layered);
LightConeRank light_cone_rank(const Circuit& circuit);

}  // namespace qlock
