#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlock/circuit.hpp"
#include "qlock/locking.hpp"
#include "qlock/simulator.hpp"

namespace qlock::eval {

/// Half the L1 distance between two count vectors, normalized by shots.
/// Outcomes missing from one side count as zero.
double tvd(const sim::Distribution& a, const sim::Distribution& b);

/// One U3 per qubit preparing a Haar-random single-qubit state:
/// theta = 2 acos(sqrt(u)), phi and lambda uniform in [0, 2pi).
std::vector<Gate> random_input_layer(int num_qubits, uint64_t seed);

/// Returns `circuit` with `layer` prepended.
Circuit with_input_layer(const Circuit& circuit, const std::vector<Gate>& layer);

/// Unitaries equal up to a global phase, compared elementwise after aligning
/// the phase on the largest-magnitude entry.
bool equivalent_up_to_global_phase(const Circuit& a, const Circuit& b, double tol = 1e-9);

enum class Mode { LogicOnly, PhaseOnly, Combined, Restored };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);
std::vector<Mode> all_modes();

struct EvalConfig {
    int n_inputs = 10;
    int shots = 100;
    uint64_t seed = 0;
    sim::NoiseConfig noise;
    std::vector<Mode> modes = all_modes();
    /// Reference and every mode share per-input sampling streams (common
    /// random numbers). Off: each mode draws from its own stream.
    bool paired_sampling = true;
    /// Random wrong keys to push through unlock(); 0 disables the sweep.
    int wrong_key_sweep = 0;

    void validate() const;
};

struct ModeResult {
    Mode mode = Mode::Combined;
    std::vector<double> per_input;
    double mean = 0;
    double min = 0;
    double max = 0;
};

struct WrongKeySweep {
    std::vector<double> per_key_mean;
    std::vector<int> histogram;  // 10 equal bins over [0, 1]
    int equivalent_keys = 0;     // wrong keys that still restore the function
};

struct TvdReport {
    std::string circuit;
    uint64_t seed = 0;
    int n_inputs = 0;
    int shots = 0;
    bool noise = false;
    Metrics original;
    Metrics locked;
    int logic_key_bits = 0;
    int phase_key_bits = 0;
    std::vector<ModeResult> modes;
    std::optional<WrongKeySweep> sweep;

    const ModeResult* find(Mode mode) const;
};

/// Concrete circuits for each evaluation mode. logic_only keeps the key
/// qubit's Hadamards with the correct phase key applied; phase_only resolves
/// the logic key correctly and keeps the randomized angles; combined is the
/// locked circuit; restored is the correct-key unlock, simplified.
Circuit mode_circuit(const lock::ObfuscationRecord& record, Mode mode);

/// Golden reference: the original, layerized with barriers at layer
/// boundaries, exactly as it is laid out inside the locked circuit.
TvdReport evaluate(const Circuit& original, const lock::ObfuscationRecord& record, const EvalConfig& config,
                   const std::string& name = "circuit");

/// Rebuilds the parts of a record that evaluation needs from the files the
/// CLI exchanges.
lock::ObfuscationRecord record_from_files(const Circuit& original, const Circuit& locked, const lock::Key& key);

/// Flat table row: circuit, depth, depth_obf, gates, gates_obf,
/// logic_key_bits, phase_key_bits, tvd_<mode>...
struct ReportRow {
    std::string circuit;
    int depth = 0;
    int depth_obf = 0;
    int gates = 0;
    int gates_obf = 0;
    int logic_key_bits = 0;
    int phase_key_bits = 0;
    std::vector<std::pair<std::string, double>> tvd;

    bool operator==(const ReportRow&) const = default;
};

ReportRow report_row(const TvdReport& report);
std::string rows_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_csv(const std::string& text);
std::string report_to_json(const std::vector<TvdReport>& reports);

}  // namespace qlock::eval
