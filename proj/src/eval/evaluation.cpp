#include "qlock/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qlock/rng.hpp"
#include "qlock/unlocking.hpp"

namespace qlock::eval {

double tvd(const sim::Distribution& a, const sim::Distribution& b) {
    if (a.shots != b.shots) {
        throw SemanticError("tvd: shot counts differ (" + std::to_string(a.shots) + " vs " + std::to_string(b.shots) +
                            ")");
    }
    if (a.bits != b.bits) throw SemanticError("tvd: outcome widths differ");
    if (a.shots <= 0) throw SemanticError("tvd: shot count must be positive");
    long diff = 0;
    auto ia = a.counts.begin();
    auto ib = b.counts.begin();
    while (ia != a.counts.end() || ib != b.counts.end()) {
        if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
            diff += ia->second;
            ++ia;
        } else if (ia == a.counts.end() || ib->first < ia->first) {
            diff += ib->second;
            ++ib;
        } else {
            diff += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(diff) / (2.0 * a.shots);
}

std::vector<Gate> random_input_layer(int num_qubits, uint64_t seed) {
    Rng rng(seed);
    std::vector<Gate> layer;
    for (int q = 0; q < num_qubits; ++q) {
        const double u = rng.uniform();
        const double theta = 2 * std::acos(std::sqrt(u));
        const double phi = rng.uniform(0, 2 * std::numbers::pi);
        const double lambda = rng.uniform(0, 2 * std::numbers::pi);
        layer.push_back(Gate{GateKind::U3, {theta, phi, lambda}, {q}, Origin::Inserted});
    }
    return layer;
}

Circuit with_input_layer(const Circuit& circuit, const std::vector<Gate>& layer) {
    Circuit out = circuit;
    out.ops.clear();
    for (const auto& g : layer) out.add(g);
    out.ops.insert(out.ops.end(), circuit.ops.begin(), circuit.ops.end());
    return out;
}

namespace {

// Measures qubits [0, n) into fresh clbits when `c` measures nothing, so the
// key qubit never shows up in sampled outcomes.
Circuit measured_on(const Circuit& c, int n, bool original_measured) {
    if (original_measured) return c;
    Circuit out = c;
    out.cregs.push_back({"meas", n});
    out.num_clbits += n;
    for (int q = 0; q < n; ++q) out.measure(q, c.num_clbits + q);
    return out;
}

Circuit without_measurements(const Circuit& c) {
    Circuit out = c;
    out.ops.clear();
    for (const auto& op : c.ops) {
        if (!std::holds_alternative<Measure>(op)) out.ops.push_back(op);
    }
    return out;
}

}  // namespace

bool equivalent_up_to_global_phase(const Circuit& a, const Circuit& b, double tol) {
    if (a.num_qubits != b.num_qubits) {
        throw SemanticError("equivalence check: qubit counts differ (" + std::to_string(a.num_qubits) + " vs " +
                            std::to_string(b.num_qubits) + ")");
    }
    const auto ua = sim::unitary_of(without_measurements(a));
    const auto ub = sim::unitary_of(without_measurements(b));
    size_t pivot = 0;
    for (size_t i = 1; i < ub.data.size(); ++i) {
        if (std::abs(ub.data[i]) > std::abs(ub.data[pivot])) pivot = i;
    }
    const sim::Amplitude ratio = ua.data[pivot] / ub.data[pivot];
    if (std::abs(ratio) < 1e-12) return false;
    const sim::Amplitude phase = ratio / std::abs(ratio);
    for (size_t i = 0; i < ua.data.size(); ++i) {
        if (std::abs(ua.data[i] - phase * ub.data[i]) > tol) return false;
    }
    return true;
}

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::LogicOnly: return "logic_only";
        case Mode::PhaseOnly: return "phase_only";
        case Mode::Combined: return "combined";
        case Mode::Restored: return "restored";
    }
    return "?";
}

Mode mode_from_name(const std::string& name) {
    for (Mode m : all_modes()) {
        if (mode_name(m) == name) return m;
    }
    throw SemanticError("unknown evaluation mode '" + name + "'");
}

std::vector<Mode> all_modes() { return {Mode::LogicOnly, Mode::PhaseOnly, Mode::Combined, Mode::Restored}; }

void EvalConfig::validate() const {
    if (n_inputs <= 0) throw SemanticError("number of input samples must be positive");
    if (shots <= 0) throw SemanticError("shot count must be positive");
    if (wrong_key_sweep < 0) throw SemanticError("wrong-key sweep size must be non-negative");
    if (modes.empty()) throw SemanticError("no evaluation modes requested");
    if (noise.enabled) noise.validate();
}

const ModeResult* TvdReport::find(Mode mode) const {
    for (const auto& m : modes) {
        if (m.mode == mode) return &m;
    }
    return nullptr;
}

Circuit mode_circuit(const lock::ObfuscationRecord& record, Mode mode) {
    const auto& key = record.key;
    switch (mode) {
        case Mode::Combined: return record.locked_circuit;
        case Mode::Restored: return unlock::unlock(record, key.bits, true).restored;
        case Mode::LogicOnly:
            if (key.logic_count() == 0) throw SemanticError("logic_only mode needs at least one logic key site");
            return unlock::apply_phase_key(record.locked_circuit, unlock::phase_assignments(key, key.bits));
        case Mode::PhaseOnly: {
            if (key.phase_count() == 0) throw SemanticError("phase_only mode needs at least one phase key site");
            if (!record.ancilla) return record.locked_circuit;
            const Circuit toggled =
                unlock::insert_key_toggles(record.locked_circuit, key.logic_bits(key.bits), *record.ancilla);
            return unlock::simplify(toggled, record.ancilla);
        }
    }
    throw SemanticError("unknown mode");
}

TvdReport evaluate(const Circuit& original, const lock::ObfuscationRecord& record, const EvalConfig& config,
                   const std::string& name) {
    config.validate();
    const int n = original.num_qubits;
    const bool measured = original.has_measurements();
    const Circuit reference = measured_on(flatten(layerize(original)), n, measured);

    std::vector<Circuit> circuits;
    for (Mode m : config.modes) circuits.push_back(measured_on(mode_circuit(record, m), n, measured));

    TvdReport report;
    report.circuit = name;
    report.seed = config.seed;
    report.n_inputs = config.n_inputs;
    report.shots = config.shots;
    report.noise = config.noise.enabled;
    report.original = record.original_metrics;
    report.locked = record.locked_metrics;
    report.logic_key_bits = static_cast<int>(record.key.logic_count());
    report.phase_key_bits = static_cast<int>(3 * record.key.phase_count());
    for (Mode m : config.modes) report.modes.push_back(ModeResult{m, {}, 0, 0, 0});

    std::vector<std::vector<Gate>> layers;
    std::vector<sim::Distribution> references;
    std::vector<uint64_t> ref_seeds;
    for (int i = 0; i < config.n_inputs; ++i) {
        const uint64_t input_seed = derive_seed(config.seed, static_cast<uint64_t>(i));
        layers.push_back(random_input_layer(n, derive_seed(input_seed, 0)));
        ref_seeds.push_back(derive_seed(input_seed, 1));
        references.push_back(
            sim::run(with_input_layer(reference, layers.back()), config.shots, config.noise, ref_seeds.back()));

        for (size_t m = 0; m < config.modes.size(); ++m) {
            const uint64_t seed = config.paired_sampling ? ref_seeds.back() : derive_seed(input_seed, 2 + m);
            const auto d = sim::run(with_input_layer(circuits[m], layers.back()), config.shots, config.noise, seed);
            report.modes[m].per_input.push_back(tvd(references.back(), d));
        }
    }
    for (auto& r : report.modes) {
        double sum = 0;
        for (double v : r.per_input) sum += v;
        r.mean = sum / static_cast<double>(r.per_input.size());
        r.min = *std::min_element(r.per_input.begin(), r.per_input.end());
        r.max = *std::max_element(r.per_input.begin(), r.per_input.end());
    }

    if (config.wrong_key_sweep > 0 && !record.key.bits.empty()) {
        WrongKeySweep sweep;
        sweep.histogram.assign(10, 0);
        Rng rng(derive_seed(config.seed, 0x5eedULL));
        const bool check_equiv = n <= sim::kMaxUnitaryQubits;
        for (int j = 0; j < config.wrong_key_sweep; ++j) {
            lock::KeyBits candidate(record.key.bits.size());
            do {
                for (size_t b = 0; b < candidate.size(); ++b) candidate[b] = (rng.next_u64() >> 63) != 0;
            } while (candidate == record.key.bits);
            const Circuit restored = measured_on(unlock::unlock(record, candidate, true).restored, n, measured);
            if (check_equiv && equivalent_up_to_global_phase(restored, reference, 1e-9)) ++sweep.equivalent_keys;
            double sum = 0;
            for (int i = 0; i < config.n_inputs; ++i) {
                const auto d = sim::run(with_input_layer(restored, layers[static_cast<size_t>(i)]), config.shots,
                                        config.noise, ref_seeds[static_cast<size_t>(i)]);
                sum += tvd(references[static_cast<size_t>(i)], d);
            }
            const double mean = sum / config.n_inputs;
            sweep.per_key_mean.push_back(mean);
            ++sweep.histogram[static_cast<size_t>(std::min(9, static_cast<int>(mean * 10)))];
        }
        report.sweep = std::move(sweep);
    }
    return report;
}

lock::ObfuscationRecord record_from_files(const Circuit& original, const Circuit& locked, const lock::Key& key) {
    lock::ObfuscationRecord rec;
    rec.locked_circuit = locked;
    rec.key = key;
    if (key.logic_count() > 0) {
        if (locked.num_qubits != original.num_qubits + 1) {
            throw SemanticError("locked circuit must have exactly one key qubit more than the original");
        }
        rec.ancilla = locked.num_qubits - 1;
    } else if (locked.num_qubits != original.num_qubits) {
        throw SemanticError("locked circuit qubit count does not match the original");
    }
    size_t offset = 0;
    for (const auto& e : key.schedule) {
        if (e.kind == lock::EntryKind::Logic) {
            rec.plan.logic_sites.push_back(
                {e.layer, e.qubit, key.bits[offset] ? lock::Occupancy::ExistingGate : lock::Occupancy::EmptySlot});
        } else {
            rec.plan.phase_sites.push_back(
                {e.layer, e.qubit, e.kappa != 0 ? lock::Occupancy::ExistingGate : lock::Occupancy::EmptySlot});
        }
        offset += static_cast<size_t>(e.span);
    }
    rec.original_metrics = metrics(original);
    rec.locked_metrics = metrics(locked);
    return rec;
}

ReportRow report_row(const TvdReport& report) {
    ReportRow row;
    row.circuit = report.circuit;
    row.depth = report.original.depth;
    row.depth_obf = report.locked.depth;
    row.gates = report.original.gate_count;
    row.gates_obf = report.locked.gate_count;
    row.logic_key_bits = report.logic_key_bits;
    row.phase_key_bits = report.phase_key_bits;
    for (const auto& m : report.modes) row.tvd.emplace_back(mode_name(m.mode), m.mean);
    return row;
}

namespace {

const char* const kFixedColumns[] = {"circuit",   "depth",          "depth_obf",     "gates",
                                     "gates_obf", "logic_key_bits", "phase_key_bits"};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
    std::vector<std::string> modes;
    for (const auto& r : rows) {
        for (const auto& [name, v] : r.tvd) {
            if (std::find(modes.begin(), modes.end(), name) == modes.end()) modes.push_back(name);
        }
    }
    std::ostringstream out;
    for (size_t i = 0; i < std::size(kFixedColumns); ++i) out << (i ? "," : "") << kFixedColumns[i];
    for (const auto& m : modes) out << ",tvd_" << m;
    out << "\n";
    for (const auto& r : rows) {
        if (r.circuit.find_first_of(",\n\"") != std::string::npos) {
            throw SemanticError("circuit name '" + r.circuit + "' cannot be written to CSV");
        }
        out << r.circuit << "," << r.depth << "," << r.depth_obf << "," << r.gates << "," << r.gates_obf << ","
            << r.logic_key_bits << "," << r.phase_key_bits;
        for (const auto& m : modes) {
            out << ",";
            for (const auto& [name, v] : r.tvd) {
                if (name == m) out << fmt_double(v);
            }
        }
        out << "\n";
    }
    return out.str();
}

std::vector<ReportRow> rows_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SemanticError("empty CSV report");
    const auto header = split_csv_line(line);
    if (header.size() < std::size(kFixedColumns)) throw SemanticError("CSV report header is too short");
    for (size_t i = 0; i < std::size(kFixedColumns); ++i) {
        if (header[i] != kFixedColumns[i]) throw SemanticError("unexpected CSV column '" + header[i] + "'");
    }
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw SemanticError("CSV row has the wrong number of cells");
        ReportRow r;
        try {
            r.circuit = cells[0];
            r.depth = std::stoi(cells[1]);
            r.depth_obf = std::stoi(cells[2]);
            r.gates = std::stoi(cells[3]);
            r.gates_obf = std::stoi(cells[4]);
            r.logic_key_bits = std::stoi(cells[5]);
            r.phase_key_bits = std::stoi(cells[6]);
            for (size_t i = std::size(kFixedColumns); i < cells.size(); ++i) {
                if (cells[i].empty()) continue;
                r.tvd.emplace_back(header[i].substr(4), std::stod(cells[i]));
            }
        } catch (const std::logic_error&) {
            throw SemanticError("malformed number in CSV report");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string report_to_json(const std::vector<TvdReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j;
        j["circuit"] = r.circuit;
        j["seed"] = r.seed;
        j["inputs"] = r.n_inputs;
        j["shots"] = r.shots;
        j["noise"] = r.noise;
        j["depth"] = r.original.depth;
        j["depth_obf"] = r.locked.depth;
        j["gates"] = r.original.gate_count;
        j["gates_obf"] = r.locked.gate_count;
        j["logic_key_bits"] = r.logic_key_bits;
        j["phase_key_bits"] = r.phase_key_bits;
        j["modes"] = nlohmann::json::object();
        for (const auto& m : r.modes) {
            j["modes"][mode_name(m.mode)] = {{"mean", m.mean}, {"min", m.min}, {"max", m.max}, {"per_input", m.per_input}};
        }
        if (r.sweep) {
            j["wrong_key_sweep"] = {{"keys", r.sweep->per_key_mean.size()},
                                    {"per_key_mean", r.sweep->per_key_mean},
                                    {"histogram", r.sweep->histogram},
                                    {"equivalent_keys", r.sweep->equivalent_keys}};
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

}  // namespace qlock::eval
