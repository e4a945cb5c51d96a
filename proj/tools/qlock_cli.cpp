// qlock command-line driver: obfuscate, deobfuscate, simulate, evaluate,
// stats, equiv and repro.
//
// Exit codes: 0 success, 1 `equiv` found the circuits different,
// 2 input or parse error, 3 semantic or configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qlock/benchmarks.hpp"
#include "qlock/evaluation.hpp"
#include "qlock/locking.hpp"
#include "qlock/qasm.hpp"
#include "qlock/simulator.hpp"
#include "qlock/unlocking.hpp"

namespace {

using namespace qlock;

constexpr int kExitInput = 2;
constexpr int kExitSemantic = 3;

class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

Circuit read_circuit(const std::string& path) {
    try {
        return qasm::parse_circuit(read_file(path));
    } catch (const qasm::ParseError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const SemanticError& e) {
        throw InputError(path + ": " + e.what());
    }
}

lock::Key read_key(const std::string& path) {
    try {
        return lock::import_key(read_file(path));
    } catch (const SemanticError& e) {
        throw InputError(path + ": " + e.what());
    }
}

uint64_t default_seed() {
    if (const char* env = std::getenv("QLOCK_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

lock::Strategy parse_strategy(const std::string& s) {
    if (s == "random") return lock::Strategy::Random;
    if (s == "lightcone") return lock::Strategy::LightCone;
    throw SemanticError("unknown strategy '" + s + "'");
}

struct NoiseFlags {
    bool enabled = false;
    double p1 = 0.001;
    double p2 = 0.01;
    uint64_t seed = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_flag("--noise", enabled, "Enable the depolarizing noise model");
        cmd->add_option("--p1", p1, "Single-qubit depolarizing probability")->capture_default_str();
        cmd->add_option("--p2", p2, "Multi-qubit depolarizing probability")->capture_default_str();
        cmd->add_option("--noise-seed", seed, "Seed mixed into the noise streams")->capture_default_str();
    }

    sim::NoiseConfig config() const {
        sim::NoiseConfig n{enabled, p1, p2, seed};
        if (enabled) n.validate();
        return n;
    }
};

struct PlanFlags {
    std::optional<int> logic_sites;
    std::optional<int> phase_sites;
    bool dense = false;
    std::string strategy = "lightcone";
    std::string dummy = "cx";

    void add_to(CLI::App* cmd) {
        auto* nl = cmd->add_option("--logic-sites", logic_sites, "Number of logic key sites (default: dense)");
        auto* np = cmd->add_option("--phase-sites", phase_sites, "Number of phase key sites (default: dense)");
        cmd->add_flag("--dense", dense, "Every eligible gate plus one free slot per layer (the default)")
            ->excludes(nl)
            ->excludes(np);
        cmd->add_option("--strategy", strategy, "Site selection: random or lightcone")->capture_default_str();
        cmd->add_option("--dummy", dummy, "Dummy logic gate: cx or random")->capture_default_str();
    }

    lock::ObfuscationPlan plan(const Circuit& c, uint64_t seed) const {
        const auto layered = layerize(c);
        const auto strat = parse_strategy(strategy);
        auto plan = lock::dense_plan(layered, strat, seed);
        if (logic_sites) plan.logic_sites = lock::select_sites(layered, *logic_sites, 0, strat, seed).logic_sites;
        if (phase_sites) plan.phase_sites = lock::select_sites(layered, 0, *phase_sites, strat, seed).phase_sites;
        return plan;
    }

    lock::LockOptions options() const {
        if (dummy == "cx") return {lock::DummyKind::ControlledX};
        if (dummy == "random") return {lock::DummyKind::RandomControlled};
        throw SemanticError("unknown dummy kind '" + dummy + "'");
    }
};

std::string plan_summary(const lock::ObfuscationRecord& rec) {
    auto count = [](const std::vector<lock::Site>& sites, lock::Occupancy occ) {
        return std::count_if(sites.begin(), sites.end(), [&](const lock::Site& s) { return s.occupancy == occ; });
    };
    std::ostringstream out;
    out << "logic sites: " << rec.plan.logic_sites.size() << " ("
        << count(rec.plan.logic_sites, lock::Occupancy::ExistingGate) << " converted, "
        << count(rec.plan.logic_sites, lock::Occupancy::EmptySlot) << " dummy)\n";
    out << "phase sites: " << rec.plan.phase_sites.size() << " ("
        << count(rec.plan.phase_sites, lock::Occupancy::ExistingGate) << " existing, "
        << count(rec.plan.phase_sites, lock::Occupancy::EmptySlot) << " dummy)\n";
    out << "key bits: " << rec.key.bits.size() << " (logic " << rec.key.logic_count() << ", phase "
        << 3 * rec.key.phase_count() << ")\n";
    out << "depth: " << rec.original_metrics.depth << " -> " << rec.locked_metrics.depth << "\n";
    out << "gates: " << rec.original_metrics.gate_count << " -> " << rec.locked_metrics.gate_count << "\n";
    return out.str();
}

std::vector<eval::Mode> parse_modes(const std::vector<std::string>& names) {
    std::vector<eval::Mode> modes;
    for (const auto& n : names) modes.push_back(eval::mode_from_name(n));
    return modes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlock: lock quantum circuits with logic and phase keys, unlock them, and measure the effect"};
    app.require_subcommand(1);
    const uint64_t env_seed = default_seed();

    // obfuscate
    std::string ob_in, ob_out, ob_key;
    uint64_t ob_seed = env_seed;
    PlanFlags ob_plan;
    auto* ob = app.add_subcommand("obfuscate", "Lock a circuit; writes the locked QASM and the key file");
    ob->add_option("input", ob_in, "Input QASM")->required();
    ob->add_option("-o,--out", ob_out, "Locked QASM output")->required();
    ob->add_option("-k,--key", ob_key, "Key JSON output")->required();
    ob->add_option("--seed", ob_seed, "Seed (default $QLOCK_SEED or 0)");
    ob_plan.add_to(ob);

    // deobfuscate
    std::string de_locked, de_key, de_out, de_bits;
    bool de_no_simplify = false;
    auto* de = app.add_subcommand("deobfuscate", "Apply a key to a locked circuit");
    de->add_option("locked", de_locked, "Locked QASM")->required();
    de->add_option("key", de_key, "Key JSON")->required();
    de->add_option("-o,--out", de_out, "Restored QASM output")->required();
    de->add_option("--key-bits", de_bits, "Candidate key bits overriding the key file");
    de->add_flag("--no-simplify", de_no_simplify, "Keep the key qubit and resolved-away gates");

    // simulate
    std::string si_in, si_out;
    int si_shots = 1024;
    uint64_t si_seed = env_seed;
    NoiseFlags si_noise;
    auto* si = app.add_subcommand("simulate", "Sample measurement counts");
    si->add_option("circuit", si_in, "Circuit QASM")->required();
    si->add_option("-o,--out", si_out, "Counts JSON output (stdout if omitted)");
    si->add_option("--shots", si_shots, "Number of shots")->capture_default_str();
    si->add_option("--seed", si_seed, "Seed (default $QLOCK_SEED or 0)");
    si_noise.add_to(si);

    // evaluate
    std::string ev_orig, ev_locked, ev_key, ev_json, ev_csv, ev_name = "circuit";
    eval::EvalConfig ev_cfg;
    ev_cfg.seed = env_seed;
    std::vector<std::string> ev_modes{"logic_only", "phase_only", "combined", "restored"};
    bool ev_independent = false;
    NoiseFlags ev_noise;
    auto* ev = app.add_subcommand("evaluate", "TVD of each mode against the original over random inputs");
    ev->add_option("original", ev_orig, "Original QASM")->required();
    ev->add_option("locked", ev_locked, "Locked QASM")->required();
    ev->add_option("key", ev_key, "Key JSON")->required();
    ev->add_option("--json", ev_json, "Report JSON output");
    ev->add_option("--csv", ev_csv, "Report CSV output");
    ev->add_option("--name", ev_name, "Circuit name in the report")->capture_default_str();
    ev->add_option("--inputs", ev_cfg.n_inputs, "Random input states")->capture_default_str();
    ev->add_option("--shots", ev_cfg.shots, "Shots per input")->capture_default_str();
    ev->add_option("--seed", ev_cfg.seed, "Master seed (default $QLOCK_SEED or 0)");
    ev->add_option("--modes", ev_modes, "Modes: logic_only phase_only combined restored")->delimiter(',');
    ev->add_option("--wrong-key-sweep", ev_cfg.wrong_key_sweep, "Random wrong keys to evaluate")->capture_default_str();
    ev->add_flag("--independent-sampling", ev_independent, "Give every mode its own sampling stream");
    ev_noise.add_to(ev);

    // stats
    std::string st_in, st_out;
    auto* st = app.add_subcommand("stats", "Depth and gate count");
    st->add_option("circuit", st_in, "Circuit QASM")->required();
    st->add_option("-o,--out", st_out, "JSON output (stdout if omitted)");

    // equiv
    std::string eq_a, eq_b;
    double eq_tol = 1e-9;
    auto* eq = app.add_subcommand("equiv", "Check two circuits for equality up to global phase (exit 1 if not)");
    eq->add_option("a", eq_a, "First QASM")->required();
    eq->add_option("b", eq_b, "Second QASM")->required();
    eq->add_option("--tol", eq_tol, "Elementwise tolerance")->capture_default_str();

    // repro
    std::string rp_dir = default_benchmark_dir(), rp_out;
    uint64_t rp_seed = env_seed;
    std::string rp_strategy = "lightcone";
    eval::EvalConfig rp_cfg;
    NoiseFlags rp_noise;
    auto* rp = app.add_subcommand("repro", "Lock, unlock and evaluate every bundled benchmark");
    rp->add_option("--benchmarks", rp_dir, "Directory with the bundled QASM files")->capture_default_str();
    rp->add_option("-o,--out-dir", rp_out, "Output directory")->required();
    rp->add_option("--seed", rp_seed, "Master seed (default $QLOCK_SEED or 0)");
    rp->add_option("--strategy", rp_strategy, "Site selection: random or lightcone")->capture_default_str();
    rp->add_option("--inputs", rp_cfg.n_inputs, "Random input states")->capture_default_str();
    rp->add_option("--shots", rp_cfg.shots, "Shots per input")->capture_default_str();
    rp->add_option("--wrong-key-sweep", rp_cfg.wrong_key_sweep, "Random wrong keys per benchmark")->capture_default_str();
    bool rp_independent = false;
    rp->add_flag("--independent-sampling", rp_independent, "Give every mode its own sampling stream");
    rp_noise.add_to(rp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*ob) {
            const Circuit c = read_circuit(ob_in);
            const auto rec = lock::obfuscate(c, ob_plan.plan(c, ob_seed), ob_seed, ob_plan.options());
            write_file(ob_out, qasm::emit_circuit(rec.locked_circuit));
            write_file(ob_key, lock::export_key(rec.key) + "\n");
            std::cout << plan_summary(rec);
        } else if (*de) {
            const Circuit locked = read_circuit(de_locked);
            const lock::Key key = read_key(de_key);
            const lock::KeyBits bits = de_bits.empty() ? key.bits : lock::bits_from_string(de_bits);
            const auto result = unlock::unlock(locked, key, bits, !de_no_simplify);
            write_file(de_out, qasm::emit_circuit(result.restored));
        } else if (*si) {
            const Circuit c = read_circuit(si_in);
            const auto dist = sim::run(c, si_shots, si_noise.config(), si_seed);
            if (si_out.empty()) {
                std::cout << dist.to_json();
            } else {
                write_file(si_out, dist.to_json());
            }
        } else if (*ev) {
            const Circuit original = read_circuit(ev_orig);
            const Circuit locked = read_circuit(ev_locked);
            const lock::Key key = read_key(ev_key);
            ev_cfg.modes = parse_modes(ev_modes);
            ev_cfg.noise = ev_noise.config();
            ev_cfg.paired_sampling = !ev_independent;
            const auto record = eval::record_from_files(original, locked, key);
            const auto report = eval::evaluate(original, record, ev_cfg, ev_name);
            const std::string json = eval::report_to_json({report});
            if (!ev_json.empty()) write_file(ev_json, json);
            if (!ev_csv.empty()) write_file(ev_csv, eval::rows_to_csv({eval::report_row(report)}));
            if (ev_json.empty() && ev_csv.empty()) std::cout << json;
        } else if (*st) {
            const Circuit c = read_circuit(st_in);
            const Metrics m = metrics(c);
            const nlohmann::json j{{"qubits", c.num_qubits}, {"depth", m.depth}, {"gates", m.gate_count}};
            if (st_out.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                write_file(st_out, j.dump(2) + "\n");
            }
        } else if (*eq) {
            const bool same = eval::equivalent_up_to_global_phase(read_circuit(eq_a), read_circuit(eq_b), eq_tol);
            std::cout << (same ? "equivalent" : "not equivalent") << "\n";
            return same ? 0 : 1;
        } else if (*rp) {
            rp_cfg.seed = rp_seed;
            rp_cfg.noise = rp_noise.config();
            rp_cfg.paired_sampling = !rp_independent;
            std::filesystem::create_directories(rp_out);
            std::vector<eval::TvdReport> reports;
            std::vector<eval::ReportRow> rows;
            const auto strat = parse_strategy(rp_strategy);
            for (const auto& bench : bundled_benchmarks()) {
                const Circuit c = read_circuit(rp_dir + "/" + bench.file);
                const auto plan = lock::dense_plan(layerize(c), strat, rp_seed);
                const auto rec = lock::obfuscate(c, plan, rp_seed);
                const std::string stem = std::filesystem::path(bench.file).stem().string();
                write_file(rp_out + "/" + stem + ".locked.qasm", qasm::emit_circuit(rec.locked_circuit));
                write_file(rp_out + "/" + stem + ".key.json", lock::export_key(rec.key) + "\n");
                reports.push_back(eval::evaluate(c, rec, rp_cfg, bench.name));
                rows.push_back(eval::report_row(reports.back()));
                std::cerr << bench.name << ": combined " << reports.back().find(eval::Mode::Combined)->mean
                          << ", restored " << reports.back().find(eval::Mode::Restored)->mean << "\n";
            }
            write_file(rp_out + "/repro.json", eval::report_to_json(reports));
            write_file(rp_out + "/repro.csv", eval::rows_to_csv(rows));
            std::cout << eval::rows_to_csv(rows);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const qasm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
    return 0;
}
