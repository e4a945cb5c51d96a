// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are fixed here and never tuned per run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "qlock/benchmarks.hpp"
#include "qlock/evaluation.hpp"
#include "qlock/locking.hpp"
#include "qlock/qasm.hpp"
#include "qlock/unlocking.hpp"
#include "support/helpers.hpp"
#include "support/oracle.hpp"

using namespace qlock;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << " first failure: " << what << ";";
            pass = false;
        }
    }
};

struct Bench {
    std::string name;
    Circuit circuit;
    int bits = 0;
};

std::vector<Bench> load_all() {
    std::vector<Bench> out;
    for (const auto& b : bundled_benchmarks()) {
        Bench x{b.name, load_benchmark(b), 0};
        for (const auto& op : x.circuit.ops) x.bits += std::holds_alternative<Measure>(op);
        out.push_back(std::move(x));
    }
    return out;
}

lock::ObfuscationRecord dense_record(const Circuit& c, uint64_t seed) {
    return lock::obfuscate(c, lock::dense_plan(layerize(c), lock::Strategy::LightCone, seed), seed);
}

/// Random plan of arbitrary size, strategy and dummy kind.
struct RandomLock {
    lock::ObfuscationPlan plan;
    lock::LockOptions options;
};

RandomLock random_lock(const Circuit& c, Rng& rng) {
    const auto lc = layerize(c);
    const auto cand = lock::candidate_sites(lc);
    const int nl = static_cast<int>(rng.below(cand.logic.size() + 1));
    const int np = static_cast<int>(rng.below(cand.phase.size() + 1));
    const auto strat = rng.below(2) ? lock::Strategy::LightCone : lock::Strategy::Random;
    RandomLock r;
    r.plan = lock::select_sites(lc, nl, np, strat, rng.next_u64());
    r.options.dummy = rng.below(2) ? lock::DummyKind::RandomControlled : lock::DummyKind::ControlledX;
    return r;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// 1. Correct-key restoration on random plans, unitary oracle at 1e-9.
Outcome criterion_1(const std::vector<Bench>& benches) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(0xacce55, 1));
    int checked = 0;
    for (const auto& b : benches) {
        const auto reference = flatten(layerize(b.circuit));
        const auto ref_oracle = oracle::unitary(reference);
        for (int i = 0; i < 20; ++i) {
            const auto rl = random_lock(b.circuit, rng);
            const uint64_t seed = rng.next_u64();
            const auto rec = lock::obfuscate(b.circuit, rl.plan, seed, rl.options);
            const auto restored = unlock::unlock(rec, rec.key.bits, true).restored;
            const std::string tag = b.name + " pair " + std::to_string(i);
            o.require(restored.num_qubits == b.circuit.num_qubits, tag + " kept the key qubit");
            o.require(eval::equivalent_up_to_global_phase(restored, reference, 1e-9), tag + " unitary mismatch");
            o.require(oracle::equal_up_to_phase(oracle::unitary(restored), ref_oracle, 1e-9),
                      tag + " independent oracle mismatch");
            ++checked;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 60, "runtime " + fmt(secs) + " s exceeds 60 s");
    o.detail << " " << checked << " (plan, seed) pairs equivalent within 1e-9 in " << fmt(secs) << " s";
    return o;
}

// 2. Restored TVD: noiseless within the multinomial bound; with the
// depolarizing proxy below 0.15.
Outcome criterion_2(const std::vector<Bench>& benches) {
    Outcome o;
    std::ostringstream info;
    for (const auto& b : benches) {
        const auto rec = dense_record(b.circuit, 0);
        const double bound = 2 * std::sqrt(std::pow(2.0, b.bits) / 200);
        eval::EvalConfig cfg;
        cfg.modes = {eval::Mode::Restored};
        const double paired = eval::evaluate(b.circuit, rec, cfg).modes[0].mean;
        cfg.paired_sampling = false;
        const double independent = eval::evaluate(b.circuit, rec, cfg).modes[0].mean;
        cfg.paired_sampling = true;
        cfg.noise.enabled = true;
        const double noisy = eval::evaluate(b.circuit, rec, cfg).modes[0].mean;
        cfg.paired_sampling = false;
        const double noisy_independent = eval::evaluate(b.circuit, rec, cfg).modes[0].mean;

        o.require(paired <= bound, b.name + " noiseless restored " + fmt(paired) + " > " + fmt(bound));
        o.require(independent <= bound,
                  b.name + " noiseless restored (independent streams) " + fmt(independent) + " > " + fmt(bound));
        o.require(noisy < 0.15, b.name + " noisy restored " + fmt(noisy) + " >= 0.15");
        info << " " << b.name << " " << fmt(paired) << "/" << fmt(independent) << " (bound " << fmt(bound)
             << "), noisy " << fmt(noisy) << " [independent streams " << fmt(noisy_independent) << "];";
    }
    o.detail << " restored mean TVD noiseless paired/independent:" << info.str();
    return o;
}

// 3. Combined-mode corruption under dense locking, and restored < combined.
Outcome criterion_3(const std::vector<Bench>& benches) {
    Outcome o;
    std::ostringstream info;
    constexpr int kSeeds = 10;
    for (const auto& b : benches) {
        const double need = (b.name == "Adder" || b.name == "Fredkin") ? 0.5 : 0.3;
        double sum = 0, lo = 1, at_default = 0;
        for (uint64_t s = 0; s < kSeeds; ++s) {
            const auto rec = dense_record(b.circuit, s);
            for (bool noise : {false, true}) {
                for (bool paired : {true, false}) {
                    eval::EvalConfig cfg;
                    cfg.seed = s;
                    cfg.noise.enabled = noise;
                    cfg.paired_sampling = paired;
                    cfg.modes = {eval::Mode::Combined, eval::Mode::Restored};
                    const auto r = eval::evaluate(b.circuit, rec, cfg);
                    const double combined = r.modes[0].mean, restored = r.modes[1].mean;
                    o.require(restored < combined, b.name + " seed " + std::to_string(s) + " restored " +
                                                       fmt(restored) + " >= combined " + fmt(combined));
                    if (!noise && paired) {
                        sum += combined;
                        lo = std::min(lo, combined);
                        if (s == 0) at_default = combined;
                    }
                }
            }
        }
        const double mean = sum / kSeeds;
        o.require(at_default >= need, b.name + " combined " + fmt(at_default) + " < " + fmt(need));
        o.require(mean >= need, b.name + " mean combined over seeds " + fmt(mean) + " < " + fmt(need));
        info << " " << b.name << " " << fmt(at_default) << " (need " << fmt(need) << ", seeds 0-9 mean " << fmt(mean)
             << ", min " << fmt(lo) << ");";
    }
    o.detail << " combined TVD at seed 0:" << info.str();
    return o;
}

// 4. Key accounting and structural growth for every plan class.
Outcome criterion_4(const std::vector<Bench>& benches) {
    Outcome o;
    Rng rng(derive_seed(0xacce55, 4));
    int plans = 0, non_empty = 0, unchanged_count = 0, unchanged_phase_only = 0;
    auto check = [&](const Circuit& c, const lock::ObfuscationPlan& plan, const lock::LockOptions& opt,
                     const std::string& tag) {
        const auto rec = lock::obfuscate(c, plan, rng.next_u64(), opt);
        eval::EvalConfig cfg;
        cfg.n_inputs = 1;
        cfg.shots = 1;
        cfg.modes = {eval::Mode::Combined};
        const auto row = eval::report_row(eval::evaluate(c, rec, cfg));
        o.require(row.logic_key_bits == static_cast<int>(plan.logic_sites.size()), tag + " logic key bits");
        o.require(row.phase_key_bits == 3 * static_cast<int>(plan.phase_sites.size()), tag + " phase key bits");
        o.require(rec.key.bits.size() == plan.logic_sites.size() + 3 * plan.phase_sites.size(), tag + " key length");
        ++plans;
        if (plan.empty()) return;
        ++non_empty;
        o.require(row.depth_obf >= row.depth, tag + " depth decreased");
        if (row.gates_obf <= row.gates) {
            ++unchanged_count;
            const bool existing_phase_only =
                plan.logic_sites.empty() &&
                std::all_of(plan.phase_sites.begin(), plan.phase_sites.end(),
                            [](const lock::Site& s) { return s.occupancy == lock::Occupancy::ExistingGate; });
            unchanged_phase_only += existing_phase_only;
        }
        o.require(row.gates_obf > row.gates, tag + " gate count " + std::to_string(row.gates) + " -> " +
                                                 std::to_string(row.gates_obf));
    };
    for (const auto& b : benches) {
        const auto lc = layerize(b.circuit);
        check(b.circuit, lock::dense_plan(lc, lock::Strategy::LightCone, 0), {}, b.name + " dense");
        for (int i = 0; i < 50; ++i) {
            const auto rl = random_lock(b.circuit, rng);
            check(b.circuit, rl.plan, rl.options, b.name + " random plan " + std::to_string(i));
        }
        // one existing phase gate and nothing else
        const auto cand = lock::candidate_sites(lc);
        for (const auto& s : cand.phase) {
            if (s.occupancy != lock::Occupancy::ExistingGate) continue;
            lock::ObfuscationPlan single;
            single.phase_sites = {s};
            check(b.circuit, single, {}, b.name + " single existing phase site");
            break;
        }
    }
    o.detail << " " << plans << " plans (" << non_empty << " non-empty); " << unchanged_count
             << " non-empty plans left the gate count unchanged, " << unchanged_phase_only
             << " of them lock only existing phase gates (re-angled in place, no gate added)";
    return o;
}

// 5. TVD examples and metric properties.
Outcome criterion_5() {
    Outcome o;
    auto d = [](std::map<std::string, int> c) { return sim::Distribution{100, 1, std::move(c)}; };
    o.require(eval::tvd(d({{"0", 60}, {"1", 40}}), d({{"0", 60}, {"1", 40}})) == 0.0, "identical != 0");
    o.require(eval::tvd(d({{"0", 100}}), d({{"1", 100}})) == 1.0, "disjoint != 1");
    o.require(eval::tvd(d({{"0", 95}, {"1", 5}}), d({{"0", 50}, {"1", 50}})) == 0.45, "example != 0.45");

    Rng rng(derive_seed(0xacce55, 5));
    auto random_dist = [&](int bits, int shots) {
        sim::Distribution x{shots, bits, {}};
        const uint64_t support = rng.below(uint64_t{1} << bits) + 1;
        for (int s = 0; s < shots; ++s) ++x.counts[sim::outcome_string(rng.below(support), bits)];
        return x;
    };
    for (int i = 0; i < 1000; ++i) {
        const int bits = 1 + static_cast<int>(rng.below(5));
        const int shots = 1 + static_cast<int>(rng.below(300));
        const auto a = random_dist(bits, shots), b = random_dist(bits, shots), c = random_dist(bits, shots);
        const double ab = eval::tvd(a, b);
        o.require(ab == eval::tvd(b, a), "symmetry");
        o.require(eval::tvd(a, a) == 0.0, "identity");
        o.require((ab == 0.0) == (a.counts == b.counts), "zero iff equal");
        o.require(ab >= 0 && ab <= 1, "range");
        o.require(ab <= eval::tvd(a, c) + eval::tvd(c, b) + 1e-12, "triangle inequality");
    }
    o.detail << " three examples exact; symmetry, identity and triangle inequality on 1000 random pairs";
    return o;
}

// 6. Inserted X count equals k0 + sum(k_i xor k_{i-1}).
Outcome criterion_6(const std::vector<Bench>& benches) {
    Outcome o;
    Rng rng(derive_seed(0xacce55, 6));
    auto count_x = [](const Circuit& c, int q) {
        int n = 0;
        for (const auto& g : c.gates()) n += g.kind == GateKind::X && g.qubits == std::vector<int>{q};
        return n;
    };
    auto expected = [](const lock::KeyBits& k) {
        int n = k.empty() ? 0 : k[0];
        for (size_t i = 1; i < k.size(); ++i) n += k[i] != k[i - 1];
        return n;
    };
    for (int i = 0; i < 1000; ++i) {
        const size_t len = rng.below(65);
        lock::KeyBits bits(len);
        for (size_t j = 0; j < len; ++j) bits[j] = rng.below(2) == 1;
        auto c = Circuit::with_qubits(2);
        for (size_t j = 0; j < len; ++j) c.add(GateKind::H, {1}).add(GateKind::CX, {1, 0});
        const auto t = unlock::insert_key_toggles(c, bits, 1);
        o.require(count_x(t, 1) == expected(bits), "vector " + std::to_string(i) + " (length " +
                                                       std::to_string(len) + ")");
    }
    int locked_checks = 0;
    for (const auto& b : benches) {
        const auto rec = dense_record(b.circuit, 6);
        for (int i = 0; i < 50; ++i) {
            lock::KeyBits bits(rec.key.logic_count());
            for (size_t j = 0; j < bits.size(); ++j) bits[j] = rng.below(2) == 1;
            const auto t = unlock::insert_key_toggles(rec.locked_circuit, bits, *rec.ancilla);
            o.require(count_x(t, *rec.ancilla) == expected(bits), b.name + " locked circuit toggles");
            ++locked_checks;
        }
    }
    o.detail << " 1000 random vectors up to length 64 plus " << locked_checks << " keys on locked benchmarks";
    return o;
}

// 7. kappa round trip through normalization, locking and key application.
Outcome criterion_7() {
    Outcome o;
    const double pi = std::numbers::pi;
    for (int kappa = 0; kappa < 8; ++kappa) {
        const double angle = kappa * pi / 4;
        o.require(lock::normalize_phase_angle(angle) == kappa, "normalize kappa " + std::to_string(kappa));
        for (GateKind kind : {GateKind::RZ, GateKind::P}) {
            const auto c = Circuit::with_qubits(1).add(kind, {0}, {angle});
            lock::ObfuscationPlan plan;
            plan.phase_sites = {{0, 0, lock::Occupancy::ExistingGate}};
            const auto rec = lock::obfuscate(c, plan, static_cast<uint64_t>(kappa));
            o.require(rec.key.schedule.at(0).kappa == kappa, "recorded kappa " + std::to_string(kappa));
            const auto applied = unlock::apply_phase_key(rec.locked_circuit, unlock::phase_assignments(rec.key, rec.key.bits));
            o.require(applied.gates().at(0).params.at(0) == angle, "restored angle for kappa " + std::to_string(kappa));
        }
    }
    o.detail << " kappa 0..7 normalize, encode and restore to kappa*pi/4 bit-exactly";
    return o;
}

// 8. Wrong keys break equivalence.
Outcome criterion_8(const std::vector<Bench>& benches) {
    Outcome o;
    Rng rng(derive_seed(0xacce55, 8));
    std::ostringstream info;
    for (const auto& b : benches) {
        const auto rec = dense_record(b.circuit, 0);
        const auto reference = flatten(layerize(b.circuit));
        for (size_t i = 0; i < rec.key.logic_count(); ++i) {
            auto k = rec.key.bits;
            k[i] = !k[i];
            o.require(!eval::equivalent_up_to_global_phase(unlock::unlock(rec, k, true).restored, reference, 1e-9),
                      b.name + " logic bit " + std::to_string(i) + " flip still equivalent");
        }
        int equivalent = 0;
        for (int j = 0; j < 1000; ++j) {
            lock::KeyBits k(rec.key.bits.size());
            do {
                for (size_t i = 0; i < k.size(); ++i) k[i] = rng.below(2) == 1;
            } while (k == rec.key.bits);
            equivalent += eval::equivalent_up_to_global_phase(unlock::unlock(rec, k, true).restored, reference, 1e-9);
        }
        o.require(equivalent < 10, b.name + " " + std::to_string(equivalent) + "/1000 random keys equivalent");
        info << " " << b.name << " " << rec.key.logic_count() << " flips, " << equivalent << "/1000;";
    }
    o.detail << " single logic-bit flips all break equivalence; random keys equivalent:" << info.str();
    return o;
}

// 9. parse(emit(p)) == p.
Outcome criterion_9() {
    Outcome o;
    int n = 0;
    for (const auto& b : bundled_benchmarks()) {
        const auto p = qasm::parse(testing_support::read_text(default_benchmark_dir() + "/" + b.file));
        o.require(qasm::parse(qasm::emit(p)) == p, b.name);
        ++n;
    }
    for (uint64_t s = 0; s < 500; ++s) {
        const auto c = testing_support::random_circuit(1 + static_cast<int>(s % 6), 1 + static_cast<int>(s % 50),
                                                       derive_seed(0xacce55, 900 + s));
        const auto p = qasm::from_circuit(c);
        o.require(qasm::parse(qasm::emit(p)) == p, "random circuit " + std::to_string(s));
        ++n;
    }
    o.detail << " " << n << " programs round-trip with bit-identical angles";
    return o;
}

// 10. Every CLI command is byte-deterministic.
Outcome criterion_10() {
    Outcome o;
    const fs::path dir = testing_support::scratch_dir("acceptance");
    const std::string cli = QLOCK_CLI_PATH;
    const std::string adder = default_benchmark_dir() + "/adder.qasm";
    auto run_pair = [&](const std::string& name, const std::function<std::string(const std::string&)>& args,
                        const std::vector<std::string>& outputs) {
        for (const char* tag : {"a", "b"}) {
            const fs::path sub = dir / name / tag;
            fs::create_directories(sub);
            const int rc = testing_support::run_command(cli + " " + args(sub.string()) + " > " +
                                                        (sub / "stdout.txt").string() + " 2>/dev/null");
            o.require(rc == 0, name + " exited with " + std::to_string(rc));
        }
        std::vector<std::string> files = outputs;
        files.push_back("stdout.txt");
        for (const auto& f : files) {
            const auto a = testing_support::read_text(dir / name / "a" / f);
            const auto b = testing_support::read_text(dir / name / "b" / f);
            o.require(!a.empty() || f == "stdout.txt", name + " produced no " + f);
            o.require(a == b, name + " output " + f + " differs");
        }
    };
    // shared inputs for the downstream commands
    const fs::path base = dir / "base";
    fs::create_directories(base);
    testing_support::run_command(cli + " obfuscate " + adder + " -o " + (base / "l.qasm").string() + " -k " +
                                 (base / "k.json").string() + " --seed 5 > /dev/null");
    const std::string locked = (base / "l.qasm").string(), key = (base / "k.json").string();

    run_pair("obfuscate", [&](const std::string& d) {
        return "obfuscate " + adder + " -o " + d + "/l.qasm -k " + d + "/k.json --seed 5 --strategy random --dummy random";
    }, {"l.qasm", "k.json"});
    run_pair("deobfuscate", [&](const std::string& d) {
        return "deobfuscate " + locked + " " + key + " -o " + d + "/r.qasm";
    }, {"r.qasm"});
    run_pair("simulate", [&](const std::string& d) {
        return "simulate " + locked + " -o " + d + "/c.json --seed 9 --noise --shots 300";
    }, {"c.json"});
    run_pair("evaluate", [&](const std::string& d) {
        return "evaluate " + adder + " " + locked + " " + key + " --json " + d + "/e.json --csv " + d +
               "/e.csv --seed 3 --noise --wrong-key-sweep 10";
    }, {"e.json", "e.csv"});
    run_pair("stats", [&](const std::string& d) { return "stats " + locked + " -o " + d + "/s.json"; }, {"s.json"});
    run_pair("equiv", [&](const std::string&) { return "equiv " + adder + " " + adder; }, {});
    run_pair("repro", [&](const std::string& d) { return "repro -o " + d + " --seed 11 --inputs 4"; },
             {"repro.json", "repro.csv", "adder.locked.qasm", "adder.key.json", "wstate.key.json"});
    fs::remove_all(dir);
    o.detail << " obfuscate, deobfuscate, simulate, evaluate, stats, equiv and repro run twice; outputs identical";
    return o;
}

}  // namespace

int main() {
    const auto benches = load_all();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"correct-key restoration", [&] { return criterion_1(benches); }},
        {"restored TVD", [&] { return criterion_2(benches); }},
        {"locked-circuit corruption", [&] { return criterion_3(benches); }},
        {"key accounting", [&] { return criterion_4(benches); }},
        {"TVD unit correctness", [] { return criterion_5(); }},
        {"toggle-count law", [&] { return criterion_6(benches); }},
        {"kappa round trip", [] { return criterion_7(); }},
        {"wrong-key sensitivity", [&] { return criterion_8(benches); }},
        {"parser round trip", [] { return criterion_9(); }},
        {"CLI determinism", [] { return criterion_10(); }},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("criterion %2zu %s  %s:%s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
