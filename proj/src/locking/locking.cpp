#include "qlock/locking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "json.hpp"
#include "qlock/rng.hpp"

namespace qlock::lock {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;
constexpr double kTwoPi = 2 * std::numbers::pi;

int min_qubit(const Gate& g) { return *std::min_element(g.qubits.begin(), g.qubits.end()); }

bool site_less(const Site& a, const Site& b) {
    return a.layer != b.layer ? a.layer < b.layer : a.qubit < b.qubit;
}

bool is_logic_eligible(const Gate& g) { return !is_phase_kind(g.kind) && controlled_form(g.kind).has_value(); }

bool is_phase_eligible(const Gate& g) {
    return is_phase_kind(g.kind) && normalize_phase_angle(phase_angle(g.kind, g.params)).has_value();
}

double random_locked_angle(Rng& rng) {
    while (true) {
        const double a = rng.uniform(0, kTwoPi);
        const double nearest = std::round(a / kQuarterPi) * kQuarterPi;
        if (std::abs(a - nearest) >= 1e-6) return a;
    }
}

void shuffle(std::vector<Site>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::vector<Site> take_top(std::vector<Site> candidates, int n, Strategy strategy, const LightConeRank& rank,
                           Rng& rng, const char* what) {
    if (n < 0) throw SemanticError(std::string("negative ") + what + " site count");
    if (static_cast<size_t>(n) > candidates.size()) {
        throw SemanticError(std::string("requested ") + std::to_string(n) + " " + what + " sites but only " +
                            std::to_string(candidates.size()) + " are available");
    }
    if (strategy == Strategy::Random) {
        shuffle(candidates, rng);
    } else {
        std::stable_sort(candidates.begin(), candidates.end(), [&](const Site& a, const Site& b) {
            const int sa = rank.at(static_cast<size_t>(a.layer), a.qubit);
            const int sb = rank.at(static_cast<size_t>(b.layer), b.qubit);
            if (sa != sb) return sa > sb;
            return site_less(a, b);
        });
    }
    candidates.resize(static_cast<size_t>(n));
    std::sort(candidates.begin(), candidates.end(), site_less);
    return candidates;
}

void check_plan(const LayeredCircuit& layered, const ObfuscationPlan& plan) {
    const int n = layered.header.num_qubits;
    std::set<std::pair<int, int>> seen;
    auto check = [&](const Site& s, LayerKind want, const char* what) {
        if (s.layer < 0 || static_cast<size_t>(s.layer) >= layered.layers.size() || s.qubit < 0 || s.qubit >= n) {
            throw SemanticError(std::string(what) + " site (" + std::to_string(s.layer) + ", " +
                                std::to_string(s.qubit) + ") is outside the circuit");
        }
        const Layer& layer = layered.layers[static_cast<size_t>(s.layer)];
        if (layer.kind != want) {
            throw SemanticError(std::string(what) + " site in layer " + std::to_string(s.layer) + " of the wrong kind");
        }
        if (!seen.insert({s.layer, s.qubit}).second) throw SemanticError("duplicate obfuscation site");
        const auto idx = layer.gate_on(s.qubit);
        if (s.occupancy == Occupancy::EmptySlot) {
            if (idx) throw SemanticError("empty-slot site is occupied by a gate");
            return;
        }
        if (!idx) throw SemanticError("existing-gate site has no gate");
        const Gate& g = layer.gates[*idx];
        if (min_qubit(g) != s.qubit) throw SemanticError("existing-gate site must name the gate's lowest qubit");
        if (want == LayerKind::NonPhase && !is_logic_eligible(g)) {
            throw SemanticError("gate '" + std::string(gate_name(g.kind)) + "' has no controlled form");
        }
        if (want == LayerKind::Phase && !is_phase_eligible(g)) {
            throw SemanticError("phase angle at site (" + std::to_string(s.layer) + ", " + std::to_string(s.qubit) +
                                ") is not a multiple of pi/4");
        }
    };
    for (const auto& s : plan.logic_sites) check(s, LayerKind::NonPhase, "logic");
    for (const auto& s : plan.phase_sites) check(s, LayerKind::Phase, "phase");
}

}  // namespace

std::string bits_to_string(const KeyBits& bits) {
    std::string s;
    s.reserve(bits.size());
    for (bool b : bits) s.push_back(b ? '1' : '0');
    return s;
}

KeyBits bits_from_string(const std::string& text) {
    KeyBits bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw SemanticError("key bits must be '0' or '1', found '" + std::string(1, c) + "'");
        bits.push_back(c == '1');
    }
    return bits;
}

std::string Key::bit_string() const { return bits_to_string(bits); }

size_t Key::logic_count() const {
    return static_cast<size_t>(std::count_if(schedule.begin(), schedule.end(),
                                             [](const KeyEntry& e) { return e.kind == EntryKind::Logic; }));
}

size_t Key::phase_count() const { return schedule.size() - logic_count(); }

KeyBits Key::logic_bits(const KeyBits& candidate) const {
    KeyBits out;
    size_t offset = 0;
    for (const auto& e : schedule) {
        if (e.kind == EntryKind::Logic) out.push_back(candidate.at(offset));
        offset += static_cast<size_t>(e.span);
    }
    return out;
}

std::optional<int> normalize_phase_angle(double alpha) {
    if (!std::isfinite(alpha)) return std::nullopt;
    double r = std::fmod(alpha, kTwoPi);
    if (r < 0) r += kTwoPi;
    const double k = std::round(r / kQuarterPi);
    if (std::abs(r - k * kQuarterPi) > 1e-9) return std::nullopt;
    return static_cast<int>(k) % 8;
}

Candidates candidate_sites(const LayeredCircuit& layered) {
    Candidates c;
    const int n = layered.header.num_qubits;
    for (size_t l = 0; l < layered.layers.size(); ++l) {
        const Layer& layer = layered.layers[l];
        const bool phase = layer.kind == LayerKind::Phase;
        auto& out = phase ? c.phase : c.logic;
        for (int q = 0; q < n; ++q) {
            const auto idx = layer.gate_on(q);
            if (!idx) {
                out.push_back({static_cast<int>(l), q, Occupancy::EmptySlot});
                continue;
            }
            const Gate& g = layer.gates[*idx];
            if (min_qubit(g) != q) continue;
            if (phase ? is_phase_eligible(g) : is_logic_eligible(g)) {
                out.push_back({static_cast<int>(l), q, Occupancy::ExistingGate});
            }
        }
    }
    return c;
}

ObfuscationPlan select_sites(const LayeredCircuit& layered, int n_logic, int n_phase, Strategy strategy,
                             uint64_t seed) {
    const Candidates c = candidate_sites(layered);
    const LightConeRank rank = light_cone_rank(layered);
    ObfuscationPlan plan;
    plan.seed = seed;
    Rng logic_rng(derive_seed(seed, 1));
    Rng phase_rng(derive_seed(seed, 2));
    plan.logic_sites = take_top(c.logic, n_logic, strategy, rank, logic_rng, "logic");
    plan.phase_sites = take_top(c.phase, n_phase, strategy, rank, phase_rng, "phase");
    return plan;
}

ObfuscationPlan dense_plan(const LayeredCircuit& layered, Strategy strategy, uint64_t seed) {
    const Candidates c = candidate_sites(layered);
    const LightConeRank rank = light_cone_rank(layered);
    Rng rng(derive_seed(seed, 3));
    ObfuscationPlan plan;
    plan.seed = seed;

    auto fill = [&](const std::vector<Site>& candidates, std::vector<Site>& out) {
        for (size_t l = 0; l < layered.layers.size(); ++l) {
            std::vector<Site> slots;
            for (const auto& s : candidates) {
                if (static_cast<size_t>(s.layer) != l) continue;
                if (s.occupancy == Occupancy::ExistingGate) {
                    out.push_back(s);
                } else {
                    slots.push_back(s);
                }
            }
            if (slots.empty()) continue;
            if (strategy == Strategy::Random) {
                out.push_back(slots[rng.below(slots.size())]);
            } else {
                out.push_back(*std::max_element(slots.begin(), slots.end(), [&](const Site& a, const Site& b) {
                    return rank.at(l, a.qubit) < rank.at(l, b.qubit);
                }));
            }
        }
        std::sort(out.begin(), out.end(), site_less);
    };
    fill(c.logic, plan.logic_sites);
    fill(c.phase, plan.phase_sites);
    return plan;
}

ObfuscationRecord obfuscate(const Circuit& circuit, const ObfuscationPlan& plan, uint64_t seed,
                            const LockOptions& options) {
    circuit.validate();
    const LayeredCircuit layered = layerize(circuit);

    ObfuscationRecord rec;
    rec.plan = plan;
    std::sort(rec.plan.logic_sites.begin(), rec.plan.logic_sites.end(), site_less);
    std::sort(rec.plan.phase_sites.begin(), rec.plan.phase_sites.end(), site_less);
    check_plan(layered, rec.plan);

    Circuit locked = layered.header;
    locked.ops.clear();
    if (!rec.plan.logic_sites.empty()) {
        rec.ancilla = locked.num_qubits;
        std::string name = "qk";
        while (std::any_of(locked.qregs.begin(), locked.qregs.end(), [&](const Register& r) { return r.name == name; })) {
            name += "_";
        }
        locked.qregs.push_back({name, 1});
        ++locked.num_qubits;
    }
    std::vector<int> all(static_cast<size_t>(locked.num_qubits));
    for (int q = 0; q < locked.num_qubits; ++q) all[static_cast<size_t>(q)] = q;

    // Logic and phase keys draw from separate streams so that one plan's
    // angles do not depend on the other's dummy choices.
    Rng angle_rng(derive_seed(seed, 11));
    Rng dummy_rng(derive_seed(seed, 12));

    for (const auto& s : rec.plan.logic_sites) {
        rec.key.bits.push_back(s.occupancy == Occupancy::ExistingGate);
        rec.key.schedule.push_back({EntryKind::Logic, s.layer, s.qubit, 1, 0});
    }

    std::vector<std::pair<Site, int>> phase_kappa;
    for (const auto& s : rec.plan.phase_sites) {
        int kappa = 0;
        if (s.occupancy == Occupancy::ExistingGate) {
            const Layer& layer = layered.layers[static_cast<size_t>(s.layer)];
            const Gate& g = layer.gates[*layer.gate_on(s.qubit)];
            kappa = *normalize_phase_angle(phase_angle(g.kind, g.params));
        }
        for (int b = 2; b >= 0; --b) rec.key.bits.push_back(((kappa >> b) & 1) != 0);
        rec.key.schedule.push_back({EntryKind::Phase, s.layer, s.qubit, 3, kappa});
    }

    auto find_site = [](const std::vector<Site>& sites, int layer, int qubit) -> const Site* {
        for (const auto& s : sites) {
            if (s.layer == layer && s.qubit == qubit) return &s;
        }
        return nullptr;
    };

    const int ancilla = rec.ancilla.value_or(-1);
    for (size_t l = 0; l < layered.layers.size(); ++l) {
        if (l > 0) locked.barrier(all);
        const Layer& layer = layered.layers[l];
        const int li = static_cast<int>(l);
        for (int q = 0; q < circuit.num_qubits; ++q) {
            const auto idx = layer.gate_on(q);
            const Gate* g = idx ? &layer.gates[*idx] : nullptr;
            if (g && min_qubit(*g) != q) continue;

            if (const Site* s = find_site(rec.plan.logic_sites, li, q)) {
                locked.add(Gate{GateKind::H, {}, {ancilla}, Origin::Inserted});
                if (s->occupancy == Occupancy::ExistingGate) {
                    std::vector<int> qs{ancilla};
                    qs.insert(qs.end(), g->qubits.begin(), g->qubits.end());
                    locked.add(Gate{*controlled_form(g->kind), g->params, std::move(qs), Origin::Converted});
                } else {
                    GateKind kind = GateKind::CX;
                    if (options.dummy == DummyKind::RandomControlled) {
                        static constexpr GateKind kChoices[] = {GateKind::CX, GateKind::CY, GateKind::CZ, GateKind::CH};
                        kind = kChoices[dummy_rng.below(4)];
                    }
                    locked.add(Gate{kind, {}, {ancilla, q}, Origin::Dummy});
                }
            } else if (const Site* s = find_site(rec.plan.phase_sites, li, q)) {
                const Origin origin = s->occupancy == Occupancy::ExistingGate ? Origin::Converted : Origin::Dummy;
                locked.add(Gate{GateKind::RZ, {random_locked_angle(angle_rng)}, {q}, origin});
            } else if (g) {
                locked.add(*g);
            }
        }
    }
    for (const auto& m : layered.measures) locked.ops.emplace_back(m);

    rec.original_metrics = metrics(circuit);
    rec.locked_metrics = metrics(locked);
    rec.locked_circuit = std::move(locked);
    return rec;
}

std::string export_key(const Key& key) {
    nlohmann::json j;
    j["bits"] = key.bit_string();
    j["schedule"] = nlohmann::json::array();
    for (const auto& e : key.schedule) {
        j["schedule"].push_back({{"kind", e.kind == EntryKind::Logic ? "logic" : "phase"},
                                 {"layer", e.layer},
                                 {"qubit", e.qubit},
                                 {"span", e.span}});
    }
    return j.dump();
}

Key import_key(const std::string& text) {
    Key key;
    try {
        const auto j = nlohmann::json::parse(text);
        key.bits = bits_from_string(j.at("bits").get<std::string>());
        size_t offset = 0;
        for (const auto& item : j.at("schedule")) {
            KeyEntry e;
            const auto kind = item.at("kind").get<std::string>();
            if (kind == "logic") {
                e.kind = EntryKind::Logic;
            } else if (kind == "phase") {
                e.kind = EntryKind::Phase;
            } else {
                throw SemanticError("unknown key entry kind '" + kind + "'");
            }
            e.layer = item.at("layer").get<int>();
            e.qubit = item.at("qubit").get<int>();
            e.span = item.at("span").get<int>();
            if (e.span != (e.kind == EntryKind::Logic ? 1 : 3)) throw SemanticError("key entry span does not match kind");
            if (e.layer < 0 || e.qubit < 0) throw SemanticError("negative site coordinate in key");
            if (offset + static_cast<size_t>(e.span) <= key.bits.size() && e.kind == EntryKind::Phase) {
                e.kappa = (key.bits[offset] << 2) | (key.bits[offset + 1] << 1) | static_cast<int>(key.bits[offset + 2]);
            }
            offset += static_cast<size_t>(e.span);
            key.schedule.push_back(e);
        }
        if (offset != key.bits.size()) {
            throw SemanticError("key has " + std::to_string(key.bits.size()) + " bits but its schedule spans " +
                                std::to_string(offset));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SemanticError(std::string("malformed key file: ") + e.what());
    }
    return key;
}

}  // namespace qlock::lock
