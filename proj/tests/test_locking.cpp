#include <gtest/gtest.h>

#include <numbers>
#include <set>

#include "qlock/benchmarks.hpp"
#include "qlock/locking.hpp"
#include "support/helpers.hpp"

using namespace qlock;
using namespace qlock::lock;

namespace {

constexpr double kPi = std::numbers::pi;

Site existing(int layer, int qubit) { return {layer, qubit, Occupancy::ExistingGate}; }

/// Every H on the key qubit opens a section holding exactly one gate
/// controlled by it.
void expect_key_sections(const Circuit& locked, int ancilla, size_t expected_sections) {
    size_t sections = 0;
    int open = -1;  // gates seen in the current section, -1 before the first H
    for (const auto& g : locked.gates()) {
        if (std::find(g.qubits.begin(), g.qubits.end(), ancilla) == g.qubits.end()) continue;
        if (g.kind == GateKind::H && g.qubits.size() == 1) {
            EXPECT_NE(open, 0) << "section without a controlled gate";
            open = 0;
            ++sections;
        } else {
            EXPECT_EQ(g.qubits.front(), ancilla);
            EXPECT_EQ(open, 0) << "controlled gate outside a fresh section";
            open = 1;
        }
    }
    EXPECT_NE(open, 0);
    EXPECT_EQ(sections, expected_sections);
}

}  // namespace

TEST(NormalizePhaseAngle, Examples) {
    EXPECT_EQ(normalize_phase_angle(kPi / 4), 1);
    EXPECT_EQ(normalize_phase_angle(-kPi / 2), 6);
    EXPECT_EQ(normalize_phase_angle(0.3), std::nullopt);
    EXPECT_EQ(normalize_phase_angle(2 * kPi), 0);
    EXPECT_EQ(normalize_phase_angle(-kPi / 4 - 1e-12), 7);
    EXPECT_EQ(normalize_phase_angle(kPi / 4 + 1e-7), std::nullopt);
}

TEST(SelectSites, EmptyRequest) {
    const auto plan = select_sites(layerize(Circuit::with_qubits(1).add(GateKind::X, {0})), 0, 0, Strategy::Random, 1);
    EXPECT_TRUE(plan.empty());
}

TEST(SelectSites, OnlyCandidate) {
    const auto plan = select_sites(layerize(Circuit::with_qubits(1).add(GateKind::X, {0})), 1, 0, Strategy::Random, 5);
    ASSERT_EQ(plan.logic_sites.size(), 1u);
    EXPECT_EQ(plan.logic_sites[0], existing(0, 0));
}

TEST(SelectSites, LightConePrefersWideCone) {
    auto c = Circuit::with_qubits(2, 2).add(GateKind::X, {0}).add(GateKind::CX, {0, 1});
    c.measure_all();
    const auto plan = select_sites(layerize(c), 1, 0, Strategy::LightCone, 0);
    ASSERT_EQ(plan.logic_sites.size(), 1u);
    EXPECT_EQ(plan.logic_sites[0], existing(0, 0));
}

TEST(SelectSites, InsufficientSitesThrow) {
    const auto lc = layerize(Circuit::with_qubits(1).add(GateKind::X, {0}));
    EXPECT_THROW(select_sites(lc, 5, 0, Strategy::Random, 0), SemanticError);
}

TEST(SelectSites, DisjointAndKindConsistent) {
    for (const auto& b : bundled_benchmarks()) {
        const auto lc = layerize(load_benchmark(b));
        const auto cand = candidate_sites(lc);
        for (auto strategy : {Strategy::Random, Strategy::LightCone}) {
            const auto plan = select_sites(lc, static_cast<int>(cand.logic.size()), static_cast<int>(cand.phase.size()),
                                           strategy, 3);
            std::set<std::pair<int, int>> seen;
            for (const auto& s : plan.logic_sites) {
                EXPECT_EQ(lc.layers[static_cast<size_t>(s.layer)].kind, LayerKind::NonPhase) << b.name;
                EXPECT_TRUE(seen.insert({s.layer, s.qubit}).second);
            }
            for (const auto& s : plan.phase_sites) {
                EXPECT_EQ(lc.layers[static_cast<size_t>(s.layer)].kind, LayerKind::Phase) << b.name;
                EXPECT_TRUE(seen.insert({s.layer, s.qubit}).second);
            }
        }
    }
}

TEST(Obfuscate, SingleLogicSite) {
    const auto c = Circuit::with_qubits(1).add(GateKind::X, {0});
    ObfuscationPlan plan;
    plan.logic_sites = {existing(0, 0)};
    const auto rec = obfuscate(c, plan, 0);
    ASSERT_EQ(rec.ancilla, 1);
    const auto g = rec.locked_circuit.gates();
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0].kind, GateKind::H);
    EXPECT_EQ(g[0].qubits, std::vector<int>{1});
    EXPECT_EQ(g[1].kind, GateKind::CX);
    EXPECT_EQ(g[1].qubits, (std::vector<int>{1, 0}));
    EXPECT_EQ(rec.key.bit_string(), "1");
    EXPECT_EQ(rec.locked_circuit.qregs.back(), (Register{"qk", 1}));
}

TEST(Obfuscate, SinglePhaseSite) {
    const auto c = Circuit::with_qubits(1).add(GateKind::T, {0});
    ObfuscationPlan plan;
    plan.phase_sites = {existing(0, 0)};
    const auto rec = obfuscate(c, plan, 4);
    EXPECT_FALSE(rec.ancilla.has_value());
    EXPECT_EQ(rec.locked_circuit.num_qubits, 1);
    const auto g = rec.locked_circuit.gates();
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].kind, GateKind::RZ);
    EXPECT_EQ(normalize_phase_angle(g[0].params[0]), std::nullopt);
    EXPECT_EQ(rec.key.bit_string(), "001");
    EXPECT_EQ(rec.key.schedule[0].kappa, 1);
}

TEST(Obfuscate, EmptyPlanLeavesCircuitUnchanged) {
    const auto c = Circuit::with_qubits(2).add(GateKind::H, {0}).add(GateKind::X, {1});
    const auto rec = obfuscate(c, {}, 0);
    EXPECT_EQ(rec.locked_circuit, c);
    EXPECT_TRUE(rec.key.bits.empty());
    for (const auto& b : bundled_benchmarks()) {
        const auto bc = load_benchmark(b);
        EXPECT_EQ(obfuscate(bc, {}, 0).locked_circuit, flatten(layerize(bc))) << b.name;
    }
}

TEST(Obfuscate, DummySlotGetsControlledDummy) {
    const auto c = Circuit::with_qubits(2).add(GateKind::H, {0});
    ObfuscationPlan plan;
    plan.logic_sites = {{0, 1, Occupancy::EmptySlot}};
    const auto rec = obfuscate(c, plan, 0);
    const auto g = rec.locked_circuit.gates();
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[1].kind, GateKind::H);
    EXPECT_EQ(g[2].kind, GateKind::CX);
    EXPECT_EQ(g[2].qubits, (std::vector<int>{2, 1}));
    EXPECT_EQ(g[2].origin, Origin::Dummy);
    EXPECT_EQ(rec.key.bit_string(), "0");
}

TEST(Obfuscate, RejectsMismatchedPlans) {
    const auto c = Circuit::with_qubits(1).add(GateKind::RZ, {0}, {0.3});
    ObfuscationPlan ineligible;
    ineligible.phase_sites = {existing(0, 0)};
    EXPECT_THROW(obfuscate(c, ineligible, 0), SemanticError);
    ObfuscationPlan wrong_layer;
    wrong_layer.logic_sites = {existing(0, 0)};
    EXPECT_THROW(obfuscate(c, wrong_layer, 0), SemanticError);
    ObfuscationPlan missing;
    missing.logic_sites = {existing(7, 0)};
    EXPECT_THROW(obfuscate(c, missing, 0), SemanticError);
}

TEST(Obfuscate, DensePlanAccountingAndSections) {
    for (const auto& b : bundled_benchmarks()) {
        const auto c = load_benchmark(b);
        for (auto dummy : {DummyKind::ControlledX, DummyKind::RandomControlled}) {
            const auto lc = layerize(c);
            const auto plan = dense_plan(lc, Strategy::LightCone, 9);
            const auto rec = obfuscate(c, plan, 9, {dummy});
            EXPECT_EQ(rec.key.bits.size(), plan.logic_sites.size() + 3 * plan.phase_sites.size()) << b.name;
            EXPECT_EQ(rec.key.logic_count(), plan.logic_sites.size());
            EXPECT_EQ(rec.key.phase_count(), plan.phase_sites.size());
            EXPECT_EQ(rec.locked_circuit.num_qubits, c.num_qubits + 1);
            EXPECT_GT(rec.locked_metrics.gate_count, rec.original_metrics.gate_count);
            EXPECT_GE(rec.locked_metrics.depth, rec.original_metrics.depth);
            expect_key_sections(rec.locked_circuit, *rec.ancilla, plan.logic_sites.size());
            for (size_t i = 0; i < rec.key.schedule.size(); ++i) {
                if (rec.key.schedule[i].kind == EntryKind::Logic) {
                    EXPECT_LT(i, rec.key.logic_count());
                }
            }
        }
    }
}

TEST(Obfuscate, LockedAnglesIndependentOfKappa) {
    // Identical seeds give identical locked angles whatever the true angle,
    // and the pooled angles look uniform on [0, 2pi).
    const int trials = 4000;
    std::vector<int> hist(16, 0);
    for (int s = 0; s < trials; ++s) {
        double first = 0;
        for (int kappa = 0; kappa < 8; ++kappa) {
            const auto c = Circuit::with_qubits(1).add(GateKind::RZ, {0}, {kappa * kPi / 4});
            ObfuscationPlan plan;
            plan.phase_sites = {existing(0, 0)};
            const double angle = obfuscate(c, plan, static_cast<uint64_t>(s)).locked_circuit.gates()[0].params[0];
            if (kappa == 0) {
                first = angle;
                ASSERT_GE(angle, 0);
                ASSERT_LT(angle, 2 * kPi);
                ++hist[static_cast<size_t>(angle / (2 * kPi) * 16)];
            } else {
                ASSERT_EQ(angle, first);
            }
        }
    }
    double chi2 = 0;
    const double e = trials / 16.0;
    for (int h : hist) chi2 += (h - e) * (h - e) / e;
    EXPECT_LT(chi2, 37.7);  // chi-square, 15 dof, alpha = 0.001
}

TEST(KeyFile, ExactExport) {
    Key k;
    k.bits = {true};
    k.schedule = {{EntryKind::Logic, 0, 0, 1, 0}};
    EXPECT_EQ(export_key(k), R"({"bits":"1","schedule":[{"kind":"logic","layer":0,"qubit":0,"span":1}]})");
}

TEST(KeyFile, RoundTripRandomKeys) {
    for (uint64_t s = 0; s < 50; ++s) {
        const auto c = testing_support::random_circuit(3, 25, 40 + s);
        const auto lc = layerize(c);
        const auto rec = obfuscate(c, dense_plan(lc, Strategy::Random, s), s);
        EXPECT_EQ(import_key(export_key(rec.key)), rec.key) << "seed " << s;
    }
}

TEST(KeyFile, ImportRejectsMismatch) {
    EXPECT_THROW(import_key(R"({"bits":"10","schedule":[{"kind":"logic","layer":0,"qubit":0,"span":1}]})"),
                 SemanticError);
    EXPECT_THROW(import_key(R"({"bits":"1","schedule":[{"kind":"phase","layer":0,"qubit":0,"span":1}]})"),
                 SemanticError);
    EXPECT_THROW(import_key("not json"), SemanticError);
    EXPECT_THROW(import_key(R"({"bits":"12","schedule":[]})"), SemanticError);
}
