#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "qlock/circuit.hpp"
#include "qlock/rng.hpp"

namespace testing_support {

/// Random measured circuit over the whole alphabet. Angles are arbitrary
/// doubles so emit/parse round trips exercise full precision.
inline qlock::Circuit random_circuit(int num_qubits, int num_gates, uint64_t seed, bool with_barriers = true) {
    using qlock::GateKind;
    static const GateKind kinds[] = {GateKind::X,  GateKind::Y,  GateKind::Z,  GateKind::H,  GateKind::S,
                                     GateKind::T,  GateKind::RZ, GateKind::P,  GateKind::U3, GateKind::CX,
                                     GateKind::CY, GateKind::CZ, GateKind::CH, GateKind::CCX};
    qlock::Rng rng(seed);
    auto c = qlock::Circuit::with_qubits(num_qubits, num_qubits);
    for (int i = 0; i < num_gates; ++i) {
        GateKind kind;
        do {
            kind = kinds[rng.below(std::size(kinds))];
        } while (qlock::gate_arity(kind) > num_qubits);
        std::vector<int> qubits;
        while (static_cast<int>(qubits.size()) < qlock::gate_arity(kind)) {
            const int q = static_cast<int>(rng.below(static_cast<uint64_t>(num_qubits)));
            if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) qubits.push_back(q);
        }
        std::vector<double> params;
        for (int p = 0; p < qlock::gate_param_count(kind); ++p) params.push_back(rng.uniform(-7, 7));
        c.add(kind, qubits, params);
        if (with_barriers && rng.below(8) == 0) {
            const int q = static_cast<int>(rng.below(static_cast<uint64_t>(num_qubits)));
            c.barrier({q});
        }
    }
    for (int q = 0; q < num_qubits; ++q) c.measure(q, q);
    return c;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("qlock_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Runs a shell command, returning its exit status (-1 if it did not exit).
inline int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

}  // namespace testing_support
