#include "qlock/benchmarks.hpp"

#include <cstdlib>

#include "qlock/qasm.hpp"

#ifndef QLOCK_BENCHMARK_DIR
#define QLOCK_BENCHMARK_DIR "benchmarks"
#endif

namespace qlock {

const std::vector<Benchmark>& bundled_benchmarks() {
    static const std::vector<Benchmark> list{
        {"Adder", "adder.qasm"},
        {"Basis Change", "basis_change.qasm"},
        {"Fredkin", "fredkin.qasm"},
        {"Wstate", "wstate.qasm"},
    };
    return list;
}

std::string default_benchmark_dir() {
    if (const char* env = std::getenv("QLOCK_BENCHMARK_DIR")) return env;
    return QLOCK_BENCHMARK_DIR;
}

Circuit load_benchmark(const Benchmark& bench, const std::string& dir) {
    return qasm::load_circuit(dir + "/" + bench.file);
}

}  // namespace qlock
