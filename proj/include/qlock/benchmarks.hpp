#pragma once

#include <string>
#include <vector>

#include "qlock/circuit.hpp"

namespace qlock {

struct Benchmark {
    std::string name;  // display name used in reports
    std::string file;  // file name inside the benchmark directory
};

/// Adder, Basis Change, Fredkin and Wstate, in report order.
const std::vector<Benchmark>& bundled_benchmarks();

/// Directory holding the bundled .qasm files: $QLOCK_BENCHMARK_DIR if set,
/// otherwise the source-tree path baked in at build time.
std::string default_benchmark_dir();

Circuit load_benchmark(const Benchmark& bench, const std::string& dir = default_benchmark_dir());

}  // namespace qlock
