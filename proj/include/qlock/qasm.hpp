#pragma once

// OpenQASM 2.0 subset: register declarations, the qlock gate alphabet plus
// sdg/tdg, barrier and measure. Everything else is rejected with a
// line/column diagnostic.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qlock/circuit.hpp"

namespace qlock::qasm {

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, int column, const std::string& message);

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

  private:
    int line_;
    int column_;
    std::string message_;
};

enum class RegisterKind { Quantum, Classical };

struct RegisterDecl {
    std::string name;
    RegisterKind kind = RegisterKind::Quantum;
    int size = 0;
    bool operator==(const RegisterDecl&) const = default;
};

/// `q[3]`, or `q` for the whole register.
struct Operand {
    std::string reg;
    std::optional<int> index;
    bool operator==(const Operand&) const = default;
};

struct GateStatement {
    std::string name;
    std::vector<double> params;
    std::vector<Operand> operands;
    bool operator==(const GateStatement&) const = default;
};

struct BarrierStatement {
    std::vector<Operand> operands;
    bool operator==(const BarrierStatement&) const = default;
};

struct MeasureStatement {
    Operand qubit;
    Operand clbit;
    bool operator==(const MeasureStatement&) const = default;
};

using Statement = std::variant<GateStatement, BarrierStatement, MeasureStatement>;

struct QasmProgram {
    std::string version = "2.0";
    std::vector<RegisterDecl> registers;
    std::vector<Statement> statements;
    bool operator==(const QasmProgram&) const = default;
};

QasmProgram parse(std::string_view source);

/// Canonical layout: header, declarations, one statement per line, angles
/// printed with 17 significant digits so they survive a reparse bit-exactly.
std::string emit(const QasmProgram& program);

/// Expands register broadcasts into flat indices; sdg/tdg become p(-pi/2) and
/// p(-pi/4).
Circuit to_circuit(const QasmProgram& program);
QasmProgram from_circuit(const Circuit& circuit);

inline Circuit parse_circuit(std::string_view source) { return to_circuit(parse(source)); }
inline std::string emit_circuit(const Circuit& circuit) { return emit(from_circuit(circuit)); }

/// Reads and parses a file; I/O failures surface as ParseError at 0:0.
Circuit load_circuit(const std::string& path);
void save_circuit(const Circuit& circuit, const std::string& path);

/// `%.17g` formatting used for every emitted angle.
std::string format_angle(double value);

}  // namespace qlock::qasm
