#include "qlock/qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace qlock::qasm {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

namespace {

enum class Tok { Ident, Number, String, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 0;
    int column = 0;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    t.text += advance();
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && next_is_digit())) {
                t.kind = Tok::Number;
                lex_number(t.text);
            } else if (c == '"') {
                t.kind = Tok::String;
                advance();
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') t.text += advance();
                if (pos_ >= src_.size() || src_[pos_] != '"') throw ParseError(t.line, t.column, "unterminated string");
                advance();
            } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                t.kind = Tok::Symbol;
                t.text = "->";
                advance();
                advance();
            } else if (std::string_view(";,[](){}+-*/^=<>").find(c) != std::string_view::npos) {
                t.kind = Tok::Symbol;
                t.text = std::string(1, advance());
            } else {
                throw ParseError(t.line, t.column, std::string("unexpected character '") + c + "'");
            }
            out.push_back(std::move(t));
        }
    }

  private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    bool next_is_digit() const {
        return pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
    }

    void lex_number(std::string& text) {
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) text += advance();
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            text += advance();
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                while (pos_ < look) text += advance();
                digits();
            }
        }
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                const int l = line_, col = col_;
                advance();
                advance();
                while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
                if (pos_ + 1 >= src_.size()) throw ParseError(l, col, "unterminated block comment");
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Source-level names accepted in gate statements, mapped to their arity.
struct SourceGate {
    int arity;
    int params;
};

const std::map<std::string, SourceGate, std::less<>>& source_gates() {
    static const std::map<std::string, SourceGate, std::less<>> table = [] {
        std::map<std::string, SourceGate, std::less<>> t;
        for (int k = 0; k <= static_cast<int>(GateKind::CCX); ++k) {
            const auto kind = static_cast<GateKind>(k);
            t.emplace(std::string(gate_name(kind)), SourceGate{gate_arity(kind), gate_param_count(kind)});
        }
        t.emplace("sdg", SourceGate{1, 0});
        t.emplace("tdg", SourceGate{1, 0});
        return t;
    }();
    return table;
}

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    QasmProgram run() {
        QasmProgram prog;
        // The version header is optional; a bare statement list reads as 2.0.
        if (peek().kind == Tok::Ident && peek().text == "OPENQASM") {
            ++pos_;
            const Token& v = peek();
            if (v.kind != Tok::Number) fail(v, "expected version number after OPENQASM");
            if (v.text != "2.0") fail(v, "unsupported OpenQASM version '" + v.text + "' (only 2.0)");
            prog.version = next().text;
            expect_symbol(";");
        }

        while (peek().kind != Tok::End) statement(prog);
        return prog;
    }

  private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.column, msg); }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }

    void expect_symbol(std::string_view s) {
        const Token& t = peek();
        if (t.kind != Tok::Symbol || t.text != s) fail(t, "expected '" + std::string(s) + "', found " + describe(t));
        ++pos_;
    }

    bool accept_symbol(std::string_view s) {
        if (peek().kind == Tok::Symbol && peek().text == s) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string ident(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail(t, std::string("expected ") + what + ", found " + describe(t));
        return next().text;
    }

    int integer() {
        const Token& t = peek();
        if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
            fail(t, "expected non-negative integer, found " + describe(t));
        }
        ++pos_;
        try {
            return std::stoi(t.text);
        } catch (const std::exception&) {
            fail(t, "integer out of range");
        }
    }

    void statement(QasmProgram& prog) {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail(t, "expected statement, found " + describe(t));
        const std::string& word = t.text;

        if (word == "include") {
            ++pos_;
            if (peek().kind != Tok::String) fail(peek(), "expected file name after include");
            ++pos_;
            expect_symbol(";");
        } else if (word == "qreg" || word == "creg") {
            ++pos_;
            RegisterDecl decl;
            decl.kind = word == "qreg" ? RegisterKind::Quantum : RegisterKind::Classical;
            const Token& name_tok = peek();
            decl.name = ident("register name");
            if (regs_.count(decl.name)) fail(name_tok, "register '" + decl.name + "' redeclared");
            expect_symbol("[");
            const Token& size_tok = peek();
            decl.size = integer();
            if (decl.size <= 0) fail(size_tok, "register size must be positive");
            expect_symbol("]");
            expect_symbol(";");
            regs_[decl.name] = decl;
            prog.registers.push_back(decl);
        } else if (word == "barrier") {
            ++pos_;
            BarrierStatement b;
            b.operands = operand_list(RegisterKind::Quantum);
            expect_symbol(";");
            prog.statements.emplace_back(std::move(b));
        } else if (word == "measure") {
            ++pos_;
            MeasureStatement m;
            const Token& at = peek();
            m.qubit = operand(RegisterKind::Quantum);
            expect_symbol("->");
            m.clbit = operand(RegisterKind::Classical);
            if (!m.qubit.index.has_value() || !m.clbit.index.has_value()) {
                if (m.qubit.index.has_value() || m.clbit.index.has_value() ||
                    regs_.at(m.qubit.reg).size != regs_.at(m.clbit.reg).size) {
                    fail(at, "measure broadcast requires two whole registers of equal size");
                }
            }
            expect_symbol(";");
            prog.statements.emplace_back(std::move(m));
        } else if (word == "gate" || word == "opaque" || word == "if" || word == "reset") {
            fail(t, "unsupported QASM construct '" + word + "'");
        } else {
            prog.statements.emplace_back(gate_statement());
        }
    }

    GateStatement gate_statement() {
        const Token& name_tok = next();
        GateStatement g;
        g.name = name_tok.text;
        const auto it = source_gates().find(g.name);
        if (it == source_gates().end()) fail(name_tok, "unsupported gate '" + g.name + "'");

        if (accept_symbol("(")) {
            if (!accept_symbol(")")) {
                g.params.push_back(expression());
                while (accept_symbol(",")) g.params.push_back(expression());
                expect_symbol(")");
            }
        }
        if (static_cast<int>(g.params.size()) != it->second.params) {
            fail(name_tok, "gate '" + g.name + "' takes " + std::to_string(it->second.params) + " parameter(s), got " +
                               std::to_string(g.params.size()));
        }
        g.operands = operand_list(RegisterKind::Quantum);
        if (static_cast<int>(g.operands.size()) != it->second.arity) {
            fail(name_tok, "gate '" + g.name + "' takes " + std::to_string(it->second.arity) + " operand(s), got " +
                               std::to_string(g.operands.size()));
        }
        check_broadcast(name_tok, g.operands);
        expect_symbol(";");
        return g;
    }

    void check_broadcast(const Token& at, const std::vector<Operand>& ops) {
        std::optional<int> width;
        for (const auto& op : ops) {
            if (!op.index) {
                const int size = regs_.at(op.reg).size;
                if (width && *width != size) fail(at, "broadcast over registers of different sizes");
                width = size;
            }
        }
        // Distinctness: same register+index twice, or an indexed qubit inside
        // a broadcast register.
        for (size_t i = 0; i < ops.size(); ++i) {
            for (size_t j = 0; j < i; ++j) {
                if (ops[i].reg != ops[j].reg) continue;
                if (!ops[i].index || !ops[j].index || *ops[i].index == *ops[j].index) {
                    fail(at, "repeated qubit operand " + ops[i].reg + (ops[i].index ? "[" + std::to_string(*ops[i].index) + "]" : ""));
                }
            }
        }
    }

    std::vector<Operand> operand_list(RegisterKind kind) {
        std::vector<Operand> ops;
        ops.push_back(operand(kind));
        while (accept_symbol(",")) ops.push_back(operand(kind));
        return ops;
    }

    Operand operand(RegisterKind kind) {
        const Token& at = peek();
        Operand op;
        op.reg = ident("register reference");
        const auto it = regs_.find(op.reg);
        if (it == regs_.end()) fail(at, "undeclared register '" + op.reg + "'");
        if (it->second.kind != kind) {
            fail(at, "register '" + op.reg + "' is " + (kind == RegisterKind::Quantum ? "classical" : "quantum") +
                         " where a " + (kind == RegisterKind::Quantum ? "quantum" : "classical") + " one is required");
        }
        if (accept_symbol("[")) {
            const Token& idx_tok = peek();
            const int idx = integer();
            if (idx >= it->second.size) {
                fail(idx_tok, "index " + std::to_string(idx) + " out of range for register '" + op.reg + "' of size " +
                                  std::to_string(it->second.size));
            }
            op.index = idx;
            expect_symbol("]");
        }
        return op;
    }

    // expr := term (('+'|'-') term)*
    double expression() {
        double v = term();
        while (true) {
            if (accept_symbol("+")) {
                v += term();
            } else if (accept_symbol("-")) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = unary();
        while (true) {
            if (accept_symbol("*")) {
                v *= unary();
            } else if (accept_symbol("/")) {
                v /= unary();
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (accept_symbol("-")) return -unary();
        if (accept_symbol("+")) return unary();
        const double base = primary();
        if (accept_symbol("^")) return std::pow(base, unary());
        return base;
    }

    double primary() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            ++pos_;
            return std::strtod(t.text.c_str(), nullptr);
        }
        if (t.kind == Tok::Ident && t.text == "pi") {
            ++pos_;
            return std::numbers::pi;
        }
        if (accept_symbol("(")) {
            const double v = expression();
            expect_symbol(")");
            return v;
        }
        if (t.kind == Tok::Ident) fail(t, "unsupported identifier '" + t.text + "' in angle expression");
        fail(t, "expected angle expression, found " + describe(t));
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    std::map<std::string, RegisterDecl, std::less<>> regs_;
};

std::string operand_text(const Operand& op) {
    if (!op.index) return op.reg;
    return op.reg + "[" + std::to_string(*op.index) + "]";
}

}  // namespace

std::string format_angle(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

QasmProgram parse(std::string_view source) { return Parser(Lexer(source).run()).run(); }

std::string emit(const QasmProgram& program) {
    std::ostringstream out;
    out << "OPENQASM " << program.version << ";\n";
    out << "include \"qelib1.inc\";\n";
    for (const auto& r : program.registers) {
        out << (r.kind == RegisterKind::Quantum ? "qreg " : "creg ") << r.name << "[" << r.size << "];\n";
    }
    for (const auto& st : program.statements) {
        if (const auto* g = std::get_if<GateStatement>(&st)) {
            out << g->name;
            if (!g->params.empty()) {
                out << "(";
                for (size_t i = 0; i < g->params.size(); ++i) out << (i ? "," : "") << format_angle(g->params[i]);
                out << ")";
            }
            out << " ";
            for (size_t i = 0; i < g->operands.size(); ++i) out << (i ? "," : "") << operand_text(g->operands[i]);
            out << ";\n";
        } else if (const auto* b = std::get_if<BarrierStatement>(&st)) {
            out << "barrier ";
            for (size_t i = 0; i < b->operands.size(); ++i) out << (i ? "," : "") << operand_text(b->operands[i]);
            out << ";\n";
        } else {
            const auto& m = std::get<MeasureStatement>(st);
            out << "measure " << operand_text(m.qubit) << " -> " << operand_text(m.clbit) << ";\n";
        }
    }
    return out.str();
}

Circuit to_circuit(const QasmProgram& program) {
    Circuit c;
    std::map<std::string, std::pair<int, int>, std::less<>> offsets;  // name -> (offset, size)
    for (const auto& r : program.registers) {
        if (r.kind == RegisterKind::Quantum) {
            offsets[r.name] = {c.num_qubits, r.size};
            c.qregs.push_back({r.name, r.size});
            c.num_qubits += r.size;
        } else {
            offsets[r.name] = {c.num_clbits, r.size};
            c.cregs.push_back({r.name, r.size});
            c.num_clbits += r.size;
        }
    }
    auto resolve = [&](const Operand& op, int lane) {
        const auto it = offsets.find(op.reg);
        if (it == offsets.end()) throw SemanticError("undeclared register '" + op.reg + "'");
        const int idx = op.index ? *op.index : lane;
        if (idx < 0 || idx >= it->second.second) throw SemanticError("index out of range for '" + op.reg + "'");
        return it->second.first + idx;
    };
    auto width = [&](const std::vector<Operand>& ops) {
        int w = 1;
        for (const auto& op : ops) {
            if (!op.index) w = offsets.at(op.reg).second;
        }
        return w;
    };

    for (const auto& st : program.statements) {
        if (const auto* g = std::get_if<GateStatement>(&st)) {
            GateKind kind;
            std::vector<double> params = g->params;
            if (g->name == "sdg") {
                kind = GateKind::P;
                params = {-std::numbers::pi / 2};
            } else if (g->name == "tdg") {
                kind = GateKind::P;
                params = {-std::numbers::pi / 4};
            } else {
                const auto k = gate_from_name(g->name);
                if (!k) throw SemanticError("unsupported gate '" + g->name + "'");
                kind = *k;
            }
            const int w = width(g->operands);
            for (int lane = 0; lane < w; ++lane) {
                std::vector<int> qs;
                for (const auto& op : g->operands) qs.push_back(resolve(op, lane));
                c.add(kind, std::move(qs), params);
            }
        } else if (const auto* b = std::get_if<BarrierStatement>(&st)) {
            std::vector<int> qs;
            for (const auto& op : b->operands) {
                if (op.index) {
                    qs.push_back(resolve(op, 0));
                } else {
                    for (int i = 0; i < offsets.at(op.reg).second; ++i) qs.push_back(resolve(op, i));
                }
            }
            c.barrier(std::move(qs));
        } else {
            const auto& m = std::get<MeasureStatement>(st);
            const int w = m.qubit.index ? 1 : offsets.at(m.qubit.reg).second;
            for (int lane = 0; lane < w; ++lane) c.measure(resolve(m.qubit, lane), resolve(m.clbit, lane));
        }
    }
    c.validate();
    return c;
}

QasmProgram from_circuit(const Circuit& circuit) {
    QasmProgram prog;
    std::vector<Operand> qmap, cmap;
    for (const auto& r : circuit.qregs) {
        prog.registers.push_back({r.name, RegisterKind::Quantum, r.size});
        for (int i = 0; i < r.size; ++i) qmap.push_back({r.name, i});
    }
    for (const auto& r : circuit.cregs) {
        prog.registers.push_back({r.name, RegisterKind::Classical, r.size});
        for (int i = 0; i < r.size; ++i) cmap.push_back({r.name, i});
    }
    if (static_cast<int>(qmap.size()) != circuit.num_qubits || static_cast<int>(cmap.size()) != circuit.num_clbits) {
        throw SemanticError("circuit registers do not cover its qubits/clbits");
    }
    for (const auto& op : circuit.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) {
            GateStatement st{std::string(gate_name(g->kind)), g->params, {}};
            for (int q : g->qubits) st.operands.push_back(qmap.at(static_cast<size_t>(q)));
            prog.statements.emplace_back(std::move(st));
        } else if (const auto* b = std::get_if<Barrier>(&op)) {
            BarrierStatement st;
            for (int q : b->qubits) st.operands.push_back(qmap.at(static_cast<size_t>(q)));
            if (!st.operands.empty()) prog.statements.emplace_back(std::move(st));
        } else {
            const auto& m = std::get<Measure>(op);
            prog.statements.emplace_back(
                MeasureStatement{qmap.at(static_cast<size_t>(m.qubit)), cmap.at(static_cast<size_t>(m.clbit))});
        }
    }
    return prog;
}

Circuit load_circuit(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_circuit(ss.str());
}

void save_circuit(const Circuit& circuit, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SemanticError("cannot write '" + path + "'");
    out << emit_circuit(circuit);
}

}  // namespace qlock::qasm
