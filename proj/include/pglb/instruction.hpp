#ifndef PGLB_INSTRUCTION_HPP_
#define PGLB_INSTRUCTION_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pglb {

// A request "focus.method" to a named service; the service answers with a
// Boolean reply.
struct BasicInstruction {
    std::string focus;
    std::string method;

    std::string str() const { return focus + "." + method; }
    auto operator<=>(const BasicInstruction&) const = default;
};

enum class Kind : std::uint8_t {
    Plain,       // a
    PosTest,     // +a
    NegTest,     // -a
    FwdJump,     // #l
    BwdJump,     // \#l
    RegSet,      // set:i:n
    IndFwdJump,  // i#i
    IndBwdJump,  // i\#i
    Halt,        // !
};

// One primitive instruction. `arg` is the jump distance for direct jumps and
// the register index for register instructions; `value` is only meaningful
// for RegSet.
class Instruction {
public:
    static Instruction plain(BasicInstruction b) { return {Kind::Plain, std::move(b), 0, 0}; }
    static Instruction pos_test(BasicInstruction b) { return {Kind::PosTest, std::move(b), 0, 0}; }
    static Instruction neg_test(BasicInstruction b) { return {Kind::NegTest, std::move(b), 0, 0}; }
    static Instruction fwd_jump(std::uint64_t l) { return {Kind::FwdJump, {}, l, 0}; }
    static Instruction bwd_jump(std::uint64_t l) { return {Kind::BwdJump, {}, l, 0}; }
    static Instruction halt() { return {Kind::Halt, {}, 0, 0}; }

    static Instruction reg_set(std::uint64_t reg, std::uint64_t n) {
        if (reg < 1 || n < 1) throw std::invalid_argument("set:i:n requires i >= 1 and n >= 1");
        return {Kind::RegSet, {}, reg, n};
    }
    static Instruction ind_fwd_jump(std::uint64_t reg) {
        if (reg < 1) throw std::invalid_argument("register index must be >= 1");
        return {Kind::IndFwdJump, {}, reg, 0};
    }
    static Instruction ind_bwd_jump(std::uint64_t reg) {
        if (reg < 1) throw std::invalid_argument("register index must be >= 1");
        return {Kind::IndBwdJump, {}, reg, 0};
    }

    Kind kind() const { return kind_; }
    bool has_basic() const {
        return kind_ == Kind::Plain || kind_ == Kind::PosTest || kind_ == Kind::NegTest;
    }
    bool is_test() const { return kind_ == Kind::PosTest || kind_ == Kind::NegTest; }
    bool is_direct_jump() const { return kind_ == Kind::FwdJump || kind_ == Kind::BwdJump; }
    bool is_indirect_jump() const {
        return kind_ == Kind::IndFwdJump || kind_ == Kind::IndBwdJump;
    }
    bool uses_register() const { return kind_ == Kind::RegSet || is_indirect_jump(); }

    const BasicInstruction& basic() const { return basic_; }
    std::uint64_t distance() const { return arg_; }
    std::uint64_t reg() const { return arg_; }
    std::uint64_t value() const { return value_; }

    bool operator==(const Instruction&) const = default;

private:
    Instruction(Kind k, BasicInstruction b, std::uint64_t arg, std::uint64_t value)
        : kind_(k), basic_(std::move(b)), arg_(arg), value_(value) {}

    Kind kind_;
    BasicInstruction basic_;
    std::uint64_t arg_;
    std::uint64_t value_;
};

// A non-empty instruction sequence. Positions are 1-based throughout.
class Program {
public:
    explicit Program(std::vector<Instruction> instrs) : instrs_(std::move(instrs)) {
        if (instrs_.empty()) throw std::invalid_argument("a program has at least one instruction");
    }

    std::size_t length() const { return instrs_.size(); }
    const Instruction& at(std::size_t pos) const { return instrs_.at(pos - 1); }
    const std::vector<Instruction>& instructions() const { return instrs_; }

    auto begin() const { return instrs_.begin(); }
    auto end() const { return instrs_.end(); }

    bool operator==(const Program&) const = default;

private:
    std::vector<Instruction> instrs_;
};

// The Aux set, given as "focus.method" patterns where the method may be "*".
class AuxSet {
public:
    AuxSet() = default;

    // Accepts "f.m" or "f.*"; throws std::invalid_argument on malformed input.
    void add(const std::string& pattern) {
        const auto dot = pattern.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == pattern.size())
            throw std::invalid_argument("aux pattern must be focus.method or focus.*: " + pattern);
        patterns_.emplace_back(pattern.substr(0, dot), pattern.substr(dot + 1));
    }
    void add_focus(const std::string& focus) { patterns_.emplace_back(focus, "*"); }

    bool contains(const BasicInstruction& b) const {
        for (const auto& [f, m] : patterns_)
            if (f == b.focus && (m == "*" || m == b.method)) return true;
        return false;
    }
    bool empty() const { return patterns_.empty(); }

    std::vector<std::string> patterns() const {
        std::vector<std::string> out;
        for (const auto& [f, m] : patterns_) out.push_back(f + "." + m);
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> patterns_;
};

struct ToolParams {
    std::uint64_t maxr = 1;
    std::uint64_t maxn = 1;
    AuxSet aux;
    std::uint64_t step_limit = 1'000'000;
    std::uint64_t state_limit = 5'000'000;
    // Initial contents of auto-bound bool<digits> cells.
    bool cell_init = false;
    // Whether foci named bool<digits> are served by Boolean cells.
    bool auto_bool_cells = true;
    // Extra foci served by Boolean cells, with their initial contents.
    std::map<std::string, bool> cells;

    void check() const {
        if (maxr < 1 || maxn < 1) throw std::invalid_argument("maxr and maxn must be >= 1");
        if (step_limit < 1 || state_limit < 1) throw std::invalid_argument("limits must be >= 1");
    }
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, std::string token, const std::string& what)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what +
                             (token.empty() ? std::string() : " near '" + token + "'")),
          line_(line), column_(column), token_(std::move(token)) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& token() const { return token_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string token_;
};

// True iff p has no register instructions, i.e. it is a PGLB program.
inline bool is_pglb(const Program& p) {
    for (const auto& u : p)
        if (u.uses_register()) return false;
    return true;
}

}  // namespace pglb

#endif  // PGLB_INSTRUCTION_HPP_
