#ifndef PGLB_VM_HPP_
#define PGLB_VM_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "instruction.hpp"
#include "syntax.hpp"
#include "validate.hpp"

namespace pglb {

enum class Status { Running, Terminated, Deadlocked, StepLimit };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::Running: return "Running";
    case Status::Terminated: return "Terminated";
    case Status::Deadlocked: return "Deadlocked";
    case Status::StepLimit: return "StepLimit";
    }
    return "?";
}

class OracleExhausted : public std::runtime_error {
public:
    OracleExhausted() : std::runtime_error("reply oracle exhausted") {}
};

class ServiceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Registers 1..maxr, all initially 0. Zero is never a settable value, so it
// marks a register that was never written.
class RegisterFile {
public:
    RegisterFile() = default;
    explicit RegisterFile(std::size_t maxr) : contents_(maxr, 0) {}

    std::uint64_t get(std::size_t i) const { return contents_.at(i - 1); }
    void set(std::size_t i, std::uint64_t n) { contents_.at(i - 1) = n; }
    std::size_t size() const { return contents_.size(); }
    std::span<const std::uint64_t> values() const { return contents_; }

    bool operator==(const RegisterFile&) const = default;

private:
    std::vector<std::uint64_t> contents_;
};

class BooleanCell {
public:
    explicit BooleanCell(bool init = false) : contents_(init) {}

    // set:T and set:F write and echo the value; get echoes the contents.
    bool process(const std::string& method) {
        if (method == "set:T") return contents_ = true;
        if (method == "set:F") return contents_ = false;
        if (method == "get") return contents_;
        throw ServiceError("Boolean cell does not accept method '" + method + "'");
    }
    bool contents() const { return contents_; }

private:
    bool contents_;
};

// Supplies replies for basic instructions whose focus is not bound to a
// service.
class ReplyOracle {
public:
    enum class Mode { Scripted, Seeded, Exhaustive };

    static ReplyOracle scripted(std::vector<bool> replies) {
        return ReplyOracle(Mode::Scripted, std::move(replies), 0);
    }
    static ReplyOracle seeded(std::uint64_t seed) { return ReplyOracle(Mode::Seeded, {}, seed); }
    // A fixed reply path, used by enumeration drivers: running past its end
    // reports exhaustion so the driver can branch.
    static ReplyOracle exhaustive(std::vector<bool> path) {
        return ReplyOracle(Mode::Exhaustive, std::move(path), 0);
    }

    Mode mode() const { return mode_; }
    std::size_t consumed() const { return next_; }

    bool exhausted() const { return mode_ != Mode::Seeded && next_ >= replies_.size(); }

    bool next() {
        if (mode_ == Mode::Seeded) {
            ++next_;
            return (rng_() >> 63) != 0;
        }
        if (next_ >= replies_.size()) throw OracleExhausted();
        return replies_[next_++];
    }

private:
    ReplyOracle(Mode m, std::vector<bool> replies, std::uint64_t seed)
        : mode_(m), replies_(std::move(replies)), rng_(seed) {}

    Mode mode_;
    std::vector<bool> replies_;
    std::size_t next_ = 0;
    std::mt19937_64 rng_;
};

// One-line-per-reply 'T'/'F' scripts; blank lines and '//' comments ignored.
inline std::vector<bool> parse_oracle_script(const std::string& text) {
    std::vector<bool> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        const auto tok = line.substr(b, e - b + 1);
        if (tok == "T") out.push_back(true);
        else if (tok == "F") out.push_back(false);
        else throw std::invalid_argument("oracle script line " + std::to_string(lineno) +
                                         ": expected T or F, got '" + tok + "'");
    }
    return out;
}

// The control effect of executing the instruction at `pc` given the reply of
// its basic instruction (ignored for other kinds). This is the single source
// of the instruction semantics; the interpreter and the state-space analyzer
// both go through it.
struct Transition {
    Status status = Status::Running;
    std::size_t next_pc = 0;
    // Register write (index, value) performed by set:i:n.
    std::optional<std::pair<std::size_t, std::uint64_t>> write;
};

namespace detail {

inline Transition goto_relative(std::size_t pc, std::size_t length, std::uint64_t l, bool forward) {
    if (l == 0) return {Status::Deadlocked, 0, {}};
    if (forward) {
        if (l > length - pc) return {Status::Deadlocked, 0, {}};
        return {Status::Running, pc + static_cast<std::size_t>(l), {}};
    }
    if (l >= pc) return {Status::Deadlocked, 0, {}};
    return {Status::Running, pc - static_cast<std::size_t>(l), {}};
}

}  // namespace detail

inline Transition transition(const Program& p, std::size_t pc, std::span<const std::uint64_t> regs,
                             bool reply) {
    const auto& u = p.at(pc);
    const auto n = p.length();
    switch (u.kind()) {
    case Kind::Plain: return detail::goto_relative(pc, n, 1, true);
    case Kind::PosTest: return detail::goto_relative(pc, n, reply ? 1 : 2, true);
    case Kind::NegTest: return detail::goto_relative(pc, n, reply ? 2 : 1, true);
    case Kind::FwdJump: return detail::goto_relative(pc, n, u.distance(), true);
    case Kind::BwdJump: return detail::goto_relative(pc, n, u.distance(), false);
    case Kind::RegSet: {
        auto t = detail::goto_relative(pc, n, 1, true);
        t.write = {static_cast<std::size_t>(u.reg()), u.value()};
        return t;
    }
    case Kind::IndFwdJump: return detail::goto_relative(pc, n, regs[u.reg() - 1], true);
    case Kind::IndBwdJump: return detail::goto_relative(pc, n, regs[u.reg() - 1], false);
    case Kind::Halt: return {Status::Terminated, 0, {}};
    }
    return {Status::Deadlocked, 0, {}};
}

inline bool is_auto_cell_focus(const std::string& focus) {
    if (focus.size() <= 4 || focus.compare(0, 4, "bool") != 0) return false;
    for (std::size_t i = 4; i < focus.size(); ++i)
        if (focus[i] < '0' || focus[i] > '9') return false;
    return true;
}

struct MachineConfig {
    std::size_t pc = 1;
    RegisterFile registers;
    std::map<std::string, BooleanCell> services;
    ReplyOracle oracle = ReplyOracle::scripted({});
    Status status = Status::Running;
};

inline MachineConfig initial_config(const Program& p, const ToolParams& params,
                                    ReplyOracle oracle) {
    MachineConfig c;
    c.registers = RegisterFile(static_cast<std::size_t>(params.maxr));
    c.oracle = std::move(oracle);
    for (const auto& [focus, init] : params.cells) c.services.emplace(focus, BooleanCell(init));
    if (params.auto_bool_cells)
        for (const auto& u : p)
            if (u.has_basic() && is_auto_cell_focus(u.basic().focus))
                c.services.emplace(u.basic().focus, BooleanCell(params.cell_init));
    return c;
}

struct TraceEvent {
    std::size_t position;
    Instruction instruction;
    std::optional<bool> reply;

    bool operator==(const TraceEvent&) const = default;
};

// Executes the instruction at c.pc and returns the successor configuration.
// Throws OracleExhausted when an oracle-backed reply is needed but none is left.
inline MachineConfig step(const Program& p, MachineConfig c, TraceEvent* event = nullptr) {
    if (c.status != Status::Running) throw std::logic_error("step on a stopped machine");
    const auto& u = p.at(c.pc);
    std::optional<bool> reply;
    if (u.has_basic()) {
        auto it = c.services.find(u.basic().focus);
        reply = it != c.services.end() ? it->second.process(u.basic().method) : c.oracle.next();
    }
    if (event) *event = {c.pc, u, reply};
    const auto t = transition(p, c.pc, c.registers.values(), reply.value_or(true));
    if (t.write) c.registers.set(t.write->first, t.write->second);
    c.status = t.status;
    c.pc = t.status == Status::Running ? t.next_pc : 0;
    return c;
}

struct Trace {
    std::vector<TraceEvent> events;
    Status final = Status::Running;

    bool operator==(const Trace&) const = default;
};

inline std::string serialize(const Trace& t) {
    std::string out;
    for (const auto& e : t.events) {
        out += std::to_string(e.position) + " " + render(e.instruction);
        if (e.reply) out += *e.reply ? " reply=T" : " reply=F";
        out += '\n';
    }
    out += std::string("status=") + to_string(t.final) + "\n";
    return out;
}

struct Execution {
    Trace trace;
    // Set when a Scripted/Exhaustive oracle ran dry; trace.final is Running.
    bool oracle_exhausted = false;
};

// Like run(), but reports oracle exhaustion in the result instead of throwing.
inline Execution execute(const Program& p, const ToolParams& params, ReplyOracle oracle,
                         std::uint64_t step_limit) {
    require_valid(p, params);
    Execution ex;
    auto c = initial_config(p, params, std::move(oracle));
    while (c.status == Status::Running) {
        if (ex.trace.events.size() >= step_limit) {
            ex.trace.final = Status::StepLimit;
            return ex;
        }
        TraceEvent ev{0, Instruction::halt(), {}};
        try {
            c = step(p, std::move(c), &ev);
        } catch (const OracleExhausted&) {
            ex.oracle_exhausted = true;
            return ex;
        }
        ex.trace.events.push_back(std::move(ev));
    }
    ex.trace.final = c.status;
    return ex;
}

// Runs p from pc=1 with zeroed registers until it stops or params.step_limit
// events have been emitted.
inline Trace run(const Program& p, const ToolParams& params, ReplyOracle oracle) {
    auto ex = execute(p, params, std::move(oracle), params.step_limit);
    if (ex.oracle_exhausted) throw OracleExhausted();
    return std::move(ex.trace);
}

struct ObservableEvent {
    BasicInstruction basic;
    bool reply;

    bool operator==(const ObservableEvent&) const = default;
};

struct ObservableTrace {
    std::vector<ObservableEvent> events;
    Status final = Status::Running;

    bool operator==(const ObservableTrace&) const = default;
};

inline ObservableTrace observable_trace(const Trace& t, const ToolParams& params) {
    ObservableTrace out;
    out.final = t.final;
    for (const auto& e : t.events)
        if (e.instruction.has_basic() && !params.aux.contains(e.instruction.basic()))
            out.events.push_back({e.instruction.basic(), e.reply.value_or(false)});
    return out;
}

inline std::string serialize(const ObservableTrace& t) {
    std::string out;
    for (const auto& e : t.events) out += e.basic.str() + (e.reply ? " T\n" : " F\n");
    out += std::string("status=") + to_string(t.final) + "\n";
    return out;
}

}  // namespace pglb

#endif  // PGLB_VM_HPP_
