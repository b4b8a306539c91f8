#ifndef PGLB_PROJECTOR_HPP_
#define PGLB_PROJECTOR_HPP_

#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "analyzer.hpp"
#include "instruction.hpp"
#include "syntax.hpp"
#include "validate.hpp"
#include "vm.hpp"

namespace pglb {

// Where each source unit (an old position, or a reachable state for
// specialization) ended up in the projected program.
struct RelocationMap {
    struct Entry {
        std::string key;
        std::size_t start;
        std::size_t length;
    };
    std::vector<Entry> entries;

    std::string to_csv() const {
        std::string out = "old_key,new_start,new_len\n";
        for (const auto& e : entries)
            out += e.key + "," + std::to_string(e.start) + "," + std::to_string(e.length) + "\n";
        return out;
    }
};

struct ProjectionReport {
    std::string mode;
    Program output;
    RelocationMap map;
    std::size_t length_before = 0;
    std::size_t length_after = 0;
    MidResult mid_before;
    MidResult mid_after;
    std::set<BasicInstruction> aux_introduced;
    // Parameters under which `output` is run and analyzed.
    ToolParams output_params;

    std::string key_values() const {
        std::string aux;
        for (const auto& b : aux_introduced) aux += (aux.empty() ? "" : ",") + b.str();
        return "mode=" + mode + "\nlength_before=" + std::to_string(length_before) +
               "\nlength_after=" + std::to_string(length_after) + "\nmid_before=" +
               mid_before.str() + "\nmid_after=" + mid_after.str() + "\naux_introduced=" + aux +
               "\n";
    }

    std::string summary() const {
        std::string s = "projection (" + mode + "): " + std::to_string(length_before) + " -> " +
                        std::to_string(length_after) + " instructions, MID " + mid_before.str() +
                        " -> " + mid_after.str() + "\n";
        if (!aux_introduced.empty())
            s += "auxiliary instructions introduced: " + std::to_string(aux_introduced.size()) + "\n";
        return s + "\n" + key_values();
    }
};

namespace detail {

// A direct jump from `from` to `to` (1-based output positions).
inline Instruction jump_between(std::size_t from, std::size_t to) {
    if (to > from) return Instruction::fwd_jump(to - from);
    if (to < from) return Instruction::bwd_jump(from - to);
    throw std::logic_error("jump to itself");
}

}  // namespace detail

// Eliminates register instructions by specializing the program on its
// reachable register states. Every reachable state becomes one block:
//   plain     a ; #next
//   test      +a/-a ; #proceed ; #skip
//   halt      !
//   others    #next      (a resolved jump; "#0" where the source deadlocks)
inline ProjectionReport specialize(const Program& p, const ToolParams& params) {
    const auto g = build_state_graph(p, params);
    constexpr auto kDead = StateGraph::kDeadlock;

    auto block_len = [&](std::uint32_t v) -> std::size_t {
        const auto& u = p.at(g.node(v).pc);
        if (u.is_test()) return 3;
        if (u.kind() == Kind::Plain) return 2;
        return 1;
    };
    std::vector<std::size_t> start(g.size());
    std::size_t next = 1;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        start[v] = next;
        next += block_len(v);
    }

    std::vector<Instruction> out;
    out.reserve(next - 1);
    auto jump_to = [&](std::uint32_t target) {
        const std::size_t here = out.size() + 1;
        out.push_back(target == kDead ? Instruction::fwd_jump(0)
                                      : detail::jump_between(here, start[target]));
    };
    ProjectionReport rep{"specialize", Program({Instruction::halt()}), {}, p.length(), 0, {}, {}, {},
                         params};
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        const auto& nd = g.node(v);
        const auto& u = p.at(nd.pc);
        if (u.has_basic()) {
            out.push_back(u);
            jump_to(nd.out[0]);
            if (u.is_test()) jump_to(nd.out[1]);
        } else if (u.kind() == Kind::Halt) {
            out.push_back(u);
        } else {
            jump_to(nd.out[0]);
        }
        rep.map.entries.push_back({g.state(v).str(), start[v], block_len(v)});
    }
    rep.output = Program(std::move(out));
    rep.length_after = rep.output.length();
    rep.mid_before = compute_mid(g, params.aux);
    rep.mid_after = compute_mid(rep.output, rep.output_params);
    return rep;
}

// Number of instructions in the decision tree over `bits` register bits.
inline std::size_t dispatch_tree_size(unsigned bits) {
    return bits <= 1 ? 3 : 2 + 2 * dispatch_tree_size(bits - 1);
}

// Bits per register needed for values 0..maxn.
inline unsigned dispatch_bits(std::uint64_t maxn) { return static_cast<unsigned>(std::bit_width(maxn)); }

// Eliminates register instructions by keeping register contents in
// auxiliary Boolean cells <prefix><i>b<j> (bit j of register i). set:i:n
// becomes b cell writes; an indirect jump becomes a binary decision tree
// over the bits, most significant first, whose leaves (ascending by value)
// are direct jumps. A test whose next block is longer than one instruction
// is inverted and followed by a jump to its skip target. Everything else is
// copied and direct jumps re-aimed.
inline ProjectionReport dispatch_project(const Program& p, const ToolParams& params) {
    require_valid(p, params);
    const unsigned bits = dispatch_bits(params.maxn);

    // Pick a cell-name prefix that cannot clash with foci already in use.
    std::set<std::string> foci;
    for (const auto& u : p)
        if (u.has_basic()) foci.insert(u.basic().focus);
    std::string prefix = "r";
    auto clashes = [&](const std::string& pre) {
        for (const auto& f : foci) {
            if (f.compare(0, pre.size(), pre) != 0) continue;
            const auto rest = f.substr(pre.size());
            if (!rest.empty() && rest[0] >= '0' && rest[0] <= '9') return true;
        }
        return false;
    };
    while (clashes(prefix)) prefix += "x";
    auto cell = [&](std::uint64_t reg, unsigned bit) {
        return prefix + std::to_string(reg) + "b" + std::to_string(bit);
    };

    const std::size_t n = p.length();
    std::vector<std::size_t> start(n + 2), len(n + 2, 1);
    for (std::size_t pc = n; pc >= 1; --pc) {
        const auto& u = p.at(pc);
        if (u.kind() == Kind::RegSet) len[pc] = bits;
        else if (u.is_indirect_jump()) len[pc] = dispatch_tree_size(bits);
        else if (u.is_test() && len[pc + 1] != 1) len[pc] = 2;
    }
    std::size_t next = 1;
    for (std::size_t pc = 1; pc <= n; ++pc) {
        start[pc] = next;
        next += len[pc];
    }
    const std::size_t out_len = next - 1;

    std::vector<Instruction> out;
    out.reserve(out_len);
    std::set<std::uint64_t> regs_used;

    // Jump to the block of old position pc±v, or a deadlocking leaf.
    auto leaf = [&](std::size_t pc, std::uint64_t v, bool forward) {
        const std::size_t here = out.size() + 1;
        const bool in_range = v != 0 && v <= params.maxn && (forward ? v <= n - pc : v < pc);
        if (!in_range) {
            out.push_back(Instruction::fwd_jump(0));
            return;
        }
        const auto target = forward ? pc + v : pc - v;
        out.push_back(detail::jump_between(here, start[target]));
    };
    auto tree = [&](auto&& self, std::size_t pc, std::uint64_t reg, unsigned depth,
                    std::uint64_t base, bool forward) -> void {
        const BasicInstruction probe{cell(reg, depth - 1), "get"};
        if (depth == 1) {
            out.push_back(Instruction::neg_test(probe));
            leaf(pc, base, forward);
            leaf(pc, base + 1, forward);
            return;
        }
        out.push_back(Instruction::pos_test(probe));
        out.push_back(Instruction::fwd_jump(dispatch_tree_size(depth - 1) + 1));
        self(self, pc, reg, depth - 1, base, forward);
        self(self, pc, reg, depth - 1, base + (std::uint64_t{1} << (depth - 1)), forward);
    };

    for (std::size_t pc = 1; pc <= n; ++pc) {
        const auto& u = p.at(pc);
        switch (u.kind()) {
        case Kind::RegSet:
            regs_used.insert(u.reg());
            for (unsigned j = bits; j-- > 0;) {
                const bool bit = ((u.value() >> j) & 1) != 0;
                out.push_back(Instruction::plain({cell(u.reg(), j), bit ? "set:T" : "set:F"}));
            }
            break;
        case Kind::IndFwdJump:
        case Kind::IndBwdJump:
            regs_used.insert(u.reg());
            tree(tree, pc, u.reg(), bits, 0, u.kind() == Kind::IndFwdJump);
            break;
        case Kind::FwdJump:
        case Kind::BwdJump: {
            const auto l = u.distance();
            const bool fwd = u.kind() == Kind::FwdJump;
            const std::size_t here = start[pc];
            if (l == 0) {
                out.push_back(u);
            } else if (fwd ? l <= n - pc : l < pc) {
                out.push_back(detail::jump_between(here, start[fwd ? pc + l : pc - l]));
            } else if (fwd) {
                out.push_back(Instruction::fwd_jump(std::max<std::uint64_t>(l, out_len + 1 - here)));
            } else {
                out.push_back(Instruction::bwd_jump(std::max<std::uint64_t>(l, here)));
            }
            break;
        }
        case Kind::PosTest:
        case Kind::NegTest:
            if (len[pc] == 2) {
                // The skip would land inside the next block: invert the test
                // so that it falls through to an explicit jump to the skip target.
                const bool pos = u.kind() == Kind::PosTest;
                out.push_back(pos ? Instruction::neg_test(u.basic()) : Instruction::pos_test(u.basic()));
                const std::size_t here = out.size() + 1;
                out.push_back(pc + 2 <= n ? detail::jump_between(here, start[pc + 2]) : Instruction::fwd_jump(0));
            } else {
                out.push_back(u);
            }
            break;
        default: out.push_back(u); break;
        }
    }

    ProjectionReport rep{"dispatch", Program(std::move(out)), {}, n, out_len, {}, {}, {}, params};
    for (std::size_t pc = 1; pc <= n; ++pc)
        rep.map.entries.push_back({std::to_string(pc), start[pc], len[pc]});
    for (auto r : regs_used) {
        for (unsigned j = 0; j < bits; ++j) {
            const auto f = cell(r, j);
            rep.aux_introduced.insert({f, "get"});
            rep.aux_introduced.insert({f, "set:F"});
            rep.aux_introduced.insert({f, "set:T"});
            rep.output_params.aux.add_focus(f);
            rep.output_params.cells[f] = false;
        }
    }
    rep.mid_before = compute_mid(p, params);
    rep.mid_after = compute_mid(rep.output, rep.output_params);
    return rep;
}

// Retargets every direct jump whose target is another direct jump to the end
// of the chain. Chains ending in a deadlocking jump become "#0"; chains that
// run into a jump cycle are left alone.
inline Program thread_jumps(const Program& p) {
    if (!is_pglb(p)) throw std::invalid_argument("thread_jumps expects a program without register instructions");
    const std::size_t n = p.length();
    constexpr std::size_t kDead = 0;
    auto target = [&](std::size_t pc) -> std::size_t {
        const auto& u = p.at(pc);
        const auto l = u.distance();
        if (l == 0) return kDead;
        if (u.kind() == Kind::FwdJump) return l <= n - pc ? pc + l : kDead;
        return l < pc ? pc - l : kDead;
    };

    std::vector<Instruction> out(p.begin(), p.end());
    for (std::size_t q = 1; q <= n; ++q) {
        if (!p.at(q).is_direct_jump()) continue;
        const auto first = target(q);
        if (first == kDead) continue;
        std::unordered_set<std::size_t> seen{q};
        std::optional<std::size_t> final;
        for (auto cur = first;;) {
            if (!p.at(cur).is_direct_jump()) {
                final = cur;
                break;
            }
            if (!seen.insert(cur).second) break;  // cycle
            const auto t = target(cur);
            if (t == kDead) {
                final = kDead;
                break;
            }
            cur = t;
        }
        if (!final || *final == first) continue;
        out[q - 1] = *final == kDead ? Instruction::fwd_jump(0) : detail::jump_between(q, *final);
    }
    return Program(std::move(out));
}

// Re-runs the output of a specialization through thread_jumps and refreshes
// the measured quantities.
inline ProjectionReport with_threading(ProjectionReport rep) {
    rep.output = thread_jumps(rep.output);
    rep.mid_after = compute_mid(rep.output, rep.output_params);
    rep.mode += "+thread";
    return rep;
}

struct OracleSuite {
    // Every reply sequence up to this many oracle replies; 0 disables the
    // exhaustive part.
    std::size_t exhaustive_depth = 8;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8};
    std::uint64_t step_limit = 10'000;
};

struct Counterexample {
    std::string oracle;
    ObservableTrace left;
    ObservableTrace right;
};

struct Verdict {
    bool equivalent = true;
    std::size_t oracles = 0;
    // Oracles for which either run hit the step limit or needed more replies
    // than the exhaustive depth.
    std::size_t inconclusive = 0;
    std::optional<Counterexample> counterexample;

    std::string str() const {
        std::string s = equivalent ? "Equivalent" : "NotEquivalent";
        s += " (oracles=" + std::to_string(oracles) +
             ", inconclusive=" + std::to_string(inconclusive) + ")\n";
        if (counterexample) {
            s += "counterexample oracle: " + counterexample->oracle + "\nleft:\n" +
                 serialize(counterexample->left) + "right:\n" + serialize(counterexample->right);
        }
        return s;
    }
};

inline Verdict check_equivalence(const Program& p, const ToolParams& pp, const Program& q,
                                 const ToolParams& qp, const OracleSuite& suite) {
    require_valid(p, pp);
    require_valid(q, qp);
    Verdict v;
    auto describe = [](const std::vector<bool>& path) {
        std::string s = "exhaustive:";
        for (bool b : path) s += b ? 'T' : 'F';
        return s;
    };
    auto compare = [&](const Trace& a, const Trace& b, const std::string& name) {
        if (a.final == Status::StepLimit || b.final == Status::StepLimit) {
            ++v.inconclusive;
            return true;
        }
        auto oa = observable_trace(a, pp), ob = observable_trace(b, qp);
        if (oa == ob) return true;
        v.equivalent = false;
        v.counterexample = Counterexample{name, std::move(oa), std::move(ob)};
        return false;
    };

    std::vector<std::vector<bool>> stack;
    if (suite.exhaustive_depth > 0) stack.emplace_back();
    while (!stack.empty()) {
        auto path = std::move(stack.back());
        stack.pop_back();
        auto a = execute(p, pp, ReplyOracle::exhaustive(path), suite.step_limit);
        auto b = execute(q, qp, ReplyOracle::exhaustive(path), suite.step_limit);
        if (a.oracle_exhausted || b.oracle_exhausted) {
            if (path.size() >= suite.exhaustive_depth) {
                ++v.oracles;
                ++v.inconclusive;
                continue;
            }
            path.push_back(true);
            stack.push_back(path);
            path.back() = false;
            stack.push_back(std::move(path));
            continue;
        }
        ++v.oracles;
        if (!compare(a.trace, b.trace, describe(path))) return v;
    }
    for (auto seed : suite.seeds) {
        ++v.oracles;
        auto a = execute(p, pp, ReplyOracle::seeded(seed), suite.step_limit);
        auto b = execute(q, qp, ReplyOracle::seeded(seed), suite.step_limit);
        if (!compare(a.trace, b.trace, "seeded:" + std::to_string(seed))) return v;
    }
    return v;
}

inline Verdict check_equivalence(const Program& p, const Program& q, const ToolParams& params,
                                 const OracleSuite& suite) {
    return check_equivalence(p, params, q, params, suite);
}

}  // namespace pglb

#endif  // PGLB_PROJECTOR_HPP_
