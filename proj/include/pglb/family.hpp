#ifndef PGLB_FAMILY_HPP_
#define PGLB_FAMILY_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "instruction.hpp"

namespace pglb {

struct FamilyParams {
    unsigned k = 1;
    std::uint64_t maxr = 2;
    std::uint64_t maxn = 5;

    std::uint64_t width() const { return std::uint64_t{1} << k; }

    // Tool parameters for running and analyzing the program. bool1 is an
    // environment-driven cell here: its replies come from the oracle.
    ToolParams tool_params() const {
        ToolParams tp;
        tp.maxr = maxr;
        tp.maxn = maxn;
        tp.auto_bool_cells = false;
        return tp;
    }
};

// Register content that makes the indirect jump at the head of a dispatch
// area land on its i-th entry (entries are two instructions wide and the
// first one is the next instruction).
inline std::uint64_t family_offset(std::uint64_t i) { return 2 * i - 1; }

inline std::size_t family_length(unsigned k) { return 12 * (std::size_t{1} << k) + 4; }

// Polling family of size k: two loops poll bool1 up to 2^k times each and
// record in registers 1 and 2 which poll saw true; two indirect jumps then
// dispatch to entry i of the first table and entry j of the second (foci
// a<i> and ap<j>, method "run").
inline std::pair<Program, FamilyParams> gen_polling_family(unsigned k) {
    if (k < 1 || k > 20) throw std::invalid_argument("family index k must be in [1, 20]");
    FamilyParams fp;
    fp.k = k;
    const auto w = fp.width();
    fp.maxn = 2 * w + 1;

    std::vector<Instruction> out;
    out.reserve(family_length(k));
    const BasicInstruction poll{"bool1", "get"};
    for (std::uint64_t reg : {1, 2}) {
        for (std::uint64_t i = 1; i <= w; ++i) {
            out.push_back(Instruction::neg_test(poll));
            out.push_back(Instruction::fwd_jump(3));
            out.push_back(Instruction::reg_set(reg, family_offset(i)));
            out.push_back(Instruction::fwd_jump((w - i) * 4 + 2));
        }
        out.push_back(Instruction::halt());
    }
    out.push_back(Instruction::ind_fwd_jump(1));
    for (std::uint64_t i = 1; i <= w; ++i) {
        out.push_back(Instruction::plain({"a" + std::to_string(i), "run"}));
        out.push_back(Instruction::fwd_jump((w - i) * 2 + 1));
    }
    out.push_back(Instruction::ind_fwd_jump(2));
    for (std::uint64_t i = 1; i <= w; ++i) {
        out.push_back(Instruction::plain({"ap" + std::to_string(i), "run"}));
        out.push_back(Instruction::halt());
    }
    return {Program(std::move(out)), fp};
}

// Relative frequencies of each instruction kind in random programs.
struct RandomWeights {
    unsigned plain = 3;
    unsigned pos_test = 3;
    unsigned neg_test = 3;
    unsigned fwd_jump = 2;
    unsigned bwd_jump = 1;
    unsigned reg_set = 3;
    unsigned ind_fwd_jump = 2;
    unsigned ind_bwd_jump = 1;
    unsigned halt = 2;
    std::vector<std::string> foci = {"f", "g", "x", "bool1"};
};

// Deterministic in (seed, length, params.maxr, params.maxn, weights). Uses
// raw engine output rather than <random> distributions so the sequence is
// the same on every standard library.
inline Program gen_random(std::uint64_t seed, std::size_t length, const ToolParams& params,
                          const RandomWeights& weights = {}) {
    if (length < 1) throw std::invalid_argument("random program length must be >= 1");
    std::mt19937_64 rng(seed);
    auto pick = [&rng](std::uint64_t n) { return rng() % n; };
    const std::vector<unsigned> table = {weights.plain,        weights.pos_test, weights.neg_test,
                                         weights.fwd_jump,     weights.bwd_jump, weights.reg_set,
                                         weights.ind_fwd_jump, weights.ind_bwd_jump, weights.halt};
    std::uint64_t total = 0;
    for (auto t : table) total += t;
    if (total == 0) throw std::invalid_argument("all random weights are zero");

    auto basic = [&]() -> BasicInstruction {
        const auto& f = weights.foci[pick(weights.foci.size())];
        if (f.rfind("bool", 0) == 0) {
            static const char* methods[] = {"get", "set:T", "set:F"};
            return {f, methods[pick(3)]};
        }
        return {f, "m"};
    };

    std::vector<Instruction> out;
    out.reserve(length);
    for (std::size_t pos = 0; pos < length; ++pos) {
        auto r = pick(total);
        std::size_t kind = 0;
        while (r >= table[kind]) r -= table[kind++];
        const auto reg = 1 + pick(params.maxr);
        const auto dist = pick(length + 1);
        switch (kind) {
        case 0: out.push_back(Instruction::plain(basic())); break;
        case 1: out.push_back(Instruction::pos_test(basic())); break;
        case 2: out.push_back(Instruction::neg_test(basic())); break;
        case 3: out.push_back(Instruction::fwd_jump(dist)); break;
        case 4: out.push_back(Instruction::bwd_jump(dist)); break;
        case 5: out.push_back(Instruction::reg_set(reg, 1 + pick(params.maxn))); break;
        case 6: out.push_back(Instruction::ind_fwd_jump(reg)); break;
        case 7: out.push_back(Instruction::ind_bwd_jump(reg)); break;
        default: out.push_back(Instruction::halt()); break;
        }
    }
    return Program(std::move(out));
}

}  // namespace pglb

#endif  // PGLB_FAMILY_HPP_
