#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pglb/family.hpp"
#include "pglb/syntax.hpp"
#include "pglb/vm.hpp"

namespace {

using namespace pglb;

ToolParams params(std::uint64_t maxr = 2, std::uint64_t maxn = 3) {
    ToolParams tp;
    tp.maxr = maxr;
    tp.maxn = maxn;
    return tp;
}

std::vector<std::size_t> positions(const Trace& t) {
    std::vector<std::size_t> out;
    for (const auto& e : t.events) out.push_back(e.position);
    return out;
}

TEST(Step, ZeroDistanceJumpDeadlocks) {
    const auto p = parse_program("#0 ; !");
    auto c = step(p, initial_config(p, params(), ReplyOracle::scripted({})));
    EXPECT_EQ(c.status, Status::Deadlocked);
    const auto q = parse_program("f.m ; \\#0");
    c = initial_config(q, params(), ReplyOracle::scripted({true}));
    c.pc = 2;
    EXPECT_EQ(step(q, c).status, Status::Deadlocked);
}

TEST(Step, RunningOffTheEndDeadlocks) {
    const auto p = parse_program("! ; f.m");
    for (bool reply : {true, false}) {
        auto c = initial_config(p, params(), ReplyOracle::scripted({reply}));
        c.pc = 2;
        EXPECT_EQ(step(p, c).status, Status::Deadlocked);
    }
    // A test whose skip lands past the end, and a jump past the end.
    EXPECT_EQ(run(parse_program("+f.m ; !"), params(), ReplyOracle::scripted({false})).final,
              Status::Deadlocked);
    EXPECT_EQ(run(parse_program("#2 ; !"), params(), ReplyOracle::scripted({})).final,
              Status::Deadlocked);
    EXPECT_EQ(run(parse_program("set:1:1 ; !"), params(), ReplyOracle::scripted({})).final,
              Status::Terminated);
    EXPECT_EQ(run(parse_program("! ; set:1:1"), params(), ReplyOracle::scripted({})).final,
              Status::Terminated);
    EXPECT_EQ(run(parse_program("#1 ; set:1:1"), params(), ReplyOracle::scripted({})).final,
              Status::Deadlocked);
}

TEST(Step, BackwardJumpBeforeStartDeadlocks) {
    EXPECT_EQ(run(parse_program("f.m ; \\#2 ; !"), params(), ReplyOracle::scripted({true})).final,
              Status::Deadlocked);
    const auto t = run(parse_program("#2 ; ! ; \\#1"), params(), ReplyOracle::scripted({}));
    EXPECT_EQ(positions(t), (std::vector<std::size_t>{1, 3, 2}));
    EXPECT_EQ(t.final, Status::Terminated);
}

TEST(Step, IndirectJumpThroughRegister) {
    const auto p = parse_program("set:1:2 ; i#1 ; ! ; !");
    auto c = initial_config(p, params(), ReplyOracle::scripted({}));
    c.registers.set(1, 2);
    c.pc = 2;
    c = step(p, c);
    EXPECT_EQ(c.status, Status::Running);
    EXPECT_EQ(c.pc, 4u);
    c = step(p, c);
    EXPECT_EQ(c.status, Status::Terminated);

    const auto t = run(p, params(), ReplyOracle::scripted({}));
    EXPECT_EQ(positions(t), (std::vector<std::size_t>{1, 2, 4}));
}

TEST(Step, IndirectBackwardJump) {
    const auto t = run(parse_program("#3 ; ! ; f.m ; set:2:3 ; i\\#2"), params(),
                       ReplyOracle::scripted({}));
    EXPECT_EQ(positions(t), (std::vector<std::size_t>{1, 4, 5, 2}));
    EXPECT_EQ(t.final, Status::Terminated);
}

TEST(Step, UnsetRegisterDeadlocks) {
    EXPECT_EQ(run(parse_program("i#1 ; !"), params(), ReplyOracle::scripted({})).final,
              Status::Deadlocked);
    EXPECT_EQ(run(parse_program("! ; i\\#2"), params(), ReplyOracle::scripted({})).final,
              Status::Terminated);
}

TEST(Step, TestPolarity) {
    const auto pos = parse_program("+f.m ; ! ; g.m ; !");
    EXPECT_EQ(positions(run(pos, params(), ReplyOracle::scripted({true}))),
              (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(positions(run(pos, params(), ReplyOracle::scripted({false, true}))),
              (std::vector<std::size_t>{1, 3, 4}));
    const auto neg = parse_program("-f.m ; ! ; g.m ; !");
    EXPECT_EQ(positions(run(neg, params(), ReplyOracle::scripted({false}))),
              (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(positions(run(neg, params(), ReplyOracle::scripted({true, false}))),
              (std::vector<std::size_t>{1, 3, 4}));
    // Plain instructions proceed whatever the reply.
    EXPECT_EQ(positions(run(parse_program("f.m ; !"), params(), ReplyOracle::scripted({false}))),
              (std::vector<std::size_t>{1, 2}));
}

TEST(Run, BooleanCellProgram) {
    const auto t = run(parse_program("bool1.set:T ; +bool1.get ; !"), params(),
                       ReplyOracle::scripted({}));
    ASSERT_EQ(t.events.size(), 3u);
    EXPECT_EQ(t.events[0], (TraceEvent{1, Instruction::plain({"bool1", "set:T"}), true}));
    EXPECT_EQ(t.events[1], (TraceEvent{2, Instruction::pos_test({"bool1", "get"}), true}));
    EXPECT_EQ(t.events[2], (TraceEvent{3, Instruction::halt(), std::nullopt}));
    EXPECT_EQ(t.final, Status::Terminated);
}

TEST(Run, HaltOnly) {
    const auto t = run(parse_program("!"), params(), ReplyOracle::scripted({}));
    ASSERT_EQ(t.events.size(), 1u);
    EXPECT_EQ(t.events[0].position, 1u);
    EXPECT_EQ(t.final, Status::Terminated);
}

TEST(Run, FamilyReachesFirstEntries) {
    const auto [p, fp] = gen_polling_family(1);
    // Two bool1.get replies, then one reply each for a1.run and ap1.run.
    const auto t = run(p, fp.tool_params(), ReplyOracle::scripted({true, true, true, true}));
    const auto obs = observable_trace(t, fp.tool_params());
    ASSERT_EQ(obs.events.size(), 4u);
    EXPECT_EQ(obs.events[2].basic.str(), "a1.run");
    EXPECT_EQ(obs.events[3].basic.str(), "ap1.run");
    EXPECT_EQ(t.final, Status::Terminated);
}

TEST(Run, ScriptedOracleExhaustionIsAnError) {
    EXPECT_THROW(run(parse_program("f.m ; g.m ; !"), params(), ReplyOracle::scripted({true})),
                 OracleExhausted);
    const auto ex = execute(parse_program("f.m ; g.m ; !"), params(), ReplyOracle::exhaustive({true}), 100);
    EXPECT_TRUE(ex.oracle_exhausted);
    EXPECT_EQ(ex.trace.events.size(), 1u);
}

TEST(Run, StepLimitIsDistinctFromDeadlock) {
    auto tp = params();
    tp.step_limit = 50;
    const auto t = run(parse_program("#1 ; \\#1"), tp, ReplyOracle::scripted({}));
    EXPECT_EQ(t.final, Status::StepLimit);
    EXPECT_EQ(t.events.size(), 50u);
}

TEST(Run, RequiresValidProgram) {
    EXPECT_THROW(run(parse_program("set:3:1 ; !"), params(), ReplyOracle::scripted({})), InvalidProgram);
}

TEST(Run, CellInitialContents) {
    const auto p = parse_program("+bool3.get ; ! ; f.m ; !");
    auto tp = params();
    EXPECT_EQ(run(p, tp, ReplyOracle::scripted({true})).events.size(), 3u);
    tp.cell_init = true;
    EXPECT_EQ(run(p, tp, ReplyOracle::scripted({})).events.size(), 2u);
    tp.auto_bool_cells = false;
    tp.cell_init = false;
    EXPECT_EQ(run(p, tp, ReplyOracle::scripted({true})).events.size(), 2u);
    // Explicit bindings for other foci.
    auto tc = params();
    tc.cells["r1b0"] = false;
    EXPECT_EQ(run(parse_program("r1b0.set:T ; +r1b0.get ; ! ; !"), tc, ReplyOracle::scripted({})).events.size(), 3u);
}

TEST(BooleanCell, Laws) {
    std::mt19937_64 rng(7);
    const char* methods[] = {"set:T", "set:F", "get"};
    for (int trial = 0; trial < 200; ++trial) {
        BooleanCell cell(trial % 2 == 0);
        bool model = trial % 2 == 0;
        for (int i = 0; i < 30; ++i) {
            const std::string m = methods[rng() % 3];
            const bool reply = cell.process(m);
            if (m == "set:T") model = true;
            if (m == "set:F") model = false;
            EXPECT_EQ(reply, model) << m;
            EXPECT_EQ(cell.contents(), model);
        }
    }
    BooleanCell c;
    EXPECT_THROW(c.process("flip"), ServiceError);
}

TEST(Trace, Serialization) {
    const auto t = run(parse_program("+f.m ; #1 ; !"), params(), ReplyOracle::scripted({false}));
    EXPECT_EQ(serialize(t), "1 +f.m reply=F\n3 !\nstatus=Terminated\n");
}

TEST(OracleScript, Parse) {
    EXPECT_EQ(parse_oracle_script("T\nF\n\n// note\n T \n"), (std::vector<bool>{true, false, true}));
    EXPECT_THROW(parse_oracle_script("T\nX\n"), std::invalid_argument);
}

TEST(Observable, AuxFiltered) {
    auto tp = params();
    tp.aux.add("aux1.*");
    const auto t = run(parse_program("aux1.m ; f.m ; !"), tp, ReplyOracle::scripted({true, false}));
    const auto obs = observable_trace(t, tp);
    ASSERT_EQ(obs.events.size(), 1u);
    EXPECT_EQ(obs.events[0], (ObservableEvent{{"f", "m"}, false}));
    EXPECT_EQ(obs.final, Status::Terminated);

    const auto jumps = observable_trace(run(parse_program("#1 ; !"), tp, ReplyOracle::scripted({})), tp);
    EXPECT_TRUE(jumps.events.empty());
    EXPECT_EQ(jumps.final, Status::Terminated);
}

// Properties over random programs.
class VmProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(VmProperties, DeterminismDisciplineAndLimits) {
    const auto tp = params();
    const auto p = gen_random(GetParam(), 12, tp);
    auto limited = tp;
    limited.step_limit = 200;
    const auto a = run(p, limited, ReplyOracle::seeded(GetParam()));
    const auto b = run(p, limited, ReplyOracle::seeded(GetParam()));
    ASSERT_EQ(a, b);

    // Each consecutive pair of positions is explained by the instruction
    // semantics under the recorded reply.
    std::vector<std::uint64_t> regs(tp.maxr, 0);
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const auto& e = a.events[i];
        EXPECT_EQ(e.reply.has_value(), e.instruction.has_basic());
        const auto t = transition(p, e.position, regs, e.reply.value_or(true));
        if (t.write) regs[t.write->first - 1] = t.write->second;
        if (i + 1 < a.events.size()) {
            ASSERT_EQ(t.status, Status::Running);
            EXPECT_EQ(t.next_pc, a.events[i + 1].position);
        } else if (a.final != Status::StepLimit) {
            EXPECT_EQ(t.status, a.final);
        }
    }

    EXPECT_EQ(a.final == Status::Terminated,
              !a.events.empty() && a.events.back().instruction.kind() == Kind::Halt);

    // Raising the step limit only extends the trace.
    limited.step_limit = 400;
    const auto longer = run(p, limited, ReplyOracle::seeded(GetParam()));
    ASSERT_GE(longer.events.size(), a.events.size());
    EXPECT_TRUE(std::equal(a.events.begin(), a.events.end(), longer.events.begin()));
}

INSTANTIATE_TEST_SUITE_P(Seeds, VmProperties, ::testing::Range<std::uint64_t>(0, 100));

}  // namespace
