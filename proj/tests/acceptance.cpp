// Acceptance checks for the library. Prints one PASS/FAIL line per criterion
// and exits nonzero if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "pglb/pglb.hpp"

namespace {

using namespace pglb;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond && pass) detail << " first failure: " << what << ";";
        pass = pass && cond;
    }
};

ToolParams small_params() {
    ToolParams tp;
    tp.maxr = 2;
    tp.maxn = 3;
    return tp;
}

Outcome family_length_check() {
    Outcome o;
    const auto t0 = Clock::now();
    for (unsigned k = 1; k <= 8; ++k) {
        const auto n = gen_polling_family(k).first.length();
        o.require(n == 12 * (std::size_t{1} << k) + 4, "k=" + std::to_string(k) + " length " + std::to_string(n));
    }
    const double s = seconds_since(t0);
    o.require(s < 1.0, "took " + std::to_string(s) + " s");
    o.detail << " lengths match 12*2^k+4 for k=1..8 in " << s << " s";
    return o;
}

Outcome family_mid_check() {
    Outcome o;
    for (unsigned k = 1; k <= 8; ++k) {
        const auto t0 = Clock::now();
        const auto [p, fp] = gen_polling_family(k);
        auto tp = fp.tool_params();
        tp.state_limit = 5'000'000;
        try {
            const auto g = build_state_graph(p, tp);
            const auto m = compute_mid(g, tp.aux);
            const double s = seconds_since(t0);
            o.require(!m.unbounded && m.value == 4, "k=" + std::to_string(k) + " MID " + m.str());
            if (k == 8) {
                o.require(s < 60.0, "k=8 took " + std::to_string(s) + " s");
                o.detail << " k=8: MID " << m.str() << ", " << g.size() << " states, " << s << " s";
            }
        } catch (const StateLimitExceeded& e) {
            o.require(false, e.what());
        }
    }
    return o;
}

Outcome oracle_agreement_check() {
    Outcome o;
    const auto [p1, fp] = gen_polling_family(1);
    const auto bf = brute_force_mid(p1, fp.tool_params(), 60);
    const auto m = compute_mid(p1, fp.tool_params());
    o.require(bf == 4 && !m.unbounded && m.value == 4, "smallest family program, brute force " + std::to_string(bf));

    const auto tp = small_params();
    std::size_t compared = 0, seed = 0, skipped = 0;
    while (compared < 500) {
        const auto p = gen_random(seed, 1 + seed % 15, tp);
        ++seed;
        const auto g = build_state_graph(p, tp);
        if (!g.is_acyclic()) {
            ++skipped;
            continue;
        }
        const auto cm = compute_mid(g, tp.aux);
        const auto bm = brute_force_mid(p, tp, std::max<std::uint64_t>(200, g.size() + 1));
        o.require(!cm.unbounded && cm.value == bm, render_program(p) + " compute " + cm.str() +
                                                       " brute " + std::to_string(bm));
        ++compared;
    }
    o.detail << " smallest family program brute force = 4; " << compared << " acyclic random programs agree (" << skipped
             << " cyclic skipped)";
    return o;
}

Outcome projection_check() {
    Outcome o;
    std::size_t checks = 0, counterexamples = 0, inconclusive = 0;
    auto verify = [&](const Program& p, const ToolParams& tp, std::size_t depth) {
        for (auto rep : {specialize(p, tp), dispatch_project(p, tp)}) {
            o.require(is_pglb(rep.output), rep.mode + " output not PGLB for " + render_program(p));
            OracleSuite suite;
            suite.exhaustive_depth = depth;
            const auto v = check_equivalence(p, tp, rep.output, rep.output_params, suite);
            ++checks;
            inconclusive += v.inconclusive;
            if (!v.equivalent) {
                ++counterexamples;
                o.require(false, rep.mode + " counterexample for " + render_program(p));
            }
        }
    };
    for (unsigned k = 1; k <= 4; ++k) {
        const auto [p, fp] = gen_polling_family(k);
        verify(p, fp.tool_params(), 8);
    }
    const auto tp = small_params();
    for (std::uint64_t seed = 0; seed < 500; ++seed) verify(gen_random(seed, 1 + seed % 15, tp), tp, 10);
    o.detail << " " << checks << " equivalence checks, " << counterexamples << " counterexamples, "
             << inconclusive << " inconclusive oracles";
    return o;
}

Outcome delay_preserving_check(const std::vector<BenchRow>& rows) {
    Outcome o;
    for (const auto& r : rows) {
        o.require(r.mid_specialized_raw >= 0 && r.mid_specialized_raw <= 5,
                  "k=" + std::to_string(r.k) + " specialized MID " + std::to_string(r.mid_specialized_raw));
        o.require(r.mid_specialized >= 0 && r.mid_specialized <= 5,
                  "k=" + std::to_string(r.k) + " threaded MID " + std::to_string(r.mid_specialized));
    }
    o.detail << " specialized MID";
    for (const auto& r : rows) o.detail << " " << r.mid_specialized_raw;
    o.detail << "; length ratios";
    for (std::size_t i = 2; i < rows.size(); ++i) {
        const double ratio = double(rows[i].length_specialized) / double(rows[i - 1].length_specialized);
        o.require(ratio >= 3.5 && ratio <= 4.5, "k=" + std::to_string(rows[i].k) + " ratio " + std::to_string(ratio));
        o.detail << " " << ratio;
    }
    return o;
}

Outcome length_preserving_check(const std::vector<BenchRow>& rows) {
    Outcome o;
    o.detail << " dispatch length ratios";
    for (std::size_t i = 2; i < rows.size(); ++i) {
        const double ratio = double(rows[i].length_dispatch) / double(rows[i - 1].length_dispatch);
        o.require(ratio >= 1.8 && ratio <= 2.6, "k=" + std::to_string(rows[i].k) + " ratio " + std::to_string(ratio));
        o.detail << " " << ratio;
    }
    o.detail << "; MID";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        o.detail << " " << rows[i].mid_dispatch;
        o.require(rows[i].mid_dispatch >= 0, "unbounded dispatch MID");
        if (i > 0)
            o.require(rows[i].mid_dispatch > rows[i - 1].mid_dispatch,
                      "MID not increasing at k=" + std::to_string(rows[i].k));
    }
    o.require(rows.back().mid_dispatch >= rows.front().mid_dispatch + 4, "MID growth below 4");
    return o;
}

Outcome semantics_check() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto tp = small_params();
    auto final_of = [&](const char* text, std::vector<bool> replies) {
        return run(parse_program(text), tp, ReplyOracle::scripted(std::move(replies))).final;
    };
    o.require(final_of("#0 ; !", {}) == Status::Deadlocked, "distance-0 jump");
    o.require(final_of("\\#0 ; !", {}) == Status::Deadlocked, "distance-0 backward jump");
    o.require(final_of("f.m", {true}) == Status::Deadlocked, "running off the end");
    o.require(final_of("+f.m ; !", {false}) == Status::Deadlocked, "skipping off the end");
    o.require(final_of("#2 ; !", {}) == Status::Deadlocked, "jump past the end");
    o.require(final_of("f.m ; \\#2", {true}) == Status::Deadlocked, "jump before the start");
    o.require(final_of("i#1 ; !", {}) == Status::Deadlocked, "indirect jump through 0");

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        BooleanCell cell;
        bool model = false;
        for (int i = 0; i < 50; ++i) {
            const char* m = std::array{"set:T", "set:F", "get"}[rng() % 3];
            const bool reply = cell.process(m);
            if (std::string(m) == "set:T") model = true;
            if (std::string(m) == "set:F") model = false;
            o.require(reply == model, "Boolean cell law");
        }
    }

    auto limited = tp;
    limited.step_limit = 500;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto p = gen_random(seed, 12, tp);
        const auto a = run(p, limited, ReplyOracle::seeded(seed));
        o.require(a == run(p, limited, ReplyOracle::seeded(seed)), "determinism");
        o.require((a.final == Status::Terminated) ==
                      (!a.events.empty() && a.events.back().instruction.kind() == Kind::Halt),
                  "Terminated iff last event is halt");
    }

    auto aux = tp;
    aux.aux.add("x.*");
    const auto obs = observable_trace(run(parse_program("x.m ; f.m ; #1 ; !"), aux,
                                          ReplyOracle::scripted({true, true})),
                                      aux);
    o.require(obs.events.size() == 1 && obs.events[0].basic.str() == "f.m", "aux filtering");

    AuxSet ax;
    ax.add("x.m");
    const auto table = parse_program("f.m ; +f.m ; -f.m ; x.m ; +x.m ; -x.m ; #1 ; \\#1 ; set:1:1 ; i#1 ; i\\#1 ; !");
    const unsigned expected[] = {0, 0, 0, 1, 1, 1, 1, 1, 1, 2, 2, 0};
    for (std::size_t pc = 1; pc <= table.length(); ++pc)
        o.require(id_weight(table.at(pc), ax) == expected[pc - 1], "weight of " + render(table.at(pc)));

    RandomWeights jumps;
    jumps.reg_set = jumps.ind_fwd_jump = jumps.ind_bwd_jump = 0;
    jumps.fwd_jump = jumps.bwd_jump = 5;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto p = gen_random(seed, 14, tp, jumps);
        const auto once = thread_jumps(p);
        o.require(thread_jumps(once) == once, "thread_jumps idempotence on " + render_program(p));
    }
    const double s = seconds_since(t0);
    o.require(s < 120.0, "suite took " + std::to_string(s) + " s");
    o.detail << " deadlock clauses, cell laws, determinism, aux filtering, weight table, threading in " << s
             << " s";
    return o;
}

Outcome unbounded_check() {
    Outcome o;
    const auto p = parse_program("f.m ; +x.get ; \\#1 ; !");
    auto tp = small_params();
    tp.aux.add("x.get");
    const auto m = compute_mid(p, tp);
    o.require(m.unbounded, "reported " + m.str());
    if (m.unbounded) {
        for (std::size_t laps = 1; laps <= 3; ++laps)
            o.require(replay_segment(p, tp, m.unbounded_path(laps)).has_value(),
                      "witness with " + std::to_string(laps) + " laps does not replay");
    }
    const auto b10 = brute_force_mid(p, tp, 10), b20 = brute_force_mid(p, tp, 20),
               b40 = brute_force_mid(p, tp, 40);
    o.require(b10 < b20 && b20 < b40, "brute force not increasing");
    o.detail << " MID " << m.str() << "; brute force at depth 10/20/40 = " << b10 << "/" << b20 << "/" << b40;
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int n, const char* name, const std::function<Outcome()>& check) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        std::printf("%s criterion %d (%s):%s [%.2f s]\n", o.pass ? "PASS" : "FAIL", n, name,
                    o.detail.str().c_str(), seconds_since(t0));
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };

    std::vector<BenchRow> rows;
    report(1, "family length", family_length_check);
    report(2, "family MID", family_mid_check);
    report(3, "oracle agreement", oracle_agreement_check);
    report(4, "projection correctness", projection_check);
    const auto bench_rows = [&] {
        if (rows.empty()) rows = bench_family(6);
        return rows;
    };
    report(5, "delay-preserving projection", [&] { return delay_preserving_check(bench_rows()); });
    report(6, "length-preserving projection", [&] { return length_preserving_check(bench_rows()); });
    report(7, "semantics properties", semantics_check);
    report(8, "unboundedness detection", unbounded_check);
    return failures == 0 ? 0 : 1;
}
