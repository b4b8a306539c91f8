#ifndef PGLB_BENCH_HPP_
#define PGLB_BENCH_HPP_

#include <chrono>
#include <cstdio>
#include <optional>
#include <cstdint>
#include <string>
#include <vector>

#include "analyzer.hpp"
#include "family.hpp"
#include "projector.hpp"

namespace pglb {

// One measured row of the length-versus-delay experiment on the polling
// family of size k. MID values
// are -1 when unbounded or not computed.
struct BenchRow {
    unsigned k = 0;
    std::size_t length_original = 0;
    std::int64_t mid_original = -1;
    std::size_t length_specialized = 0;
    std::int64_t mid_specialized_raw = -1;  // before jump threading
    std::int64_t mid_specialized = -1;      // after jump threading
    std::size_t length_dispatch = 0;
    std::int64_t mid_dispatch = -1;
    std::size_t state_nodes = 0;
    double ms_generate = 0, ms_mid = 0, ms_specialize = 0, ms_dispatch = 0, ms_verify = 0;
    bool ok = false;
    std::string note;
};

struct BenchOptions {
    std::uint64_t state_limit = 5'000'000;
    // Seeded oracles used to re-verify both projections on every row.
    std::vector<std::uint64_t> verify_seeds = {1, 2, 3, 4, 5, 6, 7, 8};
};

namespace detail {

inline std::int64_t mid_number(const MidResult& m) {
    return m.unbounded ? -1 : static_cast<std::int64_t>(m.value);
}

template <typename F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline BenchRow bench_row(unsigned k, const BenchOptions& opt = {}) {
    BenchRow row;
    row.k = k;
    try {
        std::optional<std::pair<Program, FamilyParams>> fam;
        row.ms_generate = detail::timed([&] { fam.emplace(gen_polling_family(k)); });
        const auto& p = fam->first;
        auto params = fam->second.tool_params();
        params.state_limit = opt.state_limit;
        row.length_original = p.length();

        row.ms_mid = detail::timed([&] {
            const auto g = build_state_graph(p, params);
            row.state_nodes = g.size();
            row.mid_original = detail::mid_number(compute_mid(g, params.aux));
        });

        std::optional<ProjectionReport> spec, disp;
        row.ms_specialize = detail::timed([&] {
            auto raw = specialize(p, params);
            row.mid_specialized_raw = detail::mid_number(raw.mid_after);
            spec.emplace(with_threading(std::move(raw)));
        });
        row.length_specialized = spec->length_after;
        row.mid_specialized = detail::mid_number(spec->mid_after);

        row.ms_dispatch = detail::timed([&] { disp.emplace(dispatch_project(p, params)); });
        row.length_dispatch = disp->length_after;
        row.mid_dispatch = detail::mid_number(disp->mid_after);

        bool equivalent = true;
        row.ms_verify = detail::timed([&] {
            OracleSuite suite;
            suite.exhaustive_depth = 0;
            suite.seeds = opt.verify_seeds;
            for (const auto* rep : {&*spec, &*disp})
                equivalent = equivalent &&
                             check_equivalence(p, params, rep->output, rep->output_params, suite).equivalent;
        });

        const bool shape = row.length_original == family_length(k) && row.mid_original == 4;
        row.ok = shape && equivalent;
        if (!shape) row.note = "family length or MID mismatch";
        else if (!equivalent) row.note = "projection not equivalent";
    } catch (const StateLimitExceeded& e) {
        row.ok = false;
        row.note = e.what();
    }
    return row;
}

// Rows for k = 1..kmax, in order of k.
inline std::vector<BenchRow> bench_family(unsigned kmax, const BenchOptions& opt = {}) {
    std::vector<BenchRow> rows;
    for (unsigned k = 1; k <= kmax; ++k) rows.push_back(bench_row(k, opt));
    return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows, bool with_timing = true) {
    std::string out =
        "k,length_original,mid_original,length_specialized,mid_specialized_raw,mid_specialized,"
        "length_dispatch,mid_dispatch,state_nodes";
    if (with_timing) out += ",ms_generate,ms_mid,ms_specialize,ms_dispatch,ms_verify";
    out += ",ok\n";
    auto ms = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        out += std::to_string(r.k) + "," + std::to_string(r.length_original) + "," +
               std::to_string(r.mid_original) + "," + std::to_string(r.length_specialized) + "," +
               std::to_string(r.mid_specialized_raw) + "," + std::to_string(r.mid_specialized) + "," +
               std::to_string(r.length_dispatch) + "," + std::to_string(r.mid_dispatch) + "," +
               std::to_string(r.state_nodes);
        if (with_timing)
            out += "," + ms(r.ms_generate) + "," + ms(r.ms_mid) + "," + ms(r.ms_specialize) + "," +
                   ms(r.ms_dispatch) + "," + ms(r.ms_verify);
        out += r.ok ? ",1\n" : ",0\n";
    }
    return out;
}

inline std::string bench_markdown(const std::vector<BenchRow>& rows) {
    std::string out =
        "| k | len orig | MID orig | len spec | MID spec | len disp | MID disp | states | ok |\n"
        "|---|---|---|---|---|---|---|---|---|\n";
    auto mid = [](std::int64_t m) { return m < 0 ? std::string("unbounded") : std::to_string(m); };
    for (const auto& r : rows) {
        out += "| " + std::to_string(r.k) + " | " + std::to_string(r.length_original) + " | " +
               mid(r.mid_original) + " | " + std::to_string(r.length_specialized) + " | " +
               mid(r.mid_specialized) + " | " + std::to_string(r.length_dispatch) + " | " +
               mid(r.mid_dispatch) + " | " + std::to_string(r.state_nodes) + " | " +
               (r.ok ? "yes" : "FAIL " + r.note) + " |\n";
    }
    return out;
}

}  // namespace pglb

#endif  // PGLB_BENCH_HPP_
