// pglblab: command-line front end for the pglb instruction-sequence library.
//
//   pglblab run <file> [--oracle <script|seed>] [--steps N]
//   pglblab mid <file> [--aux list]
//   pglblab project <file> --mode specialize|dispatch [--thread] [--out prefix]
//   pglblab gen family --k K [--out file]
//   pglblab gen random --seed S --len L [--out file]
//   pglblab bench --kmax K [--out report.csv] [--md]
//   pglblab check <p> <q> [--depth D]
//
// Exit codes: 0 success, 1 diagnostics or counterexample, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pglb/pglb.hpp"

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit 1: input problems that are reported, not misuse of the tool.
struct Diagnosed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw Diagnosed("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Diagnosed("cannot write " + path);
    out << text;
}

pglb::Program load_program(const std::string& path) {
    const auto text = read_input(path);
    try {
        return pglb::parse_program(text);
    } catch (const pglb::ParseError& e) {
        throw Diagnosed((path == "-" ? std::string("<stdin>") : path) + ":" + e.what());
    }
}

fs::path sidecar_of(const std::string& program_path) {
    return fs::path(program_path).replace_extension(".cfg");
}

// Options shared by every subcommand that takes a program.
struct ParamFlags {
    std::string config;
    std::optional<std::uint64_t> maxr, maxn, steps, states;
    std::string aux;
    std::optional<bool> cell_init;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "key = value config file (overrides PGLBLAB_CONFIG)");
        app->add_option("--maxr", maxr, "number of registers");
        app->add_option("--maxn", maxn, "largest register value");
        app->add_option("--aux", aux, "comma-separated auxiliary instructions, focus.method or focus.*");
        app->add_option("--steps", steps, "interpreter step limit");
        app->add_option("--states", states, "analyzer state limit");
        app->add_option("--cell-init", cell_init, "initial contents of bool<digits> cells");
    }

    // Defaults < inferred from program < $PGLBLAB_CONFIG < sidecar <file>.cfg
    // < --config < flags.
    pglb::ToolParams resolve(const pglb::Program& p, const std::string& path) const {
        pglb::ToolParams tp;
        for (const auto& u : p) {
            if (!u.uses_register()) continue;
            tp.maxr = std::max(tp.maxr, u.reg());
            if (u.kind() == pglb::Kind::RegSet) tp.maxn = std::max(tp.maxn, u.value());
        }
        if (const char* env = std::getenv("PGLBLAB_CONFIG"); env && *env) pglb::load_config(env).apply(tp);
        if (path != "-" && fs::exists(sidecar_of(path))) pglb::load_config(sidecar_of(path).string()).apply(tp);
        if (!config.empty()) pglb::load_config(config).apply(tp);
        if (maxr) tp.maxr = *maxr;
        if (maxn) tp.maxn = *maxn;
        if (steps) tp.step_limit = *steps;
        if (states) tp.state_limit = *states;
        if (cell_init) tp.cell_init = *cell_init;
        for (const auto& a : pglb::detail::split_list(aux)) tp.aux.add(a);
        tp.check();
        if (auto d = pglb::validate(p, tp); !d.empty()) {
            std::string msg = "program does not validate:";
            for (const auto& x : d) msg += "\n  " + x.str();
            throw Diagnosed(msg);
        }
        return tp;
    }
};

pglb::Config sidecar(const pglb::ToolParams& tp) {
    pglb::Config c;
    c.maxr = tp.maxr;
    c.maxn = tp.maxn;
    c.aux = tp.aux.patterns();
    for (const auto& [focus, init] : tp.cells) c.cells.push_back(focus);
    if (!tp.auto_bool_cells) c.auto_bool_cells = false;
    return c;
}

std::string node_list(const std::vector<pglb::StateNode>& nodes, const pglb::Program& p,
                      const pglb::AuxSet& aux) {
    std::string s;
    for (const auto& n : nodes) {
        if (!s.empty()) s += ' ';
        s += std::to_string(n.pc) + "(" + std::to_string(pglb::id_weight(p.at(n.pc), aux)) + ")";
    }
    return s;
}

int cmd_run(const std::string& file, const std::string& oracle_arg, const ParamFlags& flags,
            bool observable) {
    const auto p = load_program(file);
    const auto tp = flags.resolve(p, file);
    auto oracle = pglb::ReplyOracle::seeded(1);
    if (!oracle_arg.empty()) {
        const bool numeric = oracle_arg.find_first_not_of("0123456789") == std::string::npos;
        oracle = numeric ? pglb::ReplyOracle::seeded(std::stoull(oracle_arg))
                         : pglb::ReplyOracle::scripted(pglb::parse_oracle_script(read_input(oracle_arg)));
    }
    try {
        const auto t = pglb::run(p, tp, std::move(oracle));
        std::cout << (observable ? pglb::serialize(pglb::observable_trace(t, tp)) : pglb::serialize(t));
    } catch (const pglb::OracleExhausted&) {
        throw Diagnosed("oracle script ran out of replies");
    }
    return 0;
}

int cmd_mid(const std::string& file, const ParamFlags& flags) {
    const auto p = load_program(file);
    const auto tp = flags.resolve(p, file);
    const auto g = pglb::build_state_graph(p, tp);
    const auto m = pglb::compute_mid(g, tp.aux);
    std::cout << "MID = " << m.str() << "\n";
    if (m.unbounded) {
        std::cout << "stem: " << node_list(m.stem, p, tp.aux) << "\n"
                  << "cycle: " << node_list(m.cycle, p, tp.aux) << "\n"
                  << "exit: " << node_list(m.exit, p, tp.aux) << "\n";
    } else if (!m.no_anchor) {
        std::cout << "witness: " << node_list(m.witness, p, tp.aux) << "\n";
    }
    if (m.no_anchor) std::cout << "note: no reachable anchor; MID is 0 by convention\n";
    if (m.open_tail_unbounded) std::cout << "open tail: unbounded\n";
    else if (m.open_tail) std::cout << "open tail: " << *m.open_tail << "\n";
    std::cout << "nodes=" << g.size() << " edges=" << g.edge_count() << "\n";
    return 0;
}

int cmd_project(const std::string& file, const std::string& mode, bool thread, std::string prefix,
                const ParamFlags& flags) {
    const auto p = load_program(file);
    const auto tp = flags.resolve(p, file);
    pglb::ProjectionReport rep = [&] {
        if (mode == "specialize") {
            auto r = pglb::specialize(p, tp);
            return thread ? pglb::with_threading(std::move(r)) : r;
        }
        if (mode != "dispatch") throw UsageError("--mode must be specialize or dispatch");
        if (thread) throw UsageError("--thread applies to --mode specialize only");
        return pglb::dispatch_project(p, tp);
    }();
    if (prefix.empty()) {
        prefix = file == "-" ? std::string("out") : fs::path(file).replace_extension().string();
        prefix += "." + mode;
    }
    write_output(prefix + ".pglb", pglb::render_program(rep.output) + "\n");
    write_output(prefix + ".map.csv", rep.map.to_csv());
    write_output(prefix + ".report.txt", rep.summary());
    write_output(prefix + ".cfg", sidecar(rep.output_params).str());
    std::cout << rep.summary() << "wrote " << prefix << ".{pglb,map.csv,report.txt,cfg}\n";
    return 0;
}

int cmd_gen(const std::string& what, unsigned k, std::uint64_t seed, std::size_t len,
            const std::string& out, const ParamFlags& flags) {
    std::string text;
    pglb::Config cfg;
    if (what == "family") {
        if (k < 1) throw UsageError("--k must be >= 1");
        auto [p, fp] = pglb::gen_polling_family(k);
        text = "// P_" + std::to_string(k) + ": " + std::to_string(p.length()) + " instructions\n" +
               pglb::render_program(p) + "\n";
        cfg = sidecar(fp.tool_params());
    } else {
        if (len < 1) throw UsageError("--len must be >= 1");
        pglb::ToolParams tp;
        tp.maxr = flags.maxr.value_or(2);
        tp.maxn = flags.maxn.value_or(3);
        tp.check();
        text = pglb::render_program(pglb::gen_random(seed, len, tp)) + "\n";
        cfg = sidecar(tp);
    }
    write_output(out, text);
    if (!out.empty() && out != "-") write_output(sidecar_of(out).string(), cfg.str());
    return 0;
}

int cmd_bench(unsigned kmax, const std::string& out, bool md, const ParamFlags& flags) {
    if (kmax < 1 || kmax > 8) throw UsageError("--kmax must be in [1, 8]");
    pglb::BenchOptions opt;
    if (flags.states) opt.state_limit = *flags.states;
    const auto rows = pglb::bench_family(kmax, opt);
    write_output(out, pglb::bench_csv(rows));
    if (md) std::cout << pglb::bench_markdown(rows);
    for (const auto& r : rows)
        if (!r.ok) return 1;
    return 0;
}

int cmd_check(const std::string& pfile, const std::string& qfile, std::size_t depth,
              std::size_t seeds, const ParamFlags& flags) {
    if (pfile == "-" && qfile == "-") throw UsageError("at most one program may come from stdin");
    const auto p = load_program(pfile);
    const auto q = load_program(qfile);
    const auto pp = flags.resolve(p, pfile);
    const auto qp = flags.resolve(q, qfile);
    pglb::OracleSuite suite;
    suite.exhaustive_depth = depth;
    suite.seeds.clear();
    for (std::size_t s = 1; s <= seeds; ++s) suite.seeds.push_back(s);
    const auto v = pglb::check_equivalence(p, pp, q, qp, suite);
    std::cout << v.str();
    return v.equivalent ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pglblab: run, analyze and project instruction sequences with indirect jumps"};
    app.require_subcommand(1);
    ParamFlags flags;

    std::string file, file2, oracle, mode, out, prefix;
    bool thread = false, md = false, observable = false;
    unsigned k = 1, kmax = 4;
    std::uint64_t seed = 1;
    std::size_t len = 12, depth = 8, seeds = 8;

    auto* run = app.add_subcommand("run", "execute a program and print its trace");
    run->add_option("file", file, "program file, or - for stdin")->required();
    run->add_option("--oracle", oracle, "reply script file (T/F per line) or a numeric seed");
    run->add_flag("--observable", observable, "print only the observable trace");
    flags.attach(run);

    auto* mid = app.add_subcommand("mid", "compute the maximal internal delay");
    mid->add_option("file", file, "program file, or - for stdin")->required();
    flags.attach(mid);

    auto* project = app.add_subcommand("project", "eliminate register instructions");
    project->add_option("file", file, "program file, or - for stdin")->required();
    project->add_option("--mode", mode, "specialize or dispatch")->required();
    project->add_flag("--thread", thread, "thread jump chains after specializing");
    project->add_option("--out", prefix, "output path prefix");
    flags.attach(project);

    auto* gen = app.add_subcommand("gen", "generate programs");
    gen->require_subcommand(1);
    auto* family = gen->add_subcommand("family", "the polling family of size k");
    family->add_option("--k", k, "family index")->required();
    family->add_option("--out", out, "output file (default stdout)");
    auto* random = gen->add_subcommand("random", "a random program");
    random->add_option("--seed", seed, "generator seed")->required();
    random->add_option("--len", len, "number of instructions")->required();
    random->add_option("--out", out, "output file (default stdout)");
    random->add_option("--maxr", flags.maxr, "number of registers");
    random->add_option("--maxn", flags.maxn, "largest register value");

    auto* bench = app.add_subcommand("bench", "length/delay table for the polling family, k = 1..kmax");
    bench->add_option("--kmax", kmax, "largest k (<= 8)")->required();
    bench->add_option("--out", out, "CSV output file (default stdout)");
    bench->add_flag("--md", md, "also print a Markdown table");
    bench->add_option("--states", flags.states, "analyzer state limit");

    auto* check = app.add_subcommand("check", "observational equivalence of two programs");
    check->add_option("p", file, "first program")->required();
    check->add_option("q", file2, "second program")->required();
    check->add_option("--depth", depth, "exhaustive oracle depth");
    check->add_option("--seeds", seeds, "number of seeded random oracles");
    flags.attach(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run) return cmd_run(file, oracle, flags, observable);
        if (*mid) return cmd_mid(file, flags);
        if (*project) return cmd_project(file, mode, thread, prefix, flags);
        if (*family) return cmd_gen("family", k, seed, len, out, flags);
        if (*random) return cmd_gen("random", k, seed, len, out, flags);
        if (*bench) return cmd_bench(kmax, out, md, flags);
        if (*check) return cmd_check(file, file2, depth, seeds, flags);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const Diagnosed& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
