#ifndef PGLB_ANALYZER_HPP_
#define PGLB_ANALYZER_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "instruction.hpp"
#include "syntax.hpp"
#include "validate.hpp"
#include "vm.hpp"

namespace pglb {

// Internal delay contributed by one instruction occurrence: 0 for
// externally observable steps and termination, 1 for auxiliary basic
// instructions, direct jumps and register sets, 2 for indirect jumps.
inline unsigned id_weight(const Instruction& u, const AuxSet& aux) {
    switch (u.kind()) {
    case Kind::Plain:
    case Kind::PosTest:
    case Kind::NegTest: return aux.contains(u.basic()) ? 1 : 0;
    case Kind::FwdJump:
    case Kind::BwdJump:
    case Kind::RegSet: return 1;
    case Kind::IndFwdJump:
    case Kind::IndBwdJump: return 2;
    case Kind::Halt: return 0;
    }
    return 0;
}

struct StateNode {
    std::size_t pc = 0;
    std::vector<std::uint64_t> registers;

    bool operator==(const StateNode&) const = default;

    std::string str() const {
        std::string s = std::to_string(pc);
        for (auto r : registers) s += ":" + std::to_string(r);
        return s;
    }
};

class StateLimitExceeded : public std::runtime_error {
public:
    StateLimitExceeded(std::size_t nodes, std::size_t frontier)
        : std::runtime_error("state limit exceeded: " + std::to_string(nodes) + " nodes, " +
                             std::to_string(frontier) + " unexplored"),
          nodes_(nodes), frontier_(frontier) {}
    std::size_t nodes() const { return nodes_; }
    std::size_t frontier() const { return frontier_; }

private:
    std::size_t nodes_;
    std::size_t frontier_;
};

// Reachable (pc, registers) states of a program under arbitrary replies.
// Node 0 is the initial state; ids follow breadth-first discovery order.
class StateGraph {
public:
    static constexpr std::uint32_t kDeadlock = std::numeric_limits<std::uint32_t>::max();

    struct Node {
        std::uint32_t pc;
        std::uint8_t n_out;
        bool terminates;
        // out[0]: the fall-through/only outcome (for tests: execution continues
        // with the next instruction); out[1]: tests only, the skip outcome.
        std::array<std::uint32_t, 2> out;
    };

    const Program& program() const { return program_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t maxr() const { return maxr_; }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Node>& nodes() const { return nodes_; }

    std::span<const std::uint64_t> registers(std::size_t i) const {
        return {regs_.data() + i * maxr_, maxr_};
    }
    StateNode state(std::size_t i) const {
        auto r = registers(i);
        return {nodes_[i].pc, {r.begin(), r.end()}};
    }
    std::optional<std::uint32_t> find(const StateNode& s) const {
        if (s.registers.size() != maxr_) return std::nullopt;
        auto it = index_.find(key(s.pc, s.registers));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& n : nodes_)
            for (std::uint8_t k = 0; k < n.n_out; ++k) e += n.out[k] != kDeadlock;
        return e;
    }

    bool is_acyclic() const {
        std::vector<std::uint32_t> indeg(size(), 0);
        for (const auto& n : nodes_)
            for (std::uint8_t k = 0; k < n.n_out; ++k)
                if (n.out[k] != kDeadlock) ++indeg[n.out[k]];
        std::vector<std::uint32_t> ready;
        for (std::uint32_t i = 0; i < size(); ++i)
            if (indeg[i] == 0) ready.push_back(i);
        std::size_t seen = 0;
        while (!ready.empty()) {
            const auto v = ready.back();
            ready.pop_back();
            ++seen;
            const auto& n = nodes_[v];
            for (std::uint8_t k = 0; k < n.n_out; ++k)
                if (n.out[k] != kDeadlock && --indeg[n.out[k]] == 0) ready.push_back(n.out[k]);
        }
        return seen == size();
    }

private:
    friend StateGraph build_state_graph(const Program&, const ToolParams&);

    explicit StateGraph(const Program& p, std::size_t maxr) : program_(p), maxr_(maxr) {}

    static std::string key(std::size_t pc, std::span<const std::uint64_t> regs) {
        std::string k;
        k.reserve(4 * (regs.size() + 1));
        auto put = [&k](std::uint64_t v) {
            if (v <= std::numeric_limits<std::uint32_t>::max()) {
                const auto w = static_cast<std::uint32_t>(v);
                k.append(reinterpret_cast<const char*>(&w), sizeof w);
            } else {
                k.push_back('\xff');
                k.append(reinterpret_cast<const char*>(&v), sizeof v);
            }
        };
        put(pc);
        for (auto r : regs) put(r);
        return k;
    }

    std::uint32_t intern(std::size_t pc, std::span<const std::uint64_t> regs, std::size_t limit,
                         std::size_t processed) {
        auto [it, inserted] = index_.try_emplace(key(pc, regs), 0);
        if (!inserted) return it->second;
        if (nodes_.size() >= limit) throw StateLimitExceeded(nodes_.size(), nodes_.size() - processed);
        it->second = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({static_cast<std::uint32_t>(pc), 0, false, {kDeadlock, kDeadlock}});
        regs_.insert(regs_.end(), regs.begin(), regs.end());
        return it->second;
    }

    Program program_;
    std::size_t maxr_;
    std::vector<Node> nodes_;
    std::vector<std::uint64_t> regs_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

// Breadth-first closure from (pc=1, registers all 0). Every basic
// instruction may reply either way; register effects are tracked exactly.
inline StateGraph build_state_graph(const Program& p, const ToolParams& params) {
    require_valid(p, params);
    const auto maxr = static_cast<std::size_t>(params.maxr);
    const auto limit = static_cast<std::size_t>(params.state_limit);
    StateGraph g(p, maxr);
    std::vector<std::uint64_t> zero(maxr, 0), regs(maxr);
    g.intern(1, zero, limit, 0);
    for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
        const auto pc = static_cast<std::size_t>(g.nodes_[i].pc);
        const auto& u = p.at(pc);
        if (u.kind() == Kind::Halt) {
            g.nodes_[i].terminates = true;
            continue;
        }
        // For a NegTest the fall-through happens on reply false.
        const bool proceed_reply = u.kind() != Kind::NegTest;
        const std::uint8_t n_out = u.is_test() ? 2 : 1;
        std::array<std::uint32_t, 2> out{StateGraph::kDeadlock, StateGraph::kDeadlock};
        for (std::uint8_t k = 0; k < n_out; ++k) {
            const bool reply = k == 0 ? proceed_reply : !proceed_reply;
            auto cur = g.registers(i);
            const auto t = transition(p, pc, cur, reply);
            if (t.status != Status::Running) continue;
            regs.assign(cur.begin(), cur.end());
            if (t.write) regs[t.write->first - 1] = t.write->second;
            out[k] = g.intern(t.next_pc, regs, limit, i + 1);
        }
        g.nodes_[i].n_out = n_out;
        g.nodes_[i].out = out;
    }
    return g;
}

struct MidResult {
    bool unbounded = false;
    std::uint64_t value = 0;
    // Finite: a run segment from one anchor to the next achieving `value`.
    std::vector<StateNode> witness;
    // Unbounded: anchor..c0, then the cycle c0..cm (cm steps back to c0), then
    // c0..anchor.
    std::vector<StateNode> stem, cycle, exit;
    // No anchor is reachable at all; value is 0 by convention.
    bool no_anchor = false;
    // Largest delay after an anchor that is never closed by another anchor
    // (the run deadlocks first); nullopt when no such tail exists.
    std::optional<std::uint64_t> open_tail;
    bool open_tail_unbounded = false;

    std::string str() const { return unbounded ? "unbounded" : std::to_string(value); }

    // Stem, `laps` turns around the cycle, then the exit.
    std::vector<StateNode> unbounded_path(std::size_t laps = 1) const {
        std::vector<StateNode> path(stem.begin(), stem.end());
        for (std::size_t l = 0; l < laps; ++l) {
            path.insert(path.end(), cycle.begin() + 1, cycle.end());
            path.push_back(cycle.front());
        }
        path.insert(path.end(), exit.begin() + 1, exit.end());
        return path;
    }
};

namespace detail {

struct Preds {
    std::vector<std::uint32_t> start, list;
    std::span<const std::uint32_t> of(std::uint32_t v) const {
        return {list.data() + start[v], list.data() + start[v + 1]};
    }
};

inline Preds predecessors(const StateGraph& g) {
    Preds p;
    p.start.assign(g.size() + 1, 0);
    for (const auto& n : g.nodes())
        for (std::uint8_t k = 0; k < n.n_out; ++k)
            if (n.out[k] != StateGraph::kDeadlock) ++p.start[n.out[k] + 1];
    for (std::size_t i = 0; i < g.size(); ++i) p.start[i + 1] += p.start[i];
    p.list.resize(p.start.back());
    auto fill = p.start;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        const auto& n = g.node(v);
        for (std::uint8_t k = 0; k < n.n_out; ++k)
            if (n.out[k] != StateGraph::kDeadlock) p.list[fill[n.out[k]]++] = v;
    }
    return p;
}

// Kahn order of the subgraph induced by `in`; returns the topological order
// (shorter than the subgraph iff it has a cycle) and leaves the residual
// in-degrees in `indeg`.
inline std::vector<std::uint32_t> topo_order(const StateGraph& g, const std::vector<char>& in,
                                             std::vector<std::uint32_t>& indeg) {
    indeg.assign(g.size(), 0);
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        if (!in[v]) continue;
        const auto& n = g.node(v);
        for (std::uint8_t k = 0; k < n.n_out; ++k)
            if (n.out[k] != StateGraph::kDeadlock && in[n.out[k]]) ++indeg[n.out[k]];
    }
    std::vector<std::uint32_t> order;
    for (std::uint32_t v = 0; v < g.size(); ++v)
        if (in[v] && indeg[v] == 0) order.push_back(v);
    for (std::size_t h = 0; h < order.size(); ++h) {
        const auto& n = g.node(order[h]);
        for (std::uint8_t k = 0; k < n.n_out; ++k) {
            const auto s = n.out[k];
            if (s != StateGraph::kDeadlock && in[s] && --indeg[s] == 0) order.push_back(s);
        }
    }
    return order;
}

}  // namespace detail

// Exact maximal internal delay over all runs: the largest weight of a run
// segment that starts at an anchor (weight-0 occurrence) and ends at the next
// anchor. Nodes strictly between two anchors all weigh at least 1, so any
// cycle among them that can be entered from and left to an anchor makes the
// delay unbounded.
inline MidResult compute_mid(const StateGraph& g, const AuxSet& aux) {
    using detail::Preds;
    constexpr auto kNone = StateGraph::kDeadlock;
    const auto n = static_cast<std::uint32_t>(g.size());
    std::vector<std::uint8_t> w(n);
    std::vector<char> anchor(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        w[v] = static_cast<std::uint8_t>(id_weight(g.program().at(g.node(v).pc), aux));
        anchor[v] = w[v] == 0;
    }

    MidResult res;
    if (std::none_of(anchor.begin(), anchor.end(), [](char a) { return a != 0; })) {
        res.no_anchor = true;
        return res;
    }

    // fwd: non-anchors reachable from an anchor through non-anchors.
    std::vector<char> fwd(n, 0);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!anchor[v]) continue;
        const auto& nd = g.node(v);
        for (std::uint8_t k = 0; k < nd.n_out; ++k) {
            const auto s = nd.out[k];
            if (s != kNone && !anchor[s] && !fwd[s]) fwd[s] = 1, stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        const auto& nd = g.node(v);
        for (std::uint8_t k = 0; k < nd.n_out; ++k) {
            const auto s = nd.out[k];
            if (s != kNone && !anchor[s] && !fwd[s]) fwd[s] = 1, stack.push_back(s);
        }
    }

    // bwd: non-anchors that reach an anchor through non-anchors.
    const Preds preds = detail::predecessors(g);
    std::vector<char> bwd(n, 0);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!anchor[v]) continue;
        for (auto u : preds.of(v))
            if (!anchor[u] && !bwd[u]) bwd[u] = 1, stack.push_back(u);
    }
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto u : preds.of(v))
            if (!anchor[u] && !bwd[u]) bwd[u] = 1, stack.push_back(u);
    }

    std::vector<char> rel(n);
    for (std::uint32_t v = 0; v < n; ++v) rel[v] = fwd[v] && bwd[v];
    const auto rel_count = static_cast<std::size_t>(std::count(rel.begin(), rel.end(), 1));

    std::vector<std::uint32_t> indeg;
    const auto order = detail::topo_order(g, rel, indeg);

    if (order.size() < rel_count) {
        res.unbounded = true;
        // Walk backwards through unsorted nodes until one repeats: each of
        // them still has an unsorted predecessor in `rel`.
        std::uint32_t v = kNone;
        for (std::uint32_t u = 0; u < n && v == kNone; ++u)
            if (rel[u] && indeg[u] > 0) v = u;
        std::vector<std::uint32_t> back_walk;
        std::vector<std::int64_t> seen_at(n, -1);
        while (seen_at[v] < 0) {
            seen_at[v] = static_cast<std::int64_t>(back_walk.size());
            back_walk.push_back(v);
            for (auto u : preds.of(v))
                if (rel[u] && indeg[u] > 0) {
                    v = u;
                    break;
                }
        }
        std::vector<std::uint32_t> cyc(back_walk.begin() + seen_at[v], back_walk.end());
        std::reverse(cyc.begin(), cyc.end());
        std::vector<char> on_cycle(n, 0);
        for (auto c : cyc) on_cycle[c] = 1;

        // Stem: multi-source BFS from anchors through non-anchors to the cycle.
        std::vector<std::uint32_t> parent(n, kNone);
        std::deque<std::uint32_t> q;
        std::vector<char> vis(n, 0);
        for (std::uint32_t a = 0; a < n; ++a)
            if (anchor[a]) vis[a] = 1, q.push_back(a);
        std::uint32_t hit = kNone;
        while (!q.empty() && hit == kNone) {
            const auto u = q.front();
            q.pop_front();
            const auto& nd = g.node(u);
            for (std::uint8_t k = 0; k < nd.n_out && hit == kNone; ++k) {
                const auto s = nd.out[k];
                if (s == kNone || vis[s] || anchor[s]) continue;
                vis[s] = 1, parent[s] = u;
                if (on_cycle[s]) hit = s;
                q.push_back(s);
            }
        }
        std::vector<std::uint32_t> stem;
        for (auto x = hit; x != kNone; x = parent[x]) stem.push_back(x);
        std::reverse(stem.begin(), stem.end());
        std::rotate(cyc.begin(), std::find(cyc.begin(), cyc.end(), hit), cyc.end());

        // Exit: BFS from the cycle entry through `rel` nodes to an anchor.
        std::fill(parent.begin(), parent.end(), kNone);
        std::fill(vis.begin(), vis.end(), 0);
        q.assign(1, hit);
        vis[hit] = 1;
        std::uint32_t close = kNone;
        while (!q.empty() && close == kNone) {
            const auto u = q.front();
            q.pop_front();
            const auto& nd = g.node(u);
            for (std::uint8_t k = 0; k < nd.n_out && close == kNone; ++k) {
                const auto s = nd.out[k];
                if (s == kNone || vis[s]) continue;
                if (anchor[s]) {
                    parent[s] = u, close = s;
                } else if (rel[s]) {
                    vis[s] = 1, parent[s] = u, q.push_back(s);
                }
            }
        }
        std::vector<std::uint32_t> ex;
        for (auto x = close; x != hit; x = parent[x]) ex.push_back(x);
        ex.push_back(hit);
        std::reverse(ex.begin(), ex.end());

        for (auto x : stem) res.stem.push_back(g.state(x));
        for (auto x : cyc) res.cycle.push_back(g.state(x));
        for (auto x : ex) res.exit.push_back(g.state(x));
    } else {
        // Longest closing path from each relevant node, in reverse topo order.
        std::vector<std::uint64_t> best(n, 0);
        std::vector<std::uint32_t> next(n, kNone);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto v = *it;
            const auto& nd = g.node(v);
            std::uint64_t b = 0;
            std::uint32_t choice = kNone;
            for (std::uint8_t k = 0; k < nd.n_out; ++k) {
                const auto s = nd.out[k];
                if (s == kNone) continue;
                const std::uint64_t cand = anchor[s] ? 0 : rel[s] ? best[s] : 0;
                if ((anchor[s] || rel[s]) && (choice == kNone || cand > b)) b = cand, choice = s;
            }
            best[v] = w[v] + b;
            next[v] = choice;
        }
        std::uint32_t from = kNone, first = kNone;
        std::uint64_t top = 0;
        for (std::uint32_t a = 0; a < n; ++a) {
            if (!anchor[a]) continue;
            if (from == kNone) from = a;
            const auto& nd = g.node(a);
            for (std::uint8_t k = 0; k < nd.n_out; ++k) {
                const auto s = nd.out[k];
                if (s == kNone || !(anchor[s] || rel[s])) continue;
                const std::uint64_t cand = anchor[s] ? 0 : best[s];
                if (first == kNone || cand > top) top = cand, from = a, first = s;
            }
        }
        res.value = top;
        res.witness.push_back(g.state(from));
        for (auto x = first; x != kNone; x = anchor[x] ? kNone : next[x])
            res.witness.push_back(g.state(x));
    }

    // Open tails: anchor-started delays that end in deadlock.
    std::vector<std::uint32_t> fdeg;
    const auto forder = detail::topo_order(g, fwd, fdeg);
    const auto fwd_count = static_cast<std::size_t>(std::count(fwd.begin(), fwd.end(), 1));
    if (forder.size() < fwd_count) {
        res.open_tail_unbounded = true;
    } else {
        constexpr std::int64_t kUndef = -1;
        std::vector<std::int64_t> open(n, kUndef);
        for (auto it = forder.rbegin(); it != forder.rend(); ++it) {
            const auto v = *it;
            const auto& nd = g.node(v);
            std::int64_t b = kUndef;
            for (std::uint8_t k = 0; k < nd.n_out; ++k) {
                const auto s = nd.out[k];
                if (s == kNone) b = std::max<std::int64_t>(b, 0);
                else if (fwd[s] && open[s] != kUndef) b = std::max(b, open[s]);
            }
            if (b != kUndef) open[v] = w[v] + b;
        }
        std::int64_t top = kUndef;
        for (std::uint32_t a = 0; a < n; ++a) {
            if (!anchor[a]) continue;
            const auto& nd = g.node(a);
            for (std::uint8_t k = 0; k < nd.n_out; ++k) {
                const auto s = nd.out[k];
                if (s == kNone) top = std::max<std::int64_t>(top, 0);
                else if (fwd[s]) top = std::max(top, open[s]);
            }
        }
        if (top != kUndef) res.open_tail = static_cast<std::uint64_t>(top);
    }
    return res;
}

inline MidResult compute_mid(const Program& p, const ToolParams& params) {
    return compute_mid(build_state_graph(p, params), params.aux);
}

// Replays a sequence of states through the interpreter, choosing at each
// basic instruction the reply that leads to the next state. Returns the
// summed weights, or nullopt if some consecutive pair is not a transition.
inline std::optional<std::uint64_t> replay_segment(const Program& p, const ToolParams& params,
                                                   const std::vector<StateNode>& path) {
    if (path.empty()) return std::nullopt;
    ToolParams free = params;
    free.auto_bool_cells = false;
    free.cells.clear();
    std::uint64_t sum = 0;
    MachineConfig c = initial_config(p, free, ReplyOracle::scripted({}));
    c.pc = path.front().pc;
    for (std::size_t r = 1; r <= path.front().registers.size(); ++r)
        if (path.front().registers[r - 1] != 0) c.registers.set(r, path.front().registers[r - 1]);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        sum += id_weight(p.at(c.pc), params.aux);
        bool matched = false;
        for (bool reply : {true, false}) {
            MachineConfig probe = c;
            probe.oracle = ReplyOracle::scripted({reply});
            probe = step(p, std::move(probe));
            auto regs = probe.registers.values();
            if (probe.status == Status::Running && probe.pc == path[i + 1].pc &&
                std::equal(regs.begin(), regs.end(), path[i + 1].registers.begin(),
                           path[i + 1].registers.end())) {
                c = std::move(probe);
                matched = true;
                break;
            }
        }
        if (!matched) return std::nullopt;
    }
    sum += id_weight(p.at(c.pc), params.aux);
    return sum;
}

namespace detail {

struct BruteForce {
    const Program& p;
    const AuxSet& aux;
    std::uint64_t depth;
    std::uint64_t best = 0;
    std::vector<std::uint64_t> regs;

    // `open` is the delay accumulated since the last anchor, or -1 before
    // the first one.
    void walk(std::size_t pc, std::int64_t open, std::uint64_t steps) {
        if (steps == depth) return;
        const auto& u = p.at(pc);
        const auto w = id_weight(u, aux);
        if (w == 0) {
            if (open >= 0) best = std::max(best, static_cast<std::uint64_t>(open));
            open = 0;
        } else if (open >= 0) {
            open += w;
        }
        const int branches = u.is_test() ? 2 : 1;
        for (int b = 0; b < branches; ++b) {
            const auto t = transition(p, pc, regs, b == 0);
            if (t.status != Status::Running) continue;
            std::uint64_t saved = 0;
            if (t.write) {
                saved = regs[t.write->first - 1];
                regs[t.write->first - 1] = t.write->second;
            }
            walk(t.next_pc, open, steps + 1);
            if (t.write) regs[t.write->first - 1] = saved;
        }
    }
};

}  // namespace detail

// Independent lower bound on the maximal internal delay: enumerates every run
// of at most `depth` instructions under all reply sequences and takes the
// largest closed anchor-to-next-anchor segment weight.
inline std::uint64_t brute_force_mid(const Program& p, const ToolParams& params,
                                     std::uint64_t depth) {
    require_valid(p, params);
    detail::BruteForce bf{p, params.aux, depth, 0,
                          std::vector<std::uint64_t>(static_cast<std::size_t>(params.maxr), 0)};
    bf.walk(1, -1, 0);
    return bf.best;
}

}  // namespace pglb

#endif  // PGLB_ANALYZER_HPP_
