#include "poipg/fci.hpp"

#include <algorithm>
#include <numeric>

#include "poipg/errors.hpp"

namespace poipg {

void SepsetTable::record(int a, int b, VertexSet y) {
    if (a == b) throw GraphError("separating set for a self-pair");
    if (y.contains(a) || y.contains(b))
        throw GraphError("separating set contains one of its endpoints");
    table_.emplace(std::pair{std::min(a, b), std::max(a, b)}, y);
}

std::optional<VertexSet> SepsetTable::lookup(int a, int b) const {
    auto it = table_.find({std::min(a, b), std::max(a, b)});
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

bool SepsetTable::contains(int a, int b) const {
    return table_.count({std::min(a, b), std::max(a, b)}) != 0;
}

std::vector<std::tuple<int, int, VertexSet>> SepsetTable::entries() const {
    std::vector<std::tuple<int, int, VertexSet>> out;
    out.reserve(table_.size());
    for (const auto& [k, y] : table_) out.emplace_back(k.first, k.second, y);
    return out;
}

namespace {

std::string set_names(const std::vector<std::string>& names, VertexSet s) {
    if (s.empty()) return "-";
    std::string out;
    for (int v : s) {
        if (!out.empty()) out += ",";
        out += names[static_cast<std::size_t>(v)];
    }
    return out;
}

}  // namespace

std::vector<std::string> FciTrace::lines() const {
    std::vector<std::string> out;
    out.reserve(events.size());
    auto name = [&](int v) { return universe[static_cast<std::size_t>(v)]; };
    for (const FciEvent& e : events) {
        switch (e.kind) {
            case FciEventKind::EdgeRemoved:
                out.push_back("removed " + name(e.a) + " " + name(e.b) +
                              " sepset=" + set_names(universe, e.sepset) + " phase=" +
                              (e.phase == FciPhase::Adjacency ? "adjacency" : "possible-d-sep"));
                break;
            case FciEventKind::ColliderOriented:
                out.push_back("collider " + name(e.a) + " " + name(e.c) + " " + name(e.b));
                break;
            case FciEventKind::RuleFired:
                out.push_back("rule " + e.rule + " " + name(e.a) + " " + name(e.b) + " " +
                              mark_name(e.mark));
                break;
            case FciEventKind::Conflict:
                out.push_back("conflict " + e.note);
                break;
        }
    }
    return out;
}

VertexSet possible_d_sep(const Poipg& g, int a, int b) {
    g.adjacencies(a);
    g.adjacencies(b);
    if (a == b) throw GraphError("endpoints must differ");
    VertexSet out;
    std::vector<int> path{a};
    std::uint64_t on_path = std::uint64_t{1} << a;
    auto walk = [&](auto&& self) -> void {
        int cur = path.back();
        int prev = path[path.size() - 2];
        for (int w : g.adjacencies(cur)) {
            if (on_path & (std::uint64_t{1} << w)) continue;
            bool collider = g.end_mark(prev, cur) == EndpointMark::Arrow &&
                            g.end_mark(w, cur) == EndpointMark::Arrow;
            if (!collider && !g.adjacent(prev, w)) continue;
            out.insert(w);
            path.push_back(w);
            on_path |= std::uint64_t{1} << w;
            self(self);
            on_path &= ~(std::uint64_t{1} << w);
            path.pop_back();
        }
    };
    for (int w : g.adjacencies(a)) {
        out.insert(w);
        path.push_back(w);
        on_path |= std::uint64_t{1} << w;
        walk(walk);
        on_path &= ~(std::uint64_t{1} << w);
        path.pop_back();
    }
    return out;
}

namespace {

struct Placement {
    int from, to;  // mark goes to the `to` end of edge (from, to)
    EndpointMark mark;
};

// All-or-nothing attempt: conflicts abort the whole instance. Returns true
// when at least one mark actually changed. Placement order must keep every
// intermediate pair legal, so list arrows before tails.
bool place_all(Poipg& g, const char* rule, const std::vector<Placement>& ps, ConflictPolicy policy,
               std::vector<FciEvent>& events) {
    for (const Placement& p : ps) {
        EndpointMark cur = g.end_mark(p.from, p.to);
        if (cur == p.mark || cur == EndpointMark::Circle) continue;
        std::string note = std::string(rule) + " wants " + mark_name(p.mark) + " at the " +
                           g.names()[static_cast<std::size_t>(p.to)] + " end of edge " +
                           g.names()[static_cast<std::size_t>(p.from)] + " " +
                           g.names()[static_cast<std::size_t>(p.to)] + " but " + mark_name(cur) +
                           " is already set";
        if (policy == ConflictPolicy::FailFast) throw ConflictError(note);
        FciEvent e;
        e.kind = FciEventKind::Conflict;
        e.note = std::move(note);
        events.push_back(std::move(e));
        return false;
    }
    bool changed = false;
    for (const Placement& p : ps) {
        if (g.end_mark(p.from, p.to) == p.mark) continue;
        g.set_end_mark(p.from, p.to, p.mark);
        FciEvent e;
        e.kind = FciEventKind::RuleFired;
        e.rule = rule;
        e.a = p.from;
        e.b = p.to;
        e.mark = p.mark;
        events.push_back(std::move(e));
        changed = true;
    }
    return changed;
}

}  // namespace

std::vector<FciEvent> orient_colliders(Poipg& g, const SepsetTable& sepsets,
                                       ConflictPolicy policy) {
    std::vector<FciEvent> events;
    const int n = g.vertex_count();
    for (int c = 0; c < n; ++c) {
        VertexSet around = g.adjacencies(c);
        for (int a : around)
            for (int b : around) {
                if (b <= a || g.adjacent(a, b)) continue;
                auto sep = sepsets.lookup(a, b);
                if (!sep) continue;
                if (sep->contains(c)) {
                    g.add_noncollider(a, c, b);
                    continue;
                }
                EndpointMark ma = g.end_mark(a, c);
                EndpointMark mb = g.end_mark(b, c);
                if (ma == EndpointMark::Tail || mb == EndpointMark::Tail) {
                    std::string note = "collider " + g.names()[static_cast<std::size_t>(a)] + " " +
                                       g.names()[static_cast<std::size_t>(c)] + " " +
                                       g.names()[static_cast<std::size_t>(b)] +
                                       " demands an arrow over a tail";
                    if (policy == ConflictPolicy::FailFast) throw ConflictError(note);
                    FciEvent e;
                    e.kind = FciEventKind::Conflict;
                    e.note = std::move(note);
                    events.push_back(std::move(e));
                    continue;
                }
                if (ma != EndpointMark::Arrow) g.set_end_mark(a, c, EndpointMark::Arrow);
                if (mb != EndpointMark::Arrow) g.set_end_mark(b, c, EndpointMark::Arrow);
                FciEvent e;
                e.kind = FciEventKind::ColliderOriented;
                e.a = a;
                e.c = c;
                e.b = b;
                events.push_back(std::move(e));
            }
    }
    return events;
}

namespace {

bool sweep_r1(Poipg& g, ConflictPolicy policy, std::vector<FciEvent>& events) {
    // a *-> b o-* c with a, c nonadjacent: orient b -> c
    bool changed = false;
    const int n = g.vertex_count();
    for (int a = 0; a < n; ++a)
        for (int b : g.adjacencies(a)) {
            if (g.end_mark(a, b) != EndpointMark::Arrow) continue;
            for (int c : g.adjacencies(b)) {
                if (c == a || g.adjacent(a, c)) continue;
                if (g.end_mark(c, b) != EndpointMark::Circle) continue;
                changed |= place_all(g, "R1",
                                     {{b, c, EndpointMark::Arrow}, {c, b, EndpointMark::Tail}},
                                     policy, events);
            }
        }
    return changed;
}

bool sweep_r2(Poipg& g, ConflictPolicy policy, std::vector<FciEvent>& events) {
    // a -> b *-> c or a *-> b -> c, with a *-o c: complete a *-> c
    bool changed = false;
    const int n = g.vertex_count();
    for (int a = 0; a < n; ++a)
        for (int c : g.adjacencies(a)) {
            if (g.end_mark(a, c) != EndpointMark::Circle) continue;
            for (int b : g.adjacencies(a)) {
                if (!g.adjacent(b, c)) continue;
                bool head_first = g.end_mark(b, a) == EndpointMark::Tail &&
                                  g.end_mark(a, b) == EndpointMark::Arrow &&
                                  g.end_mark(b, c) == EndpointMark::Arrow;
                bool tail_last = g.end_mark(a, b) == EndpointMark::Arrow &&
                                 g.end_mark(c, b) == EndpointMark::Tail &&
                                 g.end_mark(b, c) == EndpointMark::Arrow;
                if (!head_first && !tail_last) continue;
                changed |= place_all(g, "R2", {{a, c, EndpointMark::Arrow}}, policy, events);
                break;
            }
        }
    return changed;
}

bool sweep_r3(Poipg& g, ConflictPolicy policy, std::vector<FciEvent>& events) {
    // a *-> b <-* c, a *-o d o-* c, a, c nonadjacent, d *-o b: orient d *-> b
    bool changed = false;
    const int n = g.vertex_count();
    for (int d = 0; d < n; ++d)
        for (int b : g.adjacencies(d)) {
            if (g.end_mark(d, b) != EndpointMark::Circle) continue;
            VertexSet pool = g.adjacencies(d) & g.adjacencies(b);
            bool fired = false;
            for (int a : pool) {
                if (fired) break;
                if (g.end_mark(a, b) != EndpointMark::Arrow) continue;
                if (g.end_mark(a, d) != EndpointMark::Circle) continue;
                for (int c : pool) {
                    if (c <= a || g.adjacent(a, c)) continue;
                    if (g.end_mark(c, b) != EndpointMark::Arrow) continue;
                    if (g.end_mark(c, d) != EndpointMark::Circle) continue;
                    changed |= place_all(g, "R3", {{d, b, EndpointMark::Arrow}}, policy, events);
                    fired = true;
                    break;
                }
            }
        }
    return changed;
}

// Discriminating path search for r4: grows <t, ..., v, w, b> backwards from v,
// keeping every grown vertex a collider on the path and a parent of b. Returns
// the terminal vertex, or -1.
int find_discriminating_terminal(const Poipg& g, int b, int front, std::uint64_t on_path) {
    for (int t : g.adjacencies(front)) {
        if (on_path & (std::uint64_t{1} << t)) continue;
        if (g.end_mark(t, front) != EndpointMark::Arrow) continue;
        if (!g.adjacent(t, b)) return t;
        bool parent = g.end_mark(b, t) == EndpointMark::Tail &&
                      g.end_mark(t, b) == EndpointMark::Arrow;
        if (!parent) continue;
        if (g.end_mark(front, t) != EndpointMark::Arrow) continue;
        int found = find_discriminating_terminal(g, b, t, on_path | (std::uint64_t{1} << t));
        if (found >= 0) return found;
    }
    return -1;
}

bool sweep_r4(Poipg& g, const SepsetTable& sepsets, ConflictPolicy policy,
              std::vector<FciEvent>& events) {
    bool changed = false;
    const int n = g.vertex_count();
    for (int w = 0; w < n; ++w)
        for (int b : g.adjacencies(w)) {
            if (g.end_mark(b, w) != EndpointMark::Circle) continue;
            for (int v : g.adjacencies(w)) {
                if (v == b) continue;
                if (g.end_mark(w, v) != EndpointMark::Arrow) continue;
                if (!g.adjacent(v, b)) continue;
                bool parent = g.end_mark(b, v) == EndpointMark::Tail &&
                              g.end_mark(v, b) == EndpointMark::Arrow;
                if (!parent) continue;
                std::uint64_t on_path = (std::uint64_t{1} << w) | (std::uint64_t{1} << b) |
                                        (std::uint64_t{1} << v);
                int t = find_discriminating_terminal(g, b, v, on_path);
                if (t < 0) continue;
                auto sep = sepsets.lookup(t, b);
                if (!sep) continue;
                // A separating set containing w only certifies w as an ancestor of
                // {t, b} or the selection set; no endpoint mark follows from that.
                if (sep->contains(w)) continue;
                changed |= place_all(g, "R4",
                                     {{v, w, EndpointMark::Arrow},
                                      {b, w, EndpointMark::Arrow},
                                      {w, b, EndpointMark::Arrow}},
                                     policy, events);
                break;
            }
        }
    return changed;
}

}  // namespace

std::vector<FciEvent> apply_orientation_rules(Poipg& g, const SepsetTable& sepsets,
                                              ConflictPolicy policy) {
    std::vector<FciEvent> events;
    bool changed = true;
    while (changed) {
        changed = false;
        changed |= sweep_r1(g, policy, events);
        changed |= sweep_r2(g, policy, events);
        changed |= sweep_r3(g, policy, events);
        changed |= sweep_r4(g, sepsets, policy, events);
    }
    return events;
}

namespace {

bool ask(const CiOracle& oracle, int a, int b, VertexSet y) {
    try {
        return oracle.independent(VertexSet{a}, VertexSet{b}, y);
    } catch (const std::exception& e) {
        throw OracleError("oracle failed on " + oracle.describe_query(VertexSet{a}, VertexSet{b}, y) +
                          ": " + e.what());
    }
}

// lexicographic size-k subsets of the ascending pool; fn returning true stops
template <typename F>
bool for_each_combination(const std::vector<int>& pool, int k, F&& fn) {
    const int m = static_cast<int>(pool.size());
    if (k > m) return false;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        VertexSet y;
        for (int i : idx) y.insert(pool[static_cast<std::size_t>(i)]);
        if (fn(y)) return true;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
        if (i < 0) return false;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

void remove_edge_with_event(Poipg& g, int a, int b, VertexSet y, FciPhase phase,
                            SepsetTable& sepsets, std::vector<FciEvent>& events) {
    g.remove_edge(a, b);
    sepsets.record(a, b, y);
    FciEvent e;
    e.kind = FciEventKind::EdgeRemoved;
    e.a = std::min(a, b);
    e.b = std::max(a, b);
    e.sepset = y;
    e.phase = phase;
    events.push_back(std::move(e));
}

void adjacency_phase(Poipg& g, const CiOracle& oracle, int cap, SepsetTable& sepsets,
                     std::vector<FciEvent>& events) {
    const int n = g.vertex_count();
    for (int size = 0; size <= cap; ++size) {
        bool feasible = false;
        for (int a = 0; a < n && !feasible; ++a) {
            VertexSet adj = g.adjacencies(a);
            for (int b : adj)
                if (static_cast<int>(adj.without(b).size()) >= size) {
                    feasible = true;
                    break;
                }
        }
        if (!feasible) break;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b || !g.adjacent(a, b)) continue;
                auto pool = g.adjacencies(a).without(b).to_vector();
                if (static_cast<int>(pool.size()) < size) continue;
                for_each_combination(pool, size, [&](VertexSet y) {
                    if (!ask(oracle, a, b, y)) return false;
                    remove_edge_with_event(g, a, b, y, FciPhase::Adjacency, sepsets, events);
                    return true;
                });
            }
    }
}

void retest_phase(Poipg& g, const Poipg& oriented, const CiOracle& oracle, int cap,
                  SepsetTable& sepsets, std::vector<FciEvent>& events) {
    const int n = g.vertex_count();
    std::vector<VertexSet> reach(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        if (!oriented.adjacencies(v).empty())
            reach[static_cast<std::size_t>(v)] = [&] {
                int other = v == 0 ? 1 : 0;
                return possible_d_sep(oriented, v, other);
            }();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b || !g.adjacent(a, b)) continue;
            auto pool = (reach[static_cast<std::size_t>(a)].without(a).without(b)).to_vector();
            bool removed = false;
            for (int size = 0; size <= std::min<int>(cap, static_cast<int>(pool.size())) && !removed;
                 ++size)
                removed = for_each_combination(pool, size, [&](VertexSet y) {
                    if (!ask(oracle, a, b, y)) return false;
                    remove_edge_with_event(g, a, b, y, FciPhase::PossibleDsep, sepsets, events);
                    return true;
                });
        }
}

}  // namespace

FciResult fci(const CiOracle& oracle, const FciConfig& config) {
    const std::vector<std::string>& names = oracle.universe();
    const int n = static_cast<int>(names.size());
    if (config.max_cond_size && *config.max_cond_size < 0)
        throw GraphError("conditioning size cap must be nonnegative");
    const int cap = config.max_cond_size ? std::min(*config.max_cond_size, n) : n;

    FciResult result;
    result.trace.universe = names;
    Poipg g(names);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            g.add_edge(a, b, EndpointMark::Circle, EndpointMark::Circle);

    adjacency_phase(g, oracle, cap, result.sepsets, result.trace.events);

    // colliders go onto a scratch copy that only exists to widen the retest
    // neighborhoods; the surviving graph is re-oriented from clean circles
    Poipg oriented = g;
    orient_colliders(oriented, result.sepsets, config.conflict_policy);
    retest_phase(g, oriented, oracle, cap, result.sepsets, result.trace.events);

    auto collider_events = orient_colliders(g, result.sepsets, config.conflict_policy);
    result.trace.events.insert(result.trace.events.end(), collider_events.begin(),
                               collider_events.end());
    auto rule_events = apply_orientation_rules(g, result.sepsets, config.conflict_policy);
    result.trace.events.insert(result.trace.events.end(), rule_events.begin(), rule_events.end());

    result.graph = std::move(g);
    return result;
}

Poipg replay_trace(const FciTrace& trace) {
    Poipg g(trace.universe);
    const int n = g.vertex_count();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            g.add_edge(a, b, EndpointMark::Circle, EndpointMark::Circle);
    SepsetTable sepsets;
    for (const FciEvent& e : trace.events) {
        switch (e.kind) {
            case FciEventKind::EdgeRemoved:
                g.remove_edge(e.a, e.b);
                sepsets.record(e.a, e.b, e.sepset);
                break;
            case FciEventKind::ColliderOriented:
                if (g.end_mark(e.a, e.c) != EndpointMark::Arrow)
                    g.set_end_mark(e.a, e.c, EndpointMark::Arrow);
                if (g.end_mark(e.b, e.c) != EndpointMark::Arrow)
                    g.set_end_mark(e.b, e.c, EndpointMark::Arrow);
                break;
            case FciEventKind::RuleFired:
                if (g.end_mark(e.a, e.b) != e.mark) g.set_end_mark(e.a, e.b, e.mark);
                break;
            case FciEventKind::Conflict:
                break;
        }
    }
    for (int c = 0; c < n; ++c) {
        VertexSet around = g.adjacencies(c);
        for (int a : around)
            for (int b : around) {
                if (b <= a || g.adjacent(a, b)) continue;
                auto sep = sepsets.lookup(a, b);
                if (sep && sep->contains(c)) g.add_noncollider(a, c, b);
            }
    }
    return g;
}

}  // namespace poipg
