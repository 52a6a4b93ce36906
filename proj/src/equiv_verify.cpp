#include "poipg/equiv_verify.hpp"

#include <algorithm>
#include <array>
#include <bit>

#include "poipg/causal_queries.hpp"
#include "poipg/errors.hpp"
#include "poipg/oracle.hpp"

namespace poipg {

namespace {

constexpr int kMaxVertices = 8;

void check_bounds(const EnumBounds& b) {
    if (b.n_observed < 1) throw GraphError("enumeration needs at least one observed vertex");
    if (b.max_latent < 0 || b.max_selection < 0)
        throw GraphError("enumeration bounds cannot be negative");
    if (b.n_observed + b.max_latent + b.max_selection > kMaxVertices)
        throw GraphError("enumeration bounds exceed " + std::to_string(kMaxVertices) +
                         " total vertices");
}

// One (latent count, selection count) stratum of the enumeration. Edge
// decisions run over vertex pairs in a fixed order: observed pairs first, then
// the pairs touching each hidden vertex, then hidden pairs.
struct Stratum {
    int n = 0;
    int n_observed = 0;
    std::vector<std::string> names;
    std::vector<Role> roles;
    std::vector<std::pair<int, int>> order;
    std::array<std::uint64_t, kMaxVertices> parents{}, children{}, desc{}, anc{};

    DagView view() const { return DagView{n, parents.data(), children.data(), roles.data()}; }

    Dag materialize() const {
        Dag g;
        for (int v = 0; v < n; ++v) g.add_vertex(names[static_cast<std::size_t>(v)],
                                                 roles[static_cast<std::size_t>(v)]);
        for (int u = 0; u < n; ++u)
            for (std::uint64_t t = children[static_cast<std::size_t>(u)]; t; t &= t - 1)
                g.add_edge(u, std::countr_zero(t));
        return g;
    }
};

Stratum make_stratum(const std::vector<std::string>& observed, int latents, int selections) {
    Stratum s;
    s.n_observed = static_cast<int>(observed.size());
    s.n = s.n_observed + latents + selections;
    s.names = observed;
    s.roles.assign(static_cast<std::size_t>(s.n_observed), Role::Observed);
    for (int i = 1; i <= latents; ++i) {
        s.names.push_back("L" + std::to_string(i));
        s.roles.push_back(Role::Latent);
    }
    for (int i = 1; i <= selections; ++i) {
        s.names.push_back("S" + std::to_string(i));
        s.roles.push_back(Role::Selection);
    }
    for (int i = 0; i < s.n_observed; ++i)
        for (int j = i + 1; j < s.n_observed; ++j) s.order.emplace_back(i, j);
    for (int h = s.n_observed; h < s.n; ++h)
        for (int o = 0; o < s.n_observed; ++o) s.order.emplace_back(o, h);
    for (int h1 = s.n_observed; h1 < s.n; ++h1)
        for (int h2 = h1 + 1; h2 < s.n; ++h2) s.order.emplace_back(h1, h2);
    return s;
}

// keep(s) is consulted after every edge addition; a false return abandons the
// whole subtree, which is sound because adding edges never restores an
// independence.
template <class Keep, class Leaf>
void expand(Stratum& s, std::size_t idx, const Keep& keep, const Leaf& leaf,
            EdgeConstraint constraint) {
    if (idx == s.order.size()) {
        leaf(s);
        return;
    }
    auto [i, j] = s.order[idx];
    expand(s, idx + 1, keep, leaf, constraint);
    const std::pair<int, int> directions[2] = {{i, j}, {j, i}};
    for (auto [u, v] : directions) {
        if (constraint == EdgeConstraint::SelectionSinks &&
            s.roles[static_cast<std::size_t>(u)] == Role::Selection)
            continue;
        if (s.desc[static_cast<std::size_t>(v)] >> u & 1) continue;  // would close a cycle
        auto saved_desc = s.desc;
        auto saved_anc = s.anc;
        s.parents[static_cast<std::size_t>(v)] |= 1ull << u;
        s.children[static_cast<std::size_t>(u)] |= 1ull << v;
        const std::uint64_t up = s.anc[static_cast<std::size_t>(u)] | (1ull << u);
        const std::uint64_t down = s.desc[static_cast<std::size_t>(v)] | (1ull << v);
        for (std::uint64_t t = up; t; t &= t - 1)
            s.desc[static_cast<std::size_t>(std::countr_zero(t))] |= down;
        for (std::uint64_t t = down; t; t &= t - 1)
            s.anc[static_cast<std::size_t>(std::countr_zero(t))] |= up;
        if (keep(s)) expand(s, idx + 1, keep, leaf, constraint);
        s.desc = saved_desc;
        s.anc = saved_anc;
        s.parents[static_cast<std::size_t>(v)] &= ~(1ull << u);
        s.children[static_cast<std::size_t>(u)] &= ~(1ull << v);
    }
}

template <class Keep, class Leaf>
void run_enumeration(const EnumBounds& b, const std::vector<std::string>& observed,
                     const Keep& keep, const Leaf& leaf) {
    check_bounds(b);
    if (static_cast<int>(observed.size()) != b.n_observed)
        throw GraphError("observed name count does not match the bounds");
    for (int k = 0; k <= b.max_latent; ++k)
        for (int m = 0; m <= b.max_selection; ++m) {
            Stratum s = make_stratum(observed, k, m);
            expand(s, 0, keep, leaf, b.constraint);
        }
}

std::vector<std::string> default_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('A' + i)));
    return names;
}

struct Triple {
    std::uint64_t x, z, y;
};

// every unordered disjoint pair of nonempty observed sets with every
// conditioning subset, split by what the statement set entails
void split_triples(const CiSet& cond, std::vector<Triple>& independent,
                   std::vector<Triple>& dependent) {
    const int m = static_cast<int>(cond.universe().size());
    const std::uint64_t full = (1ull << m) - 1;
    auto oracle = table_oracle(cond);
    for (std::uint64_t x = full; x; x = (x - 1) & full) {
        for (std::uint64_t z = full & ~x; z; z = (z - 1) & full & ~x) {
            if (z > x) continue;  // one orientation of each pair
            const std::uint64_t rest = full & ~x & ~z;
            std::uint64_t y = rest;
            while (true) {
                Triple t{x, z, y};
                bool indep = oracle->independent(VertexSet::from_bits(x), VertexSet::from_bits(z),
                                                 VertexSet::from_bits(y));
                (indep ? independent : dependent).push_back(t);
                if (y == 0) break;
                y = (y - 1) & rest;
            }
        }
    }
}

}  // namespace

void enumerate_dags(const EnumBounds& b, const std::vector<std::string>& observed_names,
                    const std::function<void(const Dag&)>& fn) {
    run_enumeration(
        b, observed_names, [](const Stratum&) { return true; },
        [&](const Stratum& s) { fn(s.materialize()); });
}

void enumerate_dags(const EnumBounds& b, const std::function<void(const Dag&)>& fn) {
    check_bounds(b);
    enumerate_dags(b, default_names(b.n_observed), fn);
}

void for_each_equiv_member(const CiSet& cond, const EnumBounds& b,
                           const std::function<void(const Dag&)>& fn) {
    check_bounds(b);
    if (static_cast<int>(cond.universe().size()) != b.n_observed)
        throw GraphError("statement universe does not match the observed bound");

    std::vector<Triple> required, forbidden;
    split_triples(cond, required, forbidden);
    CiSet closure(cond.universe());
    for (const Triple& t : required)
        closure.insert(VertexSet::from_bits(t.x), VertexSet::from_bits(t.z),
                       VertexSet::from_bits(t.y));

    run_enumeration(
        b, cond.universe(),
        [&](const Stratum& s) {
            const DagView v = s.view();
            const std::uint64_t sel = v.role_set(Role::Selection).bits();
            for (const Triple& t : required)
                if (!detail::d_separated_view(v, t.x, t.z, t.y | sel)) return false;
            return true;
        },
        [&](const Stratum& s) {
            const DagView v = s.view();
            const std::uint64_t sel = v.role_set(Role::Selection).bits();
            for (const Triple& t : forbidden)
                if (detail::d_separated_view(v, t.x, t.z, t.y | sel)) return;
            Dag g = s.materialize();
            if (observable_ci_set(g) != closure)
                throw GraphError("membership re-check disagreed with the pruned search");
            fn(g);
        });
}

std::vector<Dag> equiv_members(const CiSet& cond, const EnumBounds& b) {
    std::vector<Dag> out;
    for_each_equiv_member(cond, b, [&](const Dag& g) { out.push_back(g); });
    return out;
}

namespace {

const char* role_letter(Role r) {
    switch (r) {
        case Role::Observed: return "o";
        case Role::Latent: return "l";
        case Role::Selection: return "s";
    }
    return "?";
}

// Walks every member once, holding per-check state; claims derivable from the
// graph under test are computed up front since they do not depend on members.
class Verifier {
public:
    explicit Verifier(const Poipg& p) : p_(p), m_(p.vertex_count()) {
        for (const char* id :
             {"iii-adjacency", "v-tail", "vi-arrow", "vii-noncollider", "theorem-1", "theorem-2",
              "theorem-3", "theorem-4", "theorem-5", "theorem-6"})
            checks_.push_back(CheckResult{id, true, std::nullopt});
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j) {
                if (i == j) continue;
                if (i < j && no_cause_either_way(p_, i, j)) uncaused_.emplace_back(i, j);
                if (definite_cause(p_, i, j)) caused_.emplace_back(i, j);
                for (const CausalClaim& c : blocking_claims(p_, i, j, {}))
                    if (c.theorem == 5) sel_blocked_.emplace_back(i, j);
                for (int k = 0; k < m_; ++k) {
                    if (k == i || k == j) continue;
                    for (const CausalClaim& c : blocking_claims(p_, i, j, VertexSet{k})) {
                        if (c.theorem == 4) through_blocked_.push_back({i, j, k});
                        if (c.theorem == 6) joint_blocked_.push_back({i, j, k});
                    }
                }
            }
    }

    void visit(const Dag& g) {
        std::vector<int> ids;
        for (const Variable& v : g.vertices())
            if (v.role == Role::Observed) ids.push_back(v.id);
        if (static_cast<int>(ids.size()) != m_)
            throw GraphError("member observed count does not match the graph under test");
        for (int i = 0; i < m_; ++i)
            if (g.vertex(ids[static_cast<std::size_t>(i)]).name !=
                p_.names()[static_cast<std::size_t>(i)])
                throw GraphError("member observed names do not match the graph under test");

        const int n = g.vertex_count();
        std::vector<std::uint64_t> child(static_cast<std::size_t>(n));
        std::uint64_t obs = 0;
        for (int v = 0; v < n; ++v) child[static_cast<std::size_t>(v)] = g.child_set(v).bits();
        for (int id : ids) obs |= 1ull << id;
        const std::uint64_t sel = g.role_set(Role::Selection).bits();
        const bool has_latent = !g.role_set(Role::Latent).empty();
        auto reaches = [&](int from, int to, std::uint64_t banned) {
            std::uint64_t frontier = 1ull << from, seen = frontier;
            while (frontier) {
                int u = std::countr_zero(frontier);
                frontier &= frontier - 1;
                std::uint64_t next = child[static_cast<std::size_t>(u)] & ~banned & ~seen;
                seen |= next;
                frontier |= next;
            }
            return (seen >> to) & 1;
        };
        auto at = [&](int i) { return ids[static_cast<std::size_t>(i)]; };
        auto some_into = [&](int i, int j) {
            for (auto o : inducing_path_orientations(g, at(i), at(j)))
                if (o.into_b) return true;
            return false;
        };

        for (int i = 0; i < m_; ++i)
            for (int j = i + 1; j < m_; ++j) {
                const int a = at(i), b = at(j);
                const bool linked = exists_inducing_path(g, a, b);
                if (p_.adjacent(i, j) != linked) fail("iii-adjacency", g);
                bool always_dependent = true;
                const std::uint64_t pool = obs & ~(1ull << a) & ~(1ull << b);
                std::uint64_t y = pool;
                while (true) {
                    if (observable_independent(g, VertexSet{a}, VertexSet{b},
                                               VertexSet::from_bits(y))) {
                        always_dependent = false;
                        break;
                    }
                    if (y == 0) break;
                    y = (y - 1) & pool;
                }
                if (linked != always_dependent) fail("theorem-1", g);
                if (!p_.adjacent(i, j)) continue;
                auto orientations = inducing_path_orientations(g, a, b);
                auto all_into = [&](bool side_b, bool want) {
                    for (auto o : orientations)
                        if ((side_b ? o.into_b : o.into_a) != want) return false;
                    return true;
                };
                const EndpointMark at_j = p_.end_mark(i, j), at_i = p_.end_mark(j, i);
                if (at_j == EndpointMark::Tail && !all_into(true, false)) fail("v-tail", g);
                if (at_i == EndpointMark::Tail && !all_into(false, false)) fail("v-tail", g);
                if (at_j == EndpointMark::Arrow && !all_into(true, true)) fail("vi-arrow", g);
                if (at_i == EndpointMark::Arrow && !all_into(false, true)) fail("vi-arrow", g);
            }
        for (const NoncolliderTriple& t : p_.noncolliders())
            if (some_into(t.x, t.y) && some_into(t.z, t.y)) fail("vii-noncollider", g);
        for (auto [i, j] : caused_)
            if (!reaches(at(i), at(j), 0) || (descendants(g, at(i)).bits() & sel))
                fail("theorem-2", g);
        for (auto [i, j] : uncaused_)
            if (!has_latent || reaches(at(i), at(j), 0) || reaches(at(j), at(i), 0))
                fail("theorem-3", g);
        for (auto [i, j] : sel_blocked_)
            if (reaches(at(i), at(j), sel)) fail("theorem-5", g);
        for (auto [i, j, k] : through_blocked_)
            if (reaches(at(i), at(k), sel) && reaches(at(k), at(j), sel)) fail("theorem-4", g);
        for (auto [i, j, k] : joint_blocked_)
            if (reaches(at(i), at(j), sel | (1ull << at(k)))) fail("theorem-6", g);
    }

    VerificationReport finish(std::uint64_t class_size,
                              std::chrono::duration<double> elapsed) && {
        return VerificationReport{class_size, std::move(checks_), elapsed};
    }

private:
    void fail(const std::string& id, const Dag& g) {
        for (CheckResult& c : checks_)
            if (c.condition == id) {
                if (c.pass) {
                    c.pass = false;
                    c.counterexample = g;
                }
                return;
            }
        throw GraphError("unknown check id " + id);
    }

    const Poipg& p_;
    int m_;
    std::vector<CheckResult> checks_;
    std::vector<std::pair<int, int>> caused_, uncaused_, sel_blocked_;
    std::vector<std::array<int, 3>> through_blocked_, joint_blocked_;
};

}  // namespace

bool VerificationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string describe_dag(const Dag& g) {
    std::string out = "vertices=";
    bool first = true;
    for (const Variable& v : g.vertices()) {
        if (!first) out += ',';
        out += v.name;
        out += ':';
        out += role_letter(v.role);
        first = false;
    }
    out += ";edges=";
    auto edges = g.edges();
    if (edges.empty()) {
        out += '-';
        return out;
    }
    std::sort(edges.begin(), edges.end());
    first = true;
    for (auto [u, v] : edges) {
        if (!first) out += ',';
        out += g.vertex(u).name + "->" + g.vertex(v).name;
        first = false;
    }
    return out;
}

std::vector<std::string> VerificationReport::lines() const {
    std::vector<std::string> out;
    out.push_back("members " + std::to_string(class_size));
    for (const CheckResult& c : checks) {
        std::string line = "check " + c.condition + (c.pass ? " pass" : " fail");
        if (!c.pass && c.counterexample) line += " counterexample=" + describe_dag(*c.counterexample);
        out.push_back(line);
    }
    return out;
}

VerificationReport verify_poipg(const Poipg& p, const std::vector<Dag>& members) {
    if (members.empty()) throw GraphError("verification needs at least one member");
    const auto start = std::chrono::steady_clock::now();
    Verifier v(p);
    for (const Dag& g : members) v.visit(g);
    return std::move(v).finish(members.size(), std::chrono::steady_clock::now() - start);
}

VerificationReport verify_equiv(const Poipg& p, const CiSet& cond, const EnumBounds& b) {
    const auto start = std::chrono::steady_clock::now();
    Verifier v(p);
    std::uint64_t count = 0;
    for_each_equiv_member(cond, b, [&](const Dag& g) {
        v.visit(g);
        ++count;
    });
    return std::move(v).finish(count, std::chrono::steady_clock::now() - start);
}

}  // namespace poipg
