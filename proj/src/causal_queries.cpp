#include "poipg/causal_queries.hpp"

#include <functional>

#include "poipg/errors.hpp"

namespace poipg {

namespace {

void require_vertex(const Poipg& p, int v) {
    if (v < 0 || v >= p.vertex_count())
        throw GraphError("unknown vertex id " + std::to_string(v));
}

void require_inside(const Poipg& p, const VertexSet& s, const char* what) {
    if (!s.subset_of(VertexSet::first_n(p.vertex_count())))
        throw GraphError(std::string(what) + " mentions a vertex outside the graph");
}

bool bidirected(const Poipg& p, int a, int b) {
    return p.adjacent(a, b) && p.end_mark(a, b) == EndpointMark::Arrow &&
           p.end_mark(b, a) == EndpointMark::Arrow;
}

// An edge may be walked from u to v only when its mark at the u end is not an
// arrowhead.
bool walkable(const Poipg& p, int u, int v) {
    return p.end_mark(v, u) != EndpointMark::Arrow;
}

}  // namespace

std::string to_string(ClaimKind k) {
    switch (k) {
        case ClaimKind::DefiniteCause: return "DefiniteCause";
        case ClaimKind::NoCauseEitherWay: return "NoCauseEitherWay";
        case ClaimKind::LatentConfounder: return "LatentConfounder";
        case ClaimKind::AllPathsHitS: return "AllPathsHitS";
        case ClaimKind::AllPathsHitSorC: return "AllPathsHitSorC";
        case ClaimKind::PathsThroughCHitS: return "PathsThroughCHitS";
    }
    throw GraphError("unhandled claim kind");
}

std::string CausalClaim::line(const std::vector<std::string>& names) const {
    std::string out = "THEOREM=" + std::to_string(theorem) + " KIND=" + to_string(kind) +
                      " FROM=" + names.at(static_cast<std::size_t>(subject)) +
                      " TO=" + names.at(static_cast<std::size_t>(object));
    if (blocker) {
        out += " C={";
        bool first = true;
        for (int v : *blocker) {
            if (!first) out += ',';
            out += names.at(static_cast<std::size_t>(v));
            first = false;
        }
        out += '}';
    }
    return out;
}

bool exists_directed_path(const Poipg& p, int a, int b) {
    require_vertex(p, a);
    require_vertex(p, b);
    if (a == b) return true;
    VertexSet seen{a};
    std::vector<int> frontier{a};
    while (!frontier.empty()) {
        int u = frontier.back();
        frontier.pop_back();
        for (int v : p.adjacencies(u)) {
            if (seen.contains(v)) continue;
            if (p.end_mark(v, u) != EndpointMark::Tail) continue;
            if (p.end_mark(u, v) != EndpointMark::Arrow) continue;
            if (v == b) return true;
            seen.insert(v);
            frontier.push_back(v);
        }
    }
    return false;
}

bool exists_semi_directed_path(const Poipg& p, int a, int b,
                               const std::optional<VertexSet>& through,
                               const VertexSet& avoiding) {
    require_vertex(p, a);
    require_vertex(p, b);
    if (a == b) throw GraphError("path query needs two distinct endpoints");
    if (through) {
        require_inside(p, *through, "through set");
        if (through->contains(a)) throw GraphError("through set may not contain the origin");
    }
    require_inside(p, avoiding, "avoiding set");
    if (avoiding.contains(a)) throw GraphError("avoiding set may not contain the origin");

    if (!through) {
        // plain reachability: admissible steps only ever shrink the frontier
        VertexSet seen{a};
        std::vector<int> frontier{a};
        while (!frontier.empty()) {
            int u = frontier.back();
            frontier.pop_back();
            for (int v : p.adjacencies(u)) {
                if (seen.contains(v) || avoiding.contains(v) || !walkable(p, u, v)) continue;
                if (v == b) return true;
                seen.insert(v);
                frontier.push_back(v);
            }
        }
        return false;
    }

    // the through requirement is not monotone under path shortcuts, so
    // enumerate acyclic paths outright
    VertexSet on_path{a};
    std::function<bool(int, bool)> dfs = [&](int u, bool hit) {
        for (int v : p.adjacencies(u)) {
            if (on_path.contains(v) || avoiding.contains(v) || !walkable(p, u, v)) continue;
            bool now = hit || through->contains(v);
            if (v == b) {
                if (now) return true;
                continue;
            }
            on_path.insert(v);
            if (dfs(v, now)) return true;
            on_path.erase(v);
        }
        return false;
    };
    return dfs(a, false);
}

std::optional<CausalClaim> definite_cause(const Poipg& p, int a, int b) {
    require_vertex(p, a);
    require_vertex(p, b);
    if (a == b) throw GraphError("cause query needs two distinct endpoints");
    if (!exists_directed_path(p, a, b)) return std::nullopt;
    return CausalClaim{ClaimKind::DefiniteCause, 2, a, b, std::nullopt};
}

std::optional<CausalClaim> no_cause_either_way(const Poipg& p, int a, int b) {
    require_vertex(p, a);
    require_vertex(p, b);
    if (a == b) throw GraphError("cause query needs two distinct endpoints");
    if (!bidirected(p, a, b)) return std::nullopt;
    return CausalClaim{ClaimKind::NoCauseEitherWay, 3, a, b, std::nullopt};
}

std::optional<CausalClaim> latent_confounder(const Poipg& p, int a, int b) {
    require_vertex(p, a);
    require_vertex(p, b);
    if (a == b) throw GraphError("cause query needs two distinct endpoints");
    if (!bidirected(p, a, b)) return std::nullopt;
    return CausalClaim{ClaimKind::LatentConfounder, 3, a, b, std::nullopt};
}

std::vector<CausalClaim> blocking_claims(const Poipg& p, int a, int b, const VertexSet& c) {
    require_vertex(p, a);
    require_vertex(p, b);
    if (a == b) throw GraphError("path query needs two distinct endpoints");
    require_inside(p, c, "blocker set");
    if (c.contains(a) || c.contains(b))
        throw GraphError("blocker set may not contain an endpoint");

    std::vector<CausalClaim> out;
    if (!exists_semi_directed_path(p, a, b))
        out.push_back({ClaimKind::AllPathsHitS, 5, a, b, std::nullopt});
    if (!c.empty()) {
        if (!exists_semi_directed_path(p, a, b, c))
            out.push_back({ClaimKind::PathsThroughCHitS, 4, a, b, c});
        if (!exists_semi_directed_path(p, a, b, std::nullopt, c))
            out.push_back({ClaimKind::AllPathsHitSorC, 6, a, b, c});
    }
    return out;
}

}  // namespace poipg
