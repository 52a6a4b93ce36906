#pragma once

// Brute-force inducing path search: enumerate every simple path between a
// and b and run each through the definition checker. Exponential, only for
// the small graphs used in tests; cross-checks the memoized reachability
// search.

#include <set>
#include <vector>

#include "poipg/graph.hpp"
#include "poipg/separation.hpp"

namespace testutil {

inline std::vector<poipg::InducingPathOrientation> brute_inducing_orientations(
    const poipg::Dag& g, int a, int b) {
    std::set<poipg::InducingPathOrientation> found;
    std::vector<int> cur{a};
    std::vector<bool> used(g.vertex_count(), false);
    used[a] = true;
    auto walk = [&](auto&& self, int v) -> void {
        if (v == b) {
            poipg::Path p{cur};
            if (poipg::is_inducing_path(g, p, a, b)) {
                bool into_a = g.has_edge(p.vertices[1], a);
                bool into_b = g.has_edge(p.vertices[p.vertices.size() - 2], b);
                found.insert({into_a, into_b});
            }
            return;
        }
        for (int w = 0; w < g.vertex_count(); ++w) {
            if (used[w]) continue;
            if (!g.has_edge(v, w) && !g.has_edge(w, v)) continue;
            used[w] = true;
            cur.push_back(w);
            self(self, w);
            cur.pop_back();
            used[w] = false;
        }
    };
    walk(walk, a);
    return {found.begin(), found.end()};
}

}  // namespace testutil
