#pragma once

// Independent d-separation oracle used to cross-check the reachability
// implementation: restrict to the ancestral closure of x, z, y, moralize,
// and test undirected separation. Deliberately written with different
// data structures (adjacency matrices, explicit BFS queue) than the
// library's frontier propagation.

#include <queue>
#include <vector>

#include "poipg/graph.hpp"
#include "poipg/vertex_set.hpp"

namespace testutil {

inline bool moral_d_separated(const poipg::Dag& g, poipg::VertexSet x, poipg::VertexSet z,
                              poipg::VertexSet y) {
    int n = g.vertex_count();
    poipg::VertexSet keep =
        poipg::VertexSet::from_bits(poipg::detail::ancestors_mask(g.view(), (x | z | y).bits()));
    std::vector<std::vector<bool>> und(n, std::vector<bool>(n, false));
    for (auto [p, c] : g.edges()) {
        if (keep.contains(p) && keep.contains(c)) und[p][c] = und[c][p] = true;
    }
    // marry parents of every retained vertex
    for (int v : keep) {
        auto ps = g.parent_set(v);
        for (int p1 : ps)
            for (int p2 : ps)
                if (p1 != p2 && keep.contains(p1) && keep.contains(p2)) und[p1][p2] = true;
    }
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    for (int v : x) {
        q.push(v);
        seen[v] = true;
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (z.contains(v)) return false;
        for (int w = 0; w < n; ++w) {
            if (und[v][w] && !seen[w] && !y.contains(w) && keep.contains(w)) {
                seen[w] = true;
                q.push(w);
            }
        }
    }
    return true;
}

}  // namespace testutil
