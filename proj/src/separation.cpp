#include "poipg/separation.hpp"

#include <algorithm>

namespace poipg {

CiStatement CiStatement::make(VertexSet x, VertexSet z, VertexSet y, bool independent) {
    if (x.empty() || z.empty()) throw CiError("x and z must be nonempty");
    if (x.intersects(z) || x.intersects(y) || z.intersects(y)) {
        VertexSet overlap = (x & z) | (x & y) | (z & y);
        std::string ids;
        for (int v : overlap) ids += (ids.empty() ? "" : ",") + std::to_string(v);
        throw CiError("sets overlap on {" + ids + "}");
    }
    if (x.min() > z.min()) std::swap(x, z);
    return CiStatement{x, z, y, independent};
}

CiSet::CiSet(std::vector<std::string> universe) : universe_(std::move(universe)) {
    if (universe_.size() > VertexSet::max_id) throw CiError("universe limited to 64 variables");
    for (std::size_t i = 0; i < universe_.size(); ++i) {
        if (universe_[i].empty()) throw CiError("variable name must be nonempty");
        for (std::size_t j = 0; j < i; ++j)
            if (universe_[i] == universe_[j]) throw CiError("duplicate variable name: " + universe_[i]);
    }
}

void CiSet::insert(VertexSet x, VertexSet z, VertexSet y) {
    VertexSet full = VertexSet::first_n(universe_size());
    if (!(x | z | y).subset_of(full)) throw CiError("statement mentions ids outside the universe");
    CiStatement s = CiStatement::make(x, z, y);
    auto it = std::lower_bound(stmts_.begin(), stmts_.end(), s);
    if (it != stmts_.end() && *it == s) return;
    stmts_.insert(it, s);
}

bool CiSet::contains(VertexSet x, VertexSet z, VertexSet y) const {
    CiStatement s = CiStatement::make(x, z, y);
    return std::binary_search(stmts_.begin(), stmts_.end(), s);
}

namespace detail {

// Reachability over (vertex, arrived-by-arrowhead) states. A state expands
// through a vertex exactly when the implied collider/non-collider pattern is
// legal under conditioning set y; colliders need a descendant in y.
bool d_separated_view(const DagView& g, std::uint64_t x, std::uint64_t z, std::uint64_t y) {
    if (x == 0 || z == 0) return true;
    // vertices with a descendant in y
    std::uint64_t can_collide = ancestors_mask(g, y);

    std::uint64_t via_arrow = 0;  // reached along an edge pointing at the vertex
    std::uint64_t via_tail = 0;   // reached along an edge leaving the vertex
    for (std::uint64_t f = x; f;) {
        int s = std::countr_zero(f);
        f &= f - 1;
        via_arrow |= g.children[s];
        via_tail |= g.parents[s];
    }
    for (;;) {
        if ((via_arrow | via_tail) & z) return false;
        // continue to a parent: needs the leaving edge to point at the vertex,
        // so arrival by arrowhead makes a collider, arrival by tail a non-collider
        std::uint64_t to_parents = (via_arrow & can_collide) | (via_tail & ~y);
        // continue to a child: the vertex is a non-collider either way
        std::uint64_t to_children = (via_arrow | via_tail) & ~y;
        std::uint64_t new_arrow = 0, new_tail = 0;
        for (std::uint64_t f = to_parents; f;) {
            int v = std::countr_zero(f);
            f &= f - 1;
            new_tail |= g.parents[v];
        }
        for (std::uint64_t f = to_children; f;) {
            int v = std::countr_zero(f);
            f &= f - 1;
            new_arrow |= g.children[v];
        }
        new_arrow &= ~via_arrow;
        new_tail &= ~via_tail;
        if (!new_arrow && !new_tail) return true;
        via_arrow |= new_arrow;
        via_tail |= new_tail;
    }
}

std::uint8_t inducing_orientations_view(const DagView& g, int a, int b) {
    std::uint64_t sel = 0, latent = 0;
    for (int v = 0; v < g.n; ++v) {
        if (g.roles[v] == Role::Selection) sel |= std::uint64_t{1} << v;
        if (g.roles[v] == Role::Latent) latent |= std::uint64_t{1} << v;
    }
    // interior colliders are legal when they have a descendant in {a, b} or the selection set
    std::uint64_t collider_ok =
        ancestors_mask(g, (std::uint64_t{1} << a) | (std::uint64_t{1} << b) | sel);
    std::uint64_t ends = (std::uint64_t{1} << a) | (std::uint64_t{1} << b);

    std::uint8_t classes = 0;
    for (int into_a = 0; into_a < 2; ++into_a) {
        // states never expand through a or b, so this walk reachability
        // matches acyclic-path existence class by class
        std::uint64_t via_arrow = into_a ? 0 : g.children[a];
        std::uint64_t via_tail = into_a ? g.parents[a] : 0;
        if (via_arrow & (std::uint64_t{1} << b)) classes |= static_cast<std::uint8_t>(1 << (into_a + 2));
        if (via_tail & (std::uint64_t{1} << b)) classes |= static_cast<std::uint8_t>(1 << into_a);
        for (;;) {
            std::uint64_t interior_arrow = via_arrow & ~ends;
            std::uint64_t interior_tail = via_tail & ~ends;
            std::uint64_t to_parents = (interior_arrow & collider_ok) | (interior_tail & latent);
            std::uint64_t to_children = (interior_arrow | interior_tail) & latent;
            std::uint64_t new_arrow = 0, new_tail = 0;
            for (std::uint64_t f = to_parents; f;) {
                int v = std::countr_zero(f);
                f &= f - 1;
                new_tail |= g.parents[v];
            }
            for (std::uint64_t f = to_children; f;) {
                int v = std::countr_zero(f);
                f &= f - 1;
                new_arrow |= g.children[v];
            }
            new_arrow &= ~via_arrow;
            new_tail &= ~via_tail;
            if (!new_arrow && !new_tail) break;
            via_arrow |= new_arrow;
            via_tail |= new_tail;
            if (new_arrow & (std::uint64_t{1} << b)) classes |= static_cast<std::uint8_t>(1 << (into_a + 2));
            if (new_tail & (std::uint64_t{1} << b)) classes |= static_cast<std::uint8_t>(1 << into_a);
        }
    }
    return classes;
}

}  // namespace detail

namespace {

void check_disjoint(const Dag& g, VertexSet x, VertexSet z, VertexSet y) {
    VertexSet all = VertexSet::first_n(g.vertex_count());
    if (!(x | z | y).subset_of(all)) {
        VertexSet bad = (x | z | y) - all;
        throw GraphError("unknown vertex id: " + std::to_string(bad.min()));
    }
    VertexSet overlap = (x & z) | (x & y) | (z & y);
    if (!overlap.empty()) {
        std::string names;
        for (int v : overlap) names += (names.empty() ? "" : ", ") + g.vertex(v).name;
        throw GraphError("sets overlap on {" + names + "}");
    }
}

}  // namespace

bool d_separated(const Dag& g, VertexSet x, VertexSet z, VertexSet y) {
    check_disjoint(g, x, z, y);
    return detail::d_separated_view(g.view(), x.bits(), z.bits(), y.bits());
}

bool observable_independent(const Dag& g, VertexSet x, VertexSet z, VertexSet y) {
    check_disjoint(g, x, z, y);
    VertexSet obs = g.observed();
    if (!(x | z | y).subset_of(obs)) {
        VertexSet bad = (x | z | y) - obs;
        throw GraphError("vertex " + g.vertex(bad.min()).name + " is " +
                         role_name(g.vertex(bad.min()).role) + ", not observed");
    }
    return detail::d_separated_view(g.view(), x.bits(), z.bits(), (y | g.selection()).bits());
}

bool is_inducing_path(const Dag& g, const Path& path, int a, int b) {
    if (!is_valid_path(g, path)) throw GraphError("not a valid path");
    if (path.vertices.size() < 2) throw GraphError("inducing path needs at least one edge");
    if (path.vertices.front() != a || path.vertices.back() != b)
        throw GraphError("path endpoints differ from (a, b)");
    if (g.vertex(a).role != Role::Observed || g.vertex(b).role != Role::Observed)
        throw GraphError("inducing path endpoints must be observed");
    VertexSet target = VertexSet{a, b} | g.selection();
    std::uint64_t good_collider = detail::ancestors_mask(g.view(), target.bits());
    for (std::size_t i = 1; i + 1 < path.vertices.size(); ++i) {
        int v = path.vertices[i];
        bool collider = g.has_edge(path.vertices[i - 1], v) && g.has_edge(path.vertices[i + 1], v);
        if (collider) {
            if (!(good_collider & (std::uint64_t{1} << v))) return false;
        } else {
            if (g.vertex(v).role != Role::Latent) return false;
        }
    }
    return true;
}

namespace {

void check_inducing_args(const Dag& g, int a, int b) {
    if (g.vertex(a).role != Role::Observed || g.vertex(b).role != Role::Observed)
        throw GraphError("inducing path endpoints must be observed");
    if (a == b) throw GraphError("inducing path endpoints must differ");
}

}  // namespace

bool exists_inducing_path(const Dag& g, int a, int b) {
    check_inducing_args(g, a, b);
    return detail::inducing_orientations_view(g.view(), a, b) != 0;
}

std::vector<InducingPathOrientation> inducing_path_orientations(const Dag& g, int a, int b) {
    check_inducing_args(g, a, b);
    std::uint8_t classes = detail::inducing_orientations_view(g.view(), a, b);
    std::vector<InducingPathOrientation> out;
    for (int into_b = 0; into_b < 2; ++into_b)
        for (int into_a = 0; into_a < 2; ++into_a)
            if (classes & (1 << (into_a + 2 * into_b)))
                out.push_back(InducingPathOrientation{into_a != 0, into_b != 0});
    std::sort(out.begin(), out.end());
    return out;
}

CiSet observable_ci_set(const Dag& g, int max_observed) {
    VertexSet obs = g.observed();
    int k = obs.size();
    if (k > max_observed)
        throw CiError("observable_ci_set over " + std::to_string(k) +
                      " observed variables exceeds the guard (" + std::to_string(max_observed) +
                      "); raise max_observed explicitly to confirm");
    std::vector<int> ids = obs.to_vector();  // universe index -> graph id
    std::vector<std::string> names;
    names.reserve(ids.size());
    for (int id : ids) names.push_back(g.vertex(id).name);
    CiSet out(std::move(names));

    auto to_graph = [&](std::uint64_t m) {
        std::uint64_t r = 0;
        for (std::uint64_t f = m; f;) {
            int i = std::countr_zero(f);
            f &= f - 1;
            r |= std::uint64_t{1} << ids[static_cast<std::size_t>(i)];
        }
        return r;
    };

    DagView view = g.view();
    std::uint64_t sel = g.selection().bits();
    std::uint64_t full = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
    for (std::uint64_t xm = full; xm; xm = (xm - 1) & full) {
        std::uint64_t rest = full & ~xm;
        for (std::uint64_t zm = rest; zm; zm = (zm - 1) & rest) {
            // canonical orientation only: lowest x member below lowest z member
            if (std::countr_zero(xm) > std::countr_zero(zm)) continue;
            std::uint64_t others = rest & ~zm;
            std::uint64_t ym = others;
            for (;;) {
                if (detail::d_separated_view(view, to_graph(xm), to_graph(zm), to_graph(ym) | sel))
                    out.insert(VertexSet::from_bits(xm), VertexSet::from_bits(zm), VertexSet::from_bits(ym));
                if (ym == 0) break;
                ym = (ym - 1) & others;
            }
        }
    }
    return out;
}

}  // namespace poipg
