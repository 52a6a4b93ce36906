#include "poipg/graph.hpp"

#include <algorithm>
#include <queue>

namespace poipg {

const char* role_name(Role r) {
    switch (r) {
        case Role::Observed: return "observed";
        case Role::Latent: return "latent";
        case Role::Selection: return "selection";
    }
    throw GraphError("unknown role");
}

int Dag::add_vertex(std::string name, Role role) {
    if (name.empty()) throw GraphError("vertex name must be nonempty");
    if (find_vertex(name)) throw GraphError("duplicate vertex name: " + name);
    if (vertex_count() >= VertexSet::max_id)
        throw GraphError("graph limited to 64 vertices");
    int id = vertex_count();
    vars_.push_back(Variable{id, std::move(name), role});
    parents_.push_back(0);
    children_.push_back(0);
    roles_.push_back(role);
    return id;
}

void Dag::add_edge(int parent, int child) {
    check_vertex(parent);
    check_vertex(child);
    if (parent == child)
        throw GraphError("self-loop on " + vars_[static_cast<std::size_t>(parent)].name);
    if (has_edge(parent, child))
        throw GraphError("duplicate edge " + vars_[static_cast<std::size_t>(parent)].name + " -> " +
                         vars_[static_cast<std::size_t>(child)].name);
    // a cycle appears exactly when parent is already reachable from child
    std::uint64_t reach = detail::descendants_mask(view(), std::uint64_t{1} << child);
    if (reach & (std::uint64_t{1} << parent))
        throw GraphError("edge " + vars_[static_cast<std::size_t>(parent)].name + " -> " +
                         vars_[static_cast<std::size_t>(child)].name + " would create a cycle");
    parents_[static_cast<std::size_t>(child)] |= std::uint64_t{1} << parent;
    children_[static_cast<std::size_t>(parent)] |= std::uint64_t{1} << child;
    ++edge_count_;
}

const Variable& Dag::vertex(int id) const {
    check_vertex(id);
    return vars_[static_cast<std::size_t>(id)];
}

std::optional<int> Dag::find_vertex(std::string_view name) const {
    for (const Variable& v : vars_)
        if (v.name == name) return v.id;
    return std::nullopt;
}

bool Dag::has_edge(int parent, int child) const {
    check_vertex(parent);
    check_vertex(child);
    return (parents_[static_cast<std::size_t>(child)] & (std::uint64_t{1} << parent)) != 0;
}

std::vector<std::pair<int, int>> Dag::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(edge_count_));
    for (int p = 0; p < vertex_count(); ++p)
        for (int c : VertexSet::from_bits(children_[static_cast<std::size_t>(p)]))
            out.emplace_back(p, c);
    return out;
}

VertexSet Dag::parent_set(int v) const {
    check_vertex(v);
    return VertexSet::from_bits(parents_[static_cast<std::size_t>(v)]);
}

VertexSet Dag::child_set(int v) const {
    check_vertex(v);
    return VertexSet::from_bits(children_[static_cast<std::size_t>(v)]);
}

VertexSet Dag::role_set(Role r) const {
    VertexSet s;
    for (const Variable& v : vars_)
        if (v.role == r) s.insert(v.id);
    return s;
}

void Dag::check_vertex(int v) const {
    if (v < 0 || v >= vertex_count())
        throw GraphError("unknown vertex id: " + std::to_string(v));
}

bool operator==(const Dag& a, const Dag& b) {
    if (a.vertex_count() != b.vertex_count() || a.edge_count_ != b.edge_count_) return false;
    for (int i = 0; i < a.vertex_count(); ++i) {
        const auto& va = a.vars_[static_cast<std::size_t>(i)];
        const auto& vb = b.vars_[static_cast<std::size_t>(i)];
        if (va.name != vb.name || va.role != vb.role) return false;
        if (a.parents_[static_cast<std::size_t>(i)] != b.parents_[static_cast<std::size_t>(i)]) return false;
    }
    return true;
}

VertexSet parents(const Dag& g, int v) { return g.parent_set(v); }

VertexSet descendants(const Dag& g, int v) {
    g.vertex(v);
    return VertexSet::from_bits(detail::descendants_mask(g.view(), std::uint64_t{1} << v));
}

VertexSet ancestors(const Dag& g, int v) {
    g.vertex(v);
    return VertexSet::from_bits(detail::ancestors_mask(g.view(), std::uint64_t{1} << v));
}

std::vector<int> topological_order(const Dag& g) {
    int n = g.vertex_count();
    std::vector<int> indegree(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) indegree[static_cast<std::size_t>(v)] = g.parent_set(v).size();
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < n; ++v)
        if (indegree[static_cast<std::size_t>(v)] == 0) ready.push(v);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    while (!ready.empty()) {
        int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : g.child_set(v))
            if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
    return order;
}

bool is_valid_path(const Dag& g, const Path& p) {
    if (p.vertices.empty()) return false;
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        int v = p.vertices[i];
        if (v < 0 || v >= g.vertex_count()) return false;
        if (seen & (std::uint64_t{1} << v)) return false;
        seen |= std::uint64_t{1} << v;
        if (i > 0) {
            int u = p.vertices[i - 1];
            if (!g.has_edge(u, v) && !g.has_edge(v, u)) return false;
        }
    }
    return true;
}

bool is_collider_on(const Dag& g, const Path& p, int v) {
    if (!is_valid_path(g, p)) throw GraphError("not a valid path");
    auto it = std::find(p.vertices.begin(), p.vertices.end(), v);
    if (it == p.vertices.end()) throw GraphError("vertex not on path: " + std::to_string(v));
    if (it == p.vertices.begin() || it + 1 == p.vertices.end())
        throw GraphError("collider status undefined for path endpoint " + g.vertex(v).name);
    int prev = *(it - 1);
    int next = *(it + 1);
    return g.has_edge(prev, v) && g.has_edge(next, v);
}

Dag collapse_selection(const Dag& g) {
    VertexSet sel = g.selection();
    if (sel.size() <= 1) return g;
    Dag out;
    std::vector<int> remap(static_cast<std::size_t>(g.vertex_count()), -1);
    for (const Variable& v : g.vertices())
        if (v.role != Role::Selection)
            remap[static_cast<std::size_t>(v.id)] = out.add_vertex(v.name, v.role);
    if (g.find_vertex("S") && !sel.contains(*g.find_vertex("S")))
        throw GraphError("cannot collapse: name S already taken by a non-selection vertex");
    int s = out.add_vertex("S", Role::Selection);
    for (int v : sel) remap[static_cast<std::size_t>(v)] = s;
    for (auto [p, c] : g.edges()) {
        int np = remap[static_cast<std::size_t>(p)];
        int nc = remap[static_cast<std::size_t>(c)];
        if (np == nc)
            throw GraphError("cannot collapse: edge between two selection vertices");
        if (!out.has_edge(np, nc)) out.add_edge(np, nc);  // throws if the merge makes a cycle
    }
    return out;
}

namespace detail {

std::uint64_t descendants_mask(const DagView& g, std::uint64_t seeds) {
    std::uint64_t reach = seeds;
    std::uint64_t frontier = seeds;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::uint64_t f = frontier; f;) {
            int v = std::countr_zero(f);
            f &= f - 1;
            next |= g.children[v];
        }
        frontier = next & ~reach;
        reach |= next;
    }
    return reach;
}

std::uint64_t ancestors_mask(const DagView& g, std::uint64_t seeds) {
    std::uint64_t reach = seeds;
    std::uint64_t frontier = seeds;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::uint64_t f = frontier; f;) {
            int v = std::countr_zero(f);
            f &= f - 1;
            next |= g.parents[v];
        }
        frontier = next & ~reach;
        reach |= next;
    }
    return reach;
}

}  // namespace detail

char mark_symbol(EndpointMark m) {
    switch (m) {
        case EndpointMark::Tail: return '-';
        case EndpointMark::Arrow: return '>';
        case EndpointMark::Circle: return 'o';
    }
    throw GraphError("unknown endpoint mark");
}

const char* mark_name(EndpointMark m) {
    switch (m) {
        case EndpointMark::Tail: return "tail";
        case EndpointMark::Arrow: return "arrow";
        case EndpointMark::Circle: return "circle";
    }
    throw GraphError("unknown endpoint mark");
}

Poipg::Poipg(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > VertexSet::max_id) throw GraphError("graph limited to 64 vertices");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw GraphError("vertex name must be nonempty");
        for (std::size_t j = 0; j < i; ++j)
            if (names_[i] == names_[j]) throw GraphError("duplicate vertex name: " + names_[i]);
    }
    marks_.assign(names_.size() * names_.size(), 0);
    adj_.assign(names_.size(), 0);
}

std::optional<int> Poipg::find_vertex(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

namespace {
bool legal_mark_pair(EndpointMark a, EndpointMark b) {
    if (a == EndpointMark::Arrow || b == EndpointMark::Arrow) return true;
    // tail-tail, tail-circle, circle-tail never appear; circle-circle does
    return a == EndpointMark::Circle && b == EndpointMark::Circle;
}
}  // namespace

void Poipg::add_edge(int a, int b, EndpointMark at_a, EndpointMark at_b) {
    check_vertex(a);
    check_vertex(b);
    if (a == b) throw GraphError("self-loop on " + names_[static_cast<std::size_t>(a)]);
    if (adjacent(a, b))
        throw GraphError("duplicate edge " + names_[static_cast<std::size_t>(a)] + " " +
                         names_[static_cast<std::size_t>(b)]);
    if (!legal_mark_pair(at_a, at_b))
        throw GraphError(std::string("illegal endpoint pair ") + mark_name(at_a) + "/" + mark_name(at_b) +
                         " on edge " + names_[static_cast<std::size_t>(a)] + " " + names_[static_cast<std::size_t>(b)]);
    cell(a, b) = static_cast<std::uint8_t>(static_cast<int>(at_b) + 1);
    cell(b, a) = static_cast<std::uint8_t>(static_cast<int>(at_a) + 1);
    adj_[static_cast<std::size_t>(a)] |= std::uint64_t{1} << b;
    adj_[static_cast<std::size_t>(b)] |= std::uint64_t{1} << a;
    ++edge_count_;
}

void Poipg::set_end_mark(int a, int b, EndpointMark m) {
    EndpointMark at_a = end_mark(b, a);
    if (!legal_mark_pair(at_a, m))
        throw GraphError(std::string("illegal endpoint pair ") + mark_name(at_a) + "/" +
                         mark_name(m) + " on edge " + names_[static_cast<std::size_t>(a)] + " " +
                         names_[static_cast<std::size_t>(b)]);
    cell(a, b) = static_cast<std::uint8_t>(static_cast<int>(m) + 1);
}

void Poipg::set_edge_marks(int a, int b, EndpointMark at_a, EndpointMark at_b) {
    if (!adjacent(a, b))
        throw GraphError("no edge " + names_[static_cast<std::size_t>(a)] + " " +
                         names_[static_cast<std::size_t>(b)]);
    if (!legal_mark_pair(at_a, at_b))
        throw GraphError(std::string("illegal endpoint pair ") + mark_name(at_a) + "/" +
                         mark_name(at_b) + " on edge " + names_[static_cast<std::size_t>(a)] + " " +
                         names_[static_cast<std::size_t>(b)]);
    cell(a, b) = static_cast<std::uint8_t>(static_cast<int>(at_b) + 1);
    cell(b, a) = static_cast<std::uint8_t>(static_cast<int>(at_a) + 1);
}

void Poipg::remove_edge(int a, int b) {
    if (!adjacent(a, b))
        throw GraphError("no edge " + names_[static_cast<std::size_t>(a)] + " " +
                         names_[static_cast<std::size_t>(b)]);
    cell(a, b) = 0;
    cell(b, a) = 0;
    adj_[static_cast<std::size_t>(a)] &= ~(std::uint64_t{1} << b);
    adj_[static_cast<std::size_t>(b)] &= ~(std::uint64_t{1} << a);
    --edge_count_;
    int lo = std::min(a, b), hi = std::max(a, b);
    std::erase_if(noncolliders_, [&](const NoncolliderTriple& t) {
        bool left = t.x == lo && t.y == hi;
        bool right = t.y == lo && t.z == hi;
        bool left2 = t.x == hi && t.y == lo;
        bool right2 = t.y == hi && t.z == lo;
        return left || right || left2 || right2;
    });
}

bool Poipg::adjacent(int a, int b) const {
    check_vertex(a);
    check_vertex(b);
    return a != b && cell(a, b) != 0;
}

EndpointMark Poipg::end_mark(int a, int b) const {
    if (!adjacent(a, b))
        throw GraphError("no edge " + names_[static_cast<std::size_t>(a)] + " " + names_[static_cast<std::size_t>(b)]);
    return static_cast<EndpointMark>(cell(a, b) - 1);
}

std::vector<PoipgEdge> Poipg::edges() const {
    std::vector<PoipgEdge> out;
    out.reserve(static_cast<std::size_t>(edge_count_));
    int n = vertex_count();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (cell(a, b) != 0)
                out.push_back(PoipgEdge{a, b, static_cast<EndpointMark>(cell(b, a) - 1),
                                        static_cast<EndpointMark>(cell(a, b) - 1)});
    return out;
}

VertexSet Poipg::adjacencies(int v) const {
    check_vertex(v);
    return VertexSet::from_bits(adj_[static_cast<std::size_t>(v)]);
}

void Poipg::add_noncollider(int x, int y, int z) {
    if (x == z) throw GraphError("noncollider endpoints coincide");
    if (!adjacent(x, y) || !adjacent(y, z))
        throw GraphError("noncollider triple must ride on two edges");
    NoncolliderTriple t{std::min(x, z), y, std::max(x, z)};
    auto it = std::lower_bound(noncolliders_.begin(), noncolliders_.end(), t);
    if (it != noncolliders_.end() && *it == t) return;
    noncolliders_.insert(it, t);
}

bool operator==(const Poipg& a, const Poipg& b) {
    return a.names_ == b.names_ && a.marks_ == b.marks_ && a.noncolliders_ == b.noncolliders_;
}

void Poipg::check_vertex(int v) const {
    if (v < 0 || v >= vertex_count())
        throw GraphError("unknown vertex id: " + std::to_string(v));
}

std::uint8_t& Poipg::cell(int a, int b) {
    return marks_[static_cast<std::size_t>(a) * names_.size() + static_cast<std::size_t>(b)];
}

std::uint8_t Poipg::cell(int a, int b) const {
    return marks_[static_cast<std::size_t>(a) * names_.size() + static_cast<std::size_t>(b)];
}

}  // namespace poipg
