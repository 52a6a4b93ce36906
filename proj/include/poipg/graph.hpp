#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poipg/errors.hpp"
#include "poipg/vertex_set.hpp"

namespace poipg {

enum class Role { Observed, Latent, Selection };

const char* role_name(Role r);

struct Variable {
    int id;
    std::string name;
    Role role;
};

// Non-owning snapshot used by hot loops; pointers stay valid while the owner does.
struct DagView {
    int n = 0;
    const std::uint64_t* parents = nullptr;   // parents[v] = bitmask of direct parents
    const std::uint64_t* children = nullptr;  // children[v] = bitmask of direct children
    const Role* roles = nullptr;

    VertexSet role_set(Role r) const {
        VertexSet s;
        for (int v = 0; v < n; ++v)
            if (roles[v] == r) s.insert(v);
        return s;
    }
};

// Directed acyclic graph over at most 64 vertices, each tagged observed,
// latent, or selection. Mutation is only valid during an initial build phase;
// every algorithm takes the graph by const reference.
class Dag {
public:
    Dag() = default;

    // returns the new vertex id (dense, starting at 0)
    int add_vertex(std::string name, Role role);
    // throws GraphError on self-loops, duplicates, and edges that close a cycle
    void add_edge(int parent, int child);

    int vertex_count() const { return static_cast<int>(vars_.size()); }
    int edge_count() const { return edge_count_; }
    const Variable& vertex(int id) const;
    const std::vector<Variable>& vertices() const { return vars_; }
    std::optional<int> find_vertex(std::string_view name) const;

    bool has_edge(int parent, int child) const;
    // sorted by (parent, child)
    std::vector<std::pair<int, int>> edges() const;
    VertexSet parent_set(int v) const;
    VertexSet child_set(int v) const;

    VertexSet role_set(Role r) const;
    VertexSet observed() const { return role_set(Role::Observed); }
    VertexSet latent() const { return role_set(Role::Latent); }
    VertexSet selection() const { return role_set(Role::Selection); }

    DagView view() const {
        return DagView{vertex_count(), parents_.data(), children_.data(), roles_.data()};
    }

    friend bool operator==(const Dag& a, const Dag& b);

private:
    void check_vertex(int v) const;

    std::vector<Variable> vars_;
    std::vector<std::uint64_t> parents_;
    std::vector<std::uint64_t> children_;
    std::vector<Role> roles_;
    int edge_count_ = 0;
};

VertexSet parents(const Dag& g, int v);
// descendants and ancestors are reflexive: v is always a member of its own set
VertexSet descendants(const Dag& g, int v);
VertexSet ancestors(const Dag& g, int v);
// Kahn's algorithm, smallest ready id first; the result is unique under that tie-break
std::vector<int> topological_order(const Dag& g);

// Undirected path through a graph: consecutive vertices adjacent, no repeats.
struct Path {
    std::vector<int> vertices;
};

bool is_valid_path(const Dag& g, const Path& p);
// v interior with both path edges pointing into it; endpoints are an error
bool is_collider_on(const Dag& g, const Path& p, int v);

// Merges every selection vertex into a single one named "S". Useful when all
// selection variables are known to fire together. Throws if the merge would
// create a cycle.
Dag collapse_selection(const Dag& g);

namespace detail {
// vertices reachable from seeds along child edges, seeds included
std::uint64_t descendants_mask(const DagView& g, std::uint64_t seeds);
// vertices that reach some seed along child edges, seeds included
std::uint64_t ancestors_mask(const DagView& g, std::uint64_t seeds);
}  // namespace detail

enum class EndpointMark { Tail, Arrow, Circle };

// '-', '>', 'o'
char mark_symbol(EndpointMark m);
const char* mark_name(EndpointMark m);

struct PoipgEdge {
    int a, b;  // a < b
    EndpointMark at_a, at_b;
};

struct NoncolliderTriple {
    int x, y, z;  // y is the middle vertex; x < z
    auto operator<=>(const NoncolliderTriple&) const = default;
};

// Partially oriented inducing path graph over observed variables: at most one
// edge per pair, each endpoint marked tail, arrow, or circle, plus the triples
// known not to be colliders.
class Poipg {
public:
    Poipg() = default;
    explicit Poipg(std::vector<std::string> names);

    int vertex_count() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<int> find_vertex(std::string_view name) const;

    // legal mark pairs: tail-arrow, circle-arrow, arrow-arrow, circle-circle
    void add_edge(int a, int b, EndpointMark at_a, EndpointMark at_b);
    // rewrites the mark at the b end; the resulting pair must stay legal
    void set_end_mark(int a, int b, EndpointMark m);
    void set_edge_marks(int a, int b, EndpointMark at_a, EndpointMark at_b);
    // drops the edge together with any noncollider triple riding on it
    void remove_edge(int a, int b);
    bool adjacent(int a, int b) const;
    // the mark at the b end of the a-b edge
    EndpointMark end_mark(int a, int b) const;
    int edge_count() const { return edge_count_; }
    std::vector<PoipgEdge> edges() const;
    VertexSet adjacencies(int v) const;

    // both (x,y) and (y,z) must be edges; stored with x < z
    void add_noncollider(int x, int y, int z);
    const std::vector<NoncolliderTriple>& noncolliders() const { return noncolliders_; }

    friend bool operator==(const Poipg& a, const Poipg& b);

private:
    void check_vertex(int v) const;
    std::uint8_t& cell(int a, int b);
    std::uint8_t cell(int a, int b) const;

    std::vector<std::string> names_;
    std::vector<std::uint8_t> marks_;  // marks_[a*n+b]: 0 = no edge, else mark at b + 1
    std::vector<std::uint64_t> adj_;
    std::vector<NoncolliderTriple> noncolliders_;  // sorted, unique
    int edge_count_ = 0;
};

}  // namespace poipg
