#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "poipg/graph.hpp"
#include "poipg/vertex_set.hpp"

namespace poipg {

// One conditional-independence statement x _||_ z | y over a fixed universe.
// Canonical form: x and z swapped so that min(x) < min(z).
struct CiStatement {
    VertexSet x, z, y;
    bool independent = true;

    static CiStatement make(VertexSet x, VertexSet z, VertexSet y, bool independent = true);
    auto operator<=>(const CiStatement&) const = default;
};

// Complete list of independence statements over a named universe, read closed
// world: any disjoint triple not present is dependent.
class CiSet {
public:
    CiSet() = default;
    explicit CiSet(std::vector<std::string> universe);

    const std::vector<std::string>& universe() const { return universe_; }
    int universe_size() const { return static_cast<int>(universe_.size()); }

    void insert(VertexSet x, VertexSet z, VertexSet y);
    bool contains(VertexSet x, VertexSet z, VertexSet y) const;
    // sorted canonical statements, all with independent == true
    const std::vector<CiStatement>& statements() const { return stmts_; }

    friend bool operator==(const CiSet& a, const CiSet& b) = default;

private:
    std::vector<std::string> universe_;
    std::vector<CiStatement> stmts_;
};

// Standard d-separation: every undirected path between x and z is blocked by y.
// Sets must be pairwise disjoint; any roles allowed; empty x or z is trivially true.
bool d_separated(const Dag& g, VertexSet x, VertexSet z, VertexSet y);

// d-separation with the full selection set silently added to the conditioning
// side; x, z, y must be observed
bool observable_independent(const Dag& g, VertexSet x, VertexSet z, VertexSet y);

// True when every collider on the path has a descendant in {a, b} or the
// selection set and every interior non-collider is latent. Endpoints must be
// observed and equal the ends of the path.
bool is_inducing_path(const Dag& g, const Path& path, int a, int b);

struct InducingPathOrientation {
    bool into_a, into_b;
    auto operator<=>(const InducingPathOrientation&) const = default;
};

bool exists_inducing_path(const Dag& g, int a, int b);
// the distinct (into_a, into_b) patterns over all inducing paths, sorted
std::vector<InducingPathOrientation> inducing_path_orientations(const Dag& g, int a, int b);

// Every observable statement the graph entails, over the observed vertices.
// Statement indices are positions in the returned universe (observed vertices
// in ascending id order), not raw graph ids. Guarded against blowup: raise
// max_observed explicitly for more than 8 observed variables.
CiSet observable_ci_set(const Dag& g, int max_observed = 8);

namespace detail {
bool d_separated_view(const DagView& g, std::uint64_t x, std::uint64_t z, std::uint64_t y);
// orientation classes as a 4-bit mask, bit index = into_a + 2*into_b
std::uint8_t inducing_orientations_view(const DagView& g, int a, int b);
}  // namespace detail

}  // namespace poipg
