#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "poipg/graph.hpp"
#include "poipg/oracle.hpp"
#include "poipg/vertex_set.hpp"

namespace poipg {

// Separating sets found during edge removal; the first entry recorded for an
// unordered pair wins and later entries are ignored.
class SepsetTable {
public:
    void record(int a, int b, VertexSet y);
    std::optional<VertexSet> lookup(int a, int b) const;
    bool contains(int a, int b) const;
    // sorted (a, b, y) with a < b
    std::vector<std::tuple<int, int, VertexSet>> entries() const;

private:
    std::map<std::pair<int, int>, VertexSet> table_;
};

enum class ConflictPolicy { FailFast, WarnKeepFirst };

struct FciConfig {
    // cap on conditioning set sizes in both removal phases; unset = unbounded
    std::optional<int> max_cond_size;
    ConflictPolicy conflict_policy = ConflictPolicy::FailFast;
    // consumed by pipelines that start from a graph source: merge all
    // selection vertices before building the oracle
    bool collapse_selection = false;
};

enum class FciEventKind { EdgeRemoved, ColliderOriented, RuleFired, Conflict };
enum class FciPhase { Adjacency, PossibleDsep };

struct FciEvent {
    FciEventKind kind;
    // EdgeRemoved: (a, b); ColliderOriented: triple (a, c, b) with middle c;
    // RuleFired: mark placed at the b end of edge (a, b)
    int a = -1, b = -1, c = -1;
    VertexSet sepset;
    FciPhase phase = FciPhase::Adjacency;
    std::string rule;
    EndpointMark mark = EndpointMark::Circle;
    std::string note;
};

struct FciTrace {
    std::vector<std::string> universe;
    std::vector<FciEvent> events;

    // one line per event: "removed A B sepset=C phase=adjacency",
    // "collider A C B", "rule R1 C D arrow", "conflict <note>"
    std::vector<std::string> lines() const;
};

struct FciResult {
    Poipg graph;
    SepsetTable sepsets;
    FciTrace trace;
};

// Vertices other than a reachable from a along a path whose every interior
// vertex is either a collider on the path or has adjacent path neighbors.
// Exact path search: exponential on dense pathological graphs.
VertexSet possible_d_sep(const Poipg& g, int a, int b);

// For every unshielded triple <a, c, b> with a recorded separating set: orient
// the c-side marks of both edges to arrows when c is outside the set, record
// the triple as a noncollider when c is inside. Returns the emitted events.
std::vector<FciEvent> orient_colliders(Poipg& g, const SepsetTable& sepsets,
                                       ConflictPolicy policy = ConflictPolicy::FailFast);

// Runs the four orientation rules to a fixed point in a deterministic sweep
// order. Rules fire only onto circle marks; a demand to overwrite a tail or
// arrow is a conflict.
std::vector<FciEvent> apply_orientation_rules(Poipg& g, const SepsetTable& sepsets,
                                              ConflictPolicy policy = ConflictPolicy::FailFast);

// Constraint-based search over the oracle's universe: complete graph, edge
// removal by adjacency subsets, collider orientation, removal retest over
// possible-d-sep sets, final orientation.
FciResult fci(const CiOracle& oracle, const FciConfig& config = {});

// Reapplies the trace to a fresh complete graph; reproduces the searched
// graph exactly, including noncolliders, without consulting any oracle.
Poipg replay_trace(const FciTrace& trace);

}  // namespace poipg
