#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poipg/graph.hpp"
#include "poipg/vertex_set.hpp"

namespace poipg {

enum class ClaimKind {
    DefiniteCause,
    NoCauseEitherWay,
    LatentConfounder,
    AllPathsHitS,
    AllPathsHitSorC,
    PathsThroughCHitS,
};

std::string to_string(ClaimKind k);

// A statement that holds in every generating structure compatible with the
// partially oriented graph it was read from.
struct CausalClaim {
    ClaimKind kind;
    int theorem;  // 2..6
    int subject;
    int object;
    std::optional<VertexSet> blocker;  // present iff the claim is relative to a vertex set

    std::string line(const std::vector<std::string>& names) const;
    bool operator==(const CausalClaim&) const = default;
};

// True iff a path from a to b uses only edges with Tail at the near end and
// Arrow at the far end. a == b counts as a trivial path.
bool exists_directed_path(const Poipg& p, int a, int b);

// True iff an acyclic path from a to b carries no Arrow at any edge end nearer
// a, touches `through` when given, and stays clear of `avoiding`.
bool exists_semi_directed_path(const Poipg& p, int a, int b,
                               const std::optional<VertexSet>& through = std::nullopt,
                               const VertexSet& avoiding = {});

// In every compatible structure a directed path a to b exists and a has no
// descendant among the selection vertices.
std::optional<CausalClaim> definite_cause(const Poipg& p, int a, int b);

// For a bidirected edge: neither vertex causes the other in any compatible
// structure, and every compatible structure hides a latent variable.
std::optional<CausalClaim> no_cause_either_way(const Poipg& p, int a, int b);
std::optional<CausalClaim> latent_confounder(const Poipg& p, int a, int b);

// Path-exclusion claims, emitted strongest first: every directed a-to-b path
// hits a selection vertex; every such path through c hits a selection vertex;
// every such path hits a selection vertex or c.
std::vector<CausalClaim> blocking_claims(const Poipg& p, int a, int b, const VertexSet& c);

}  // namespace poipg
