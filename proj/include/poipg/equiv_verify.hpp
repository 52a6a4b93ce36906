#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poipg/graph.hpp"
#include "poipg/separation.hpp"

namespace poipg {

enum class EdgeConstraint { None, SelectionSinks };

// Bounded stand-in for the infinite class of generating structures: every
// latent count up to max_latent crossed with every selection count up to
// max_selection.
struct EnumBounds {
    int n_observed = 1;
    int max_latent = 0;
    int max_selection = 0;
    EdgeConstraint constraint = EdgeConstraint::None;
};

// Every labeled acyclic graph within the bounds, each exactly once, in a fixed
// deterministic order. Observed vertices default to names A, B, C, ...
void enumerate_dags(const EnumBounds& b, const std::function<void(const Dag&)>& fn);
void enumerate_dags(const EnumBounds& b, const std::vector<std::string>& observed_names,
                    const std::function<void(const Dag&)>& fn);

// Every enumerated graph whose observable independence facts close to exactly
// the given set. Streaming form avoids holding large classes in memory.
void for_each_equiv_member(const CiSet& cond, const EnumBounds& b,
                           const std::function<void(const Dag&)>& fn);
std::vector<Dag> equiv_members(const CiSet& cond, const EnumBounds& b);

struct CheckResult {
    std::string condition;
    bool pass = true;
    std::optional<Dag> counterexample;  // first failing member
};

struct VerificationReport {
    std::uint64_t class_size = 0;
    std::vector<CheckResult> checks;
    std::chrono::duration<double> elapsed{};

    bool all_pass() const;
    // stable line rendering; timing deliberately left out
    std::vector<std::string> lines() const;
};

std::string describe_dag(const Dag& g);

// Checks every adjacency, endpoint mark, non-collider triple, and derivable
// causal claim of p against each member structure.
VerificationReport verify_poipg(const Poipg& p, const std::vector<Dag>& members);
VerificationReport verify_equiv(const Poipg& p, const CiSet& cond, const EnumBounds& b);

}  // namespace poipg
