#pragma once

#include <string>

#include "poipg/graph.hpp"
#include "poipg/oracle.hpp"
#include "poipg/separation.hpp"

namespace poipg {

// JSON: {"variables": [{"name": ..., "role": ...}], "edges": [[parent, child]]}
Dag parse_graph(const std::string& text);
std::string emit_graph(const Dag& g);

// JSON: {"variables": [...], "edges": [{"a", "b", "mark_a", "mark_b"}],
//        "noncolliders": [[x, y, z]]}
Poipg parse_poipg(const std::string& text);
std::string emit_poipg(const Poipg& p);

// Line format: `indep X1,X2 ; Z ; Y` with `-` for an empty conditioning set
// and `#` comments. An optional leading `vars A,B,...` line fixes the
// variable order; otherwise mentioned names are taken in sorted order.
CiSet parse_ci(const std::string& text);
std::string emit_ci(const CiSet& s);

// Comma-separated values with a header row; every column needs a preceding
// `#arity name=k` line. Other `#` lines are comments.
Dataset parse_csv(const std::string& text);

// Deterministic rendering with both endpoint decorations spelled out.
std::string emit_dot(const Poipg& p);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace poipg
