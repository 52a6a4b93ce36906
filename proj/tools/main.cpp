#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poipg/causal_queries.hpp"
#include "poipg/equiv_verify.hpp"
#include "poipg/errors.hpp"
#include "poipg/fci.hpp"
#include "poipg/io.hpp"
#include "poipg/oracle.hpp"
#include "poipg/separation.hpp"

using namespace poipg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitNoClaim = 3;
constexpr int kExitDataError = 4;

int resolve(const Poipg& p, const std::string& name) {
    if (auto id = p.find_vertex(name)) return *id;
    throw GraphError("unknown variable \"" + name + "\"");
}

int resolve(const Dag& g, const std::string& name) {
    if (auto id = g.find_vertex(name)) return *id;
    throw GraphError("unknown variable \"" + name + "\"");
}

template <typename G>
VertexSet resolve_all(const G& g, const std::vector<std::string>& names) {
    VertexSet s;
    for (const std::string& n : names) s.insert(resolve(g, n));
    return s;
}

// "A o-> C": mirrored mark symbol at the left end, plain at the right
std::string edge_text(const Poipg& p, const PoipgEdge& e) {
    auto left = [](EndpointMark m) {
        switch (m) {
            case EndpointMark::Tail: return '-';
            case EndpointMark::Arrow: return '<';
            case EndpointMark::Circle: return 'o';
        }
        return '?';
    };
    std::string out = p.names()[static_cast<std::size_t>(e.a)];
    out += ' ';
    out += left(e.at_a);
    out += '-';
    out += mark_symbol(e.at_b);
    out += ' ';
    out += p.names()[static_cast<std::size_t>(e.b)];
    return out;
}

void print_poipg(std::ostream& os, const Poipg& p) {
    for (const PoipgEdge& e : p.edges()) os << edge_text(p, e) << "\n";
    for (const NoncolliderTriple& t : p.noncolliders())
        os << "noncollider " << p.names()[static_cast<std::size_t>(t.x)] << " "
           << p.names()[static_cast<std::size_t>(t.y)] << " "
           << p.names()[static_cast<std::size_t>(t.z)] << "\n";
}

struct DiscoverArgs {
    std::string graph_path, ci_path, data_path;
    double alpha = 0.05;
    int max_cond = 0;
    bool max_cond_set = false;
    std::string policy;
    std::string out_path, dot_path, trace_path;
};

int run_discover(const DiscoverArgs& a) {
    std::shared_ptr<CiOracle> oracle;
    FciConfig cfg;
    if (!a.graph_path.empty()) {
        oracle = graphical_oracle(parse_graph(read_file(a.graph_path)));
    } else if (!a.ci_path.empty()) {
        oracle = table_oracle(parse_ci(read_file(a.ci_path)));
    } else {
        oracle = data_oracle(parse_csv(read_file(a.data_path)), a.alpha);
        // finite-sample answers: cap the search and tolerate conflicts
        cfg.max_cond_size = 3;
        cfg.conflict_policy = ConflictPolicy::WarnKeepFirst;
    }
    if (a.max_cond_set) cfg.max_cond_size = a.max_cond;
    if (a.policy == "warn") cfg.conflict_policy = ConflictPolicy::WarnKeepFirst;
    if (a.policy == "fail") cfg.conflict_policy = ConflictPolicy::FailFast;

    FciResult r = fci(*oracle, cfg);
    write_file(a.out_path, emit_poipg(r.graph));
    std::cerr << "wrote " << a.out_path << "\n";
    if (!a.dot_path.empty()) {
        write_file(a.dot_path, emit_dot(r.graph));
        std::cerr << "wrote " << a.dot_path << "\n";
    }
    if (!a.trace_path.empty()) {
        std::string text;
        for (const std::string& line : r.trace.lines()) text += line + "\n";
        write_file(a.trace_path, text);
        std::cerr << "wrote " << a.trace_path << "\n";
    }
    print_poipg(std::cout, r.graph);
    return kExitOk;
}

struct QueryArgs {
    std::string kind;
    std::string poipg_path;
    std::string from, to;
    std::vector<std::string> through;
};

int run_query(const QueryArgs& a) {
    Poipg p = parse_poipg(read_file(a.poipg_path));
    int from = resolve(p, a.from);
    int to = resolve(p, a.to);
    std::vector<CausalClaim> claims;
    if (a.kind == "cause") {
        if (auto c = definite_cause(p, from, to)) claims.push_back(*c);
    } else if (a.kind == "confound") {
        if (auto c = no_cause_either_way(p, from, to)) claims.push_back(*c);
        if (auto c = latent_confounder(p, from, to)) claims.push_back(*c);
    } else {
        claims = blocking_claims(p, from, to, resolve_all(p, a.through));
    }
    if (claims.empty()) {
        std::cerr << "no claim\n";
        return kExitNoClaim;
    }
    for (const CausalClaim& c : claims) std::cout << c.line(p.names()) << "\n";
    return kExitOk;
}

struct DsepArgs {
    std::string graph_path;
    std::vector<std::string> x, z, y;
};

int run_dsep(const DsepArgs& a) {
    Dag g = parse_graph(read_file(a.graph_path));
    bool independent =
        observable_independent(g, resolve_all(g, a.x), resolve_all(g, a.z), resolve_all(g, a.y));
    std::cout << (independent ? "true" : "false") << "\n";
    return kExitOk;
}

struct InducingArgs {
    std::string graph_path;
    std::string a, b;
};

int run_inducing(const InducingArgs& args) {
    Dag g = parse_graph(read_file(args.graph_path));
    int a = resolve(g, args.a);
    int b = resolve(g, args.b);
    std::cout << (exists_inducing_path(g, a, b) ? "true" : "false") << "\n";
    std::cout << "orientations";
    for (const InducingPathOrientation& o : inducing_path_orientations(g, a, b))
        std::cout << " " << (o.into_a ? "in" : "out") << "-" << (o.into_b ? "in" : "out");
    std::cout << "\n";
    return kExitOk;
}

struct VerifyArgs {
    std::string ci_path;
    int obs = 1;
    int max_latent = 0;
    int max_sel = 0;
};

int run_verify(const VerifyArgs& a) {
    CiSet cond = parse_ci(read_file(a.ci_path));
    auto oracle = table_oracle(cond);
    Poipg p = fci(*oracle).graph;
    EnumBounds bounds{a.obs, a.max_latent, a.max_sel, EdgeConstraint::None};
    VerificationReport report = verify_equiv(p, cond, bounds);
    for (const std::string& line : report.lines()) std::cout << line << "\n";
    std::cerr << "elapsed " << report.elapsed.count() << "s\n";
    return report.all_pass() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal discovery under latent confounding and selection bias"};
    app.require_subcommand(1);

    DiscoverArgs discover;
    CLI::App* d = app.add_subcommand(
        "discover", "Run FCI against an oracle and write the discovered graph");
    auto* src = d->add_option_group("source", "exactly one independence source");
    src->add_option("--graph", discover.graph_path,
                    "generating graph (json), queried via d-separation");
    src->add_option("--ci", discover.ci_path, "explicit independence statements (text)");
    src->add_option("--data", discover.data_path, "discrete dataset (csv) tested with G2");
    src->require_option(1);
    d->add_option("--alpha", discover.alpha, "test significance level for --data")
        ->check(CLI::Range(0.0, 1.0));
    CLI::Option* max_cond =
        d->add_option("--max-cond", discover.max_cond, "largest conditioning set searched")
            ->check(CLI::NonNegativeNumber);
    d->add_option("--policy", discover.policy, "conflicting orientation handling")
        ->check(CLI::IsMember({"warn", "fail"}));
    d->add_option("--out", discover.out_path, "output path for the discovered graph (json)")
        ->required();
    d->add_option("--dot", discover.dot_path, "also write a dot rendering");
    d->add_option("--trace", discover.trace_path, "also write the event trace");

    QueryArgs query;
    CLI::App* q = app.add_subcommand("query", "Read causal claims off a discovered graph");
    q->add_option("kind", query.kind, "cause, confound or blocked")
        ->required()
        ->check(CLI::IsMember({"cause", "confound", "blocked"}));
    q->add_option("--poipg", query.poipg_path, "discovered graph (json)")->required();
    q->add_option("--from", query.from, "source variable")->required();
    q->add_option("--to", query.to, "target variable")->required();
    CLI::Option* through = q->add_option("--through", query.through,
                                         "intermediate variables for blocked queries")
                               ->delimiter(',');

    DsepArgs dsep;
    CLI::App* ds = app.add_subcommand("dsep", "Test an observable independence in a graph");
    ds->add_option("--graph", dsep.graph_path, "graph (json)")->required();
    ds->add_option("--x", dsep.x, "first variable set")->required()->delimiter(',');
    ds->add_option("--z", dsep.z, "second variable set")->required()->delimiter(',');
    ds->add_option("--y", dsep.y, "conditioning set")->delimiter(',');

    InducingArgs inducing;
    CLI::App* ind = app.add_subcommand("inducing", "Probe inducing paths between two variables");
    ind->add_option("--graph", inducing.graph_path, "graph (json)")->required();
    ind->add_option("--a", inducing.a, "first endpoint")->required();
    ind->add_option("--b", inducing.b, "second endpoint")->required();

    VerifyArgs verify;
    CLI::App* v = app.add_subcommand(
        "verify", "Check a discovered graph against every bounded generating structure");
    v->add_option("--ci", verify.ci_path, "independence statements (text)")->required();
    v->add_option("--obs", verify.obs, "observed vertex count")->required();
    v->add_option("--max-latent", verify.max_latent, "largest latent count")
        ->check(CLI::NonNegativeNumber);
    v->add_option("--max-sel", verify.max_sel, "largest selection count")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    discover.max_cond_set = max_cond->count() > 0;
    if (through->count() > 0 && query.kind != "blocked") {
        std::cerr << "--through only applies to blocked queries\n";
        return kExitUsage;
    }

    try {
        if (d->parsed()) return run_discover(discover);
        if (q->parsed()) return run_query(query);
        if (ds->parsed()) return run_dsep(dsep);
        if (ind->parsed()) return run_inducing(inducing);
        return run_verify(verify);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
}
