#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>
#include <string>

#include "poipg/errors.hpp"
#include "poipg/fci.hpp"
#include "poipg/io.hpp"
#include "poipg/oracle.hpp"
#include "support/builders.hpp"

using namespace poipg;

namespace {

CiSet cond2_statements() {
    CiSet s({"A", "B", "C", "D"});
    s.insert({0}, {1}, {});
    s.insert({0, 1}, {3}, {2});
    return s;
}

CiSet cond3_statements() {
    CiSet s({"A", "B", "C", "D"});
    s.insert({0}, {2, 3}, {});
    s.insert({0, 1}, {3}, {});
    return s;
}

Poipg cond2_poipg() {
    Poipg p({"A", "B", "C", "D"});
    p.add_edge(0, 2, EndpointMark::Circle, EndpointMark::Arrow);
    p.add_edge(1, 2, EndpointMark::Circle, EndpointMark::Arrow);
    p.add_edge(2, 3, EndpointMark::Tail, EndpointMark::Arrow);
    p.add_noncollider(0, 2, 3);
    p.add_noncollider(1, 2, 3);
    return p;
}

template <typename F>
ParseError capture(F&& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a ParseError");
    return ParseError("unreachable");
}

}  // namespace

TEST_CASE("graph json round-trips through emit and parse") {
    Dag g = testutil::build_dag("A -> C, B -> C, C -> D, L -> A, L -> D, C -> S",
                                {{"L", Role::Latent}, {"S", Role::Selection}});
    Dag back = parse_graph(emit_graph(g));
    CHECK(back == g);

    std::string text = emit_graph(g);
    CHECK(text.find("\"role\": \"latent\"") != std::string::npos);
    CHECK(text.find("\"role\": \"selection\"") != std::string::npos);
    CHECK(emit_graph(parse_graph(text)) == text);
}

TEST_CASE("graph json parses an explicit document") {
    std::string text = R"({
      "variables": [
        {"name": "A", "role": "observed"},
        {"name": "B", "role": "observed"},
        {"name": "H", "role": "latent"}
      ],
      "edges": [["H", "A"], ["H", "B"]]
    })";
    Dag g = parse_graph(text);
    REQUIRE(g.vertex_count() == 3);
    CHECK(g.vertex(2).role == Role::Latent);
    CHECK(g.has_edge(2, 0));
    CHECK(g.has_edge(2, 1));
    CHECK(g.edge_count() == 2);
}

TEST_CASE("graph json rejects malformed documents") {
    CHECK_THROWS_AS(parse_graph("{"), ParseError);
    CHECK_THROWS_AS(parse_graph("[1, 2]"), ParseError);
    CHECK_THROWS_AS(parse_graph(R"({"variables": []})"), ParseError);
    ParseError role = capture([] {
        parse_graph(R"({"variables": [{"name": "A", "role": "weird"}], "edges": []})");
    });
    CHECK(std::string(role.what()).find("unknown role") != std::string::npos);
    ParseError missing = capture([] {
        parse_graph(R"({"variables": [{"name": "A", "role": "observed"}], "edges": [["A", "B"]]})");
    });
    CHECK(std::string(missing.what()).find("unknown variable \"B\"") != std::string::npos);
    CHECK_THROWS_AS(parse_graph(R"({"variables": [{"name": "A", "role": "observed"},
                                                  {"name": "B", "role": "observed"}],
                                   "edges": [["A"]]})"),
                    ParseError);
    // construction errors surface as parse errors too
    CHECK_THROWS_AS(parse_graph(R"({"variables": [{"name": "A", "role": "observed"},
                                                  {"name": "B", "role": "observed"}],
                                   "edges": [["A", "B"], ["B", "A"]]})"),
                    ParseError);
}

TEST_CASE("poipg json round-trips discovery output") {
    auto oracle = table_oracle(cond3_statements());
    Poipg discovered = fci(*oracle).graph;
    Poipg back = parse_poipg(emit_poipg(discovered));
    CHECK(back == discovered);

    Poipg p2 = cond2_poipg();
    CHECK(parse_poipg(emit_poipg(p2)) == p2);
    std::string text = emit_poipg(p2);
    CHECK(text.find("\"mark_a\": \"circle\"") != std::string::npos);
    CHECK(text.find("\"mark_b\": \"arrow\"") != std::string::npos);
    CHECK(emit_poipg(parse_poipg(text)) == text);
}

TEST_CASE("poipg json tolerates a missing noncolliders array") {
    Poipg p = parse_poipg(R"({
      "variables": ["A", "B"],
      "edges": [{"a": "A", "b": "B", "mark_a": "circle", "mark_b": "circle"}]
    })");
    CHECK(p.adjacent(0, 1));
    CHECK(p.noncolliders().empty());
}

TEST_CASE("poipg json rejects bad marks, names and triples") {
    CHECK_THROWS_AS(parse_poipg("not json"), ParseError);
    ParseError mark = capture([] {
        parse_poipg(R"({"variables": ["A", "B"],
                       "edges": [{"a": "A", "b": "B", "mark_a": "diamond", "mark_b": "arrow"}]})");
    });
    CHECK(std::string(mark.what()).find("unknown endpoint mark") != std::string::npos);
    // tail-tail is not a legal mark pair
    CHECK_THROWS_AS(parse_poipg(R"({"variables": ["A", "B"],
                                   "edges": [{"a": "A", "b": "B",
                                              "mark_a": "tail", "mark_b": "tail"}]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_poipg(R"({"variables": ["A"],
                                   "edges": [{"a": "A", "b": "B",
                                              "mark_a": "circle", "mark_b": "circle"}]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_poipg(R"({"variables": ["A", "B"], "edges": [],
                                   "noncolliders": [["A", "B"]]})"),
                    ParseError);
    // a noncollider needs both of its edges present
    CHECK_THROWS_AS(parse_poipg(R"({"variables": ["A", "B", "C"], "edges": [],
                                   "noncolliders": [["A", "B", "C"]]})"),
                    ParseError);
}

TEST_CASE("ci text parses the minimal statement") {
    CiSet s = parse_ci("indep A ; B ; -\n");
    CiSet expected({"A", "B"});
    expected.insert({0}, {1}, {});
    CHECK(s == expected);
}

TEST_CASE("ci text without a vars line uses the mentioned names in sorted order") {
    CiSet s = parse_ci("indep D ; A,B ; C\nindep A ; B ; -\n");
    CHECK(s == cond2_statements());
}

TEST_CASE("ci text honours vars, comments and loose whitespace") {
    std::string text =
        "# universe with an unmentioned variable\n"
        "vars A,B,C,D\n"
        "\n"
        "  indep   A ;  B ; -   # population independence\n";
    CiSet s = parse_ci(text);
    CiSet expected({"A", "B", "C", "D"});
    expected.insert({0}, {1}, {});
    CHECK(s == expected);
}

TEST_CASE("ci text emits a canonical document that reparses equal") {
    CiSet s = cond2_statements();
    CHECK(emit_ci(s) == "vars A,B,C,D\nindep A ; B ; -\nindep A,B ; D ; C\n");
    CHECK(parse_ci(emit_ci(s)) == s);
    CHECK(parse_ci(emit_ci(cond3_statements())) == cond3_statements());

    CiSet empty({"A", "B"});
    CHECK(emit_ci(empty) == "vars A,B\n");
    CHECK(parse_ci(emit_ci(empty)) == empty);
}

TEST_CASE("ci text reports the offending line") {
    ParseError stray = capture([] { parse_ci("indep A ; B ; -\nnonsense\n"); });
    CHECK(stray.line == 2);
    CHECK(std::string(stray.what()).rfind("line 2: ", 0) == 0);

    ParseError fields = capture([] { parse_ci("indep A ; B\n"); });
    CHECK(fields.line == 1);

    ParseError late_vars = capture([] { parse_ci("indep A ; B ; -\nvars A,B\n"); });
    CHECK(late_vars.line == 2);
    CHECK(std::string(late_vars.what()).find("before") != std::string::npos);

    ParseError twice = capture([] { parse_ci("vars A,B\nvars A,B\nindep A ; B ; -\n"); });
    CHECK(twice.line == 2);

    ParseError unknown = capture([] { parse_ci("vars A,B\nindep A ; C ; -\n"); });
    CHECK(unknown.line == 2);
    CHECK(std::string(unknown.what()).find("\"C\"") != std::string::npos);

    ParseError empty_name = capture([] { parse_ci("indep A, ; B ; -\n"); });
    CHECK(empty_name.line == 1);

    // overlap errors from statement construction carry the line too
    ParseError overlap = capture([] { parse_ci("indep A ; A ; -\n"); });
    CHECK(overlap.line == 1);
}

TEST_CASE("csv parses declared-arity discrete data") {
    std::string text =
        "# toy file\n"
        "#arity A=2\n"
        "#arity B=3\n"
        "A,B\n"
        "0,2\n"
        "1,0\n"
        "1,1\n";
    Dataset d = parse_csv(text);
    CHECK(d.names() == std::vector<std::string>{"A", "B"});
    CHECK(d.arities() == std::vector<int>{2, 3});
    REQUIRE(d.row_count() == 3);
    CHECK(d.cell(0, 1) == 2);
    CHECK(d.cell(2, 0) == 1);
}

TEST_CASE("csv rejects undeclared and inconsistent content") {
    ParseError no_arity = capture([] { parse_csv("#arity A=2\nA,B\n0,0\n"); });
    CHECK(std::string(no_arity.what()).find("no #arity line for column B") != std::string::npos);

    ParseError unknown = capture([] { parse_csv("#arity A=2\n#arity Z=2\nA\n0\n"); });
    CHECK(std::string(unknown.what()).find("unknown column Z") != std::string::npos);

    ParseError repeated = capture([] { parse_csv("#arity A=2\n#arity A=2\nA\n0\n"); });
    CHECK(repeated.line == 2);

    ParseError bad_decl = capture([] { parse_csv("#arity A\nA\n0\n"); });
    CHECK(bad_decl.line == 1);

    ParseError bad_cell = capture([] { parse_csv("#arity A=2\nA\nx\n"); });
    CHECK(bad_cell.line == 3);
    CHECK(std::string(bad_cell.what()).find("not an integer") != std::string::npos);

    ParseError out_of_range = capture([] { parse_csv("#arity A=2\nA\n0\n2\n"); });
    CHECK(out_of_range.line == 4);
    CHECK(std::string(out_of_range.what()).find("outside the declared arity") != std::string::npos);

    ParseError ragged = capture([] { parse_csv("#arity A=2\n#arity B=2\nA,B\n0\n"); });
    CHECK(ragged.line == 4);

    CHECK_THROWS_AS(parse_csv("#arity A=2\n"), ParseError);
    // no rows at all is a dataset-level failure
    CHECK_THROWS_AS(parse_csv("#arity A=2\nA\n"), ParseError);
}

TEST_CASE("dot output renders endpoint marks deterministically") {
    Poipg cond1({"A", "B"});
    cond1.add_edge(0, 1, EndpointMark::Circle, EndpointMark::Circle);
    CHECK(emit_dot(cond1) ==
          "digraph poipg {\n"
          "  \"A\";\n"
          "  \"B\";\n"
          "  \"A\" -> \"B\" [dir=both, arrowtail=odot, arrowhead=odot];\n"
          "}\n");

    std::string cond2 = emit_dot(cond2_poipg());
    CHECK(cond2 ==
          "digraph poipg {\n"
          "  \"A\";\n"
          "  \"B\";\n"
          "  \"C\";\n"
          "  \"D\";\n"
          "  \"A\" -> \"C\" [dir=both, arrowtail=odot, arrowhead=normal];\n"
          "  \"B\" -> \"C\" [dir=both, arrowtail=odot, arrowhead=normal];\n"
          "  \"C\" -> \"D\" [dir=both, arrowtail=none, arrowhead=normal];\n"
          "}\n");
    CHECK(emit_dot(cond2_poipg()) == cond2);

    Poipg bare({"X", "Y"});
    CHECK(emit_dot(bare) ==
          "digraph poipg {\n"
          "  \"X\";\n"
          "  \"Y\";\n"
          "}\n");
}

TEST_CASE("random poipgs survive json and ci round-trips") {
    std::mt19937 rng(77);
    std::vector<std::string> names{"A", "B", "C", "D", "E"};
    for (int trial = 0; trial < 60; ++trial) {
        Poipg p(names);
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < 5; ++a)
            for (int b = a + 1; b < 5; ++b)
                if (rng() % 2 == 0) {
                    // draw until the pair is legal
                    for (;;) {
                        auto at_a = static_cast<EndpointMark>(rng() % 3);
                        auto at_b = static_cast<EndpointMark>(rng() % 3);
                        try {
                            p.add_edge(a, b, at_a, at_b);
                        } catch (const GraphError&) {
                            continue;
                        }
                        edges.emplace_back(a, b);
                        break;
                    }
                }
        for (auto [a, b] : edges)
            for (auto [c, d] : edges)
                if (b == d && a < c && rng() % 3 == 0) p.add_noncollider(a, b, c);
        CHECK(parse_poipg(emit_poipg(p)) == p);

        CiSet s(names);
        for (int k = 0; k < 4; ++k) {
            VertexSet x{static_cast<int>(rng() % 5)};
            VertexSet z{static_cast<int>(rng() % 5)};
            VertexSet y;
            if (rng() % 2) y.insert(static_cast<int>(rng() % 5));
            if ((x & z).empty() && (x & y).empty() && (z & y).empty()) s.insert(x, z, y);
        }
        CHECK(parse_ci(emit_ci(s)) == s);
    }
}

TEST_CASE("files round-trip through write and read") {
    std::string path = "io_test_scratch.txt";
    write_file(path, "payload\nwith lines\n");
    CHECK(read_file(path) == "payload\nwith lines\n");
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_file("definitely/not/here.json"), ParseError);
    CHECK_THROWS_AS(write_file("no_such_dir/x.json", "x"), ParseError);
}
