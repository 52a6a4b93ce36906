#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "poipg/errors.hpp"
#include "poipg/oracle.hpp"
#include "poipg/separation.hpp"
#include "support/builders.hpp"
#include "support/sampler.hpp"

using namespace poipg;

namespace {

VertexSet bits(std::uint64_t b) { return VertexSet::from_bits(b); }

Dataset chain_dataset(std::uint64_t seed, long n) {
    return Dataset({"A", "B", "C", "D"}, {2, 2, 2, 2}, testutil::sample_chain_rows(seed, n));
}

// every disjoint (x, z, y) with x, z nonempty over positions 0..m-1
template <typename F>
void for_all_queries(int m, F&& fn) {
    const std::uint64_t full = (1ull << m) - 1;
    for (std::uint64_t xm = 1; xm <= full; ++xm)
        for (std::uint64_t zm = 1; zm <= full; ++zm) {
            if (xm & zm) continue;
            std::uint64_t rest = full & ~(xm | zm);
            for (std::uint64_t ym = rest;; ym = (ym - 1) & rest) {
                fn(bits(xm), bits(zm), bits(ym));
                if (ym == 0) break;
            }
        }
}

}  // namespace

TEST_CASE("verdict names") {
    CHECK(std::string(verdict_name(Verdict::Independent)) == "independent");
    CHECK(std::string(verdict_name(Verdict::Dependent)) == "dependent");
    CHECK(std::string(verdict_name(Verdict::InsufficientData)) == "insufficient-data");
}

TEST_CASE("graphical oracle answers by separation with selection conditioning") {
    auto g = testutil::build_dag("A, B, C, D, A -> C, B -> C, C -> D");
    auto o = graphical_oracle(g);
    REQUIRE(o->universe() == std::vector<std::string>{"A", "B", "C", "D"});

    CHECK(o->independent({0}, {1}, {}));
    CHECK(o->independent({0}, {3}, {2}));
    CHECK(o->independent({1}, {3}, {2}));
    CHECK_FALSE(o->independent({0}, {1}, {2}));
    CHECK_FALSE(o->independent({0}, {2}, {1}));
    CHECK_FALSE(o->independent({2}, {3}, {}));
    CHECK(o->query_count() == 6);

    auto sel = testutil::build_dag("A -> S, B -> S", {{"S", Role::Selection}});
    auto os = graphical_oracle(sel);
    REQUIRE(os->universe() == std::vector<std::string>{"A", "B"});
    CHECK_FALSE(os->independent({0}, {1}, {}));

    auto fork = testutil::build_dag("T -> A, T -> B", {{"T", Role::Latent}});
    auto of = graphical_oracle(fork);
    CHECK_FALSE(of->independent({0}, {1}, {}));
}

TEST_CASE("graphical oracle rejects bad construction and bad queries") {
    Dag hidden;
    hidden.add_vertex("T", Role::Latent);
    CHECK_THROWS_AS(graphical_oracle(hidden), GraphError);

    auto g = testutil::build_dag("A -> B");
    auto o = graphical_oracle(g);
    CHECK_THROWS_AS(o->independent({0}, {2}, {}), CiError);
    CHECK_THROWS_AS(o->independent({}, {1}, {}), CiError);
    CHECK_THROWS_AS(o->independent({0}, {0}, {}), CiError);
    CHECK_THROWS_AS(o->independent({0}, {1}, {0}), CiError);
    CHECK(o->query_count() == 0);
    CHECK(o->describe_query({0}, {1}, {}) == "x={A} z={B} y={}");
}

TEST_CASE("table oracle entails by shrinking sides into the conditioning set") {
    // collider chain: compact statements over A,B,C,D
    CiSet cond2({"A", "B", "C", "D"});
    cond2.insert({0}, {1}, {});
    cond2.insert({0, 1}, {3}, {2});
    auto t2 = table_oracle(cond2);

    CHECK(t2->independent({0}, {1}, {}));
    CHECK(t2->independent({0}, {3}, {2}));
    CHECK(t2->independent({1}, {3}, {2}));
    CHECK(t2->independent({0, 1}, {3}, {2}));
    CHECK(t2->independent({0}, {3}, {1, 2}));
    CHECK(t2->independent({1}, {3}, {0, 2}));
    CHECK_FALSE(t2->independent({0}, {1}, {2}));
    CHECK_FALSE(t2->independent({0}, {3}, {}));
    CHECK_FALSE(t2->independent({0}, {2}, {}));
    CHECK_FALSE(t2->independent({2}, {3}, {}));
    CHECK_FALSE(t2->independent({0}, {1}, {3}));

    // double latent structure: compact statements
    CiSet cond3({"A", "B", "C", "D"});
    cond3.insert({0}, {2, 3}, {});
    cond3.insert({0, 1}, {3}, {});
    auto t3 = table_oracle(cond3);

    CHECK(t3->independent({0}, {2}, {}));
    CHECK(t3->independent({0}, {3}, {}));
    CHECK(t3->independent({1}, {3}, {}));
    CHECK(t3->independent({0}, {3}, {1}));
    CHECK(t3->independent({0}, {3}, {2}));
    CHECK(t3->independent({0}, {2}, {3}));
    CHECK(t3->independent({1}, {3}, {0}));
    CHECK_FALSE(t3->independent({1}, {2}, {}));
    CHECK_FALSE(t3->independent({0}, {1}, {}));
    CHECK_FALSE(t3->independent({2}, {3}, {}));
    CHECK_FALSE(t3->independent({1}, {2}, {0}));
}

TEST_CASE("table oracle over a full entailed set matches the graphical oracle") {
    auto check_graph = [](const Dag& g) {
        auto go = graphical_oracle(g);
        auto to = table_oracle(observable_ci_set(g));
        REQUIRE(go->universe() == to->universe());
        int m = static_cast<int>(go->universe().size());
        for_all_queries(m, [&](VertexSet x, VertexSet z, VertexSet y) {
            CAPTURE(go->describe_query(x, z, y));
            CHECK(go->independent(x, z, y) == to->independent(x, z, y));
        });
    };

    check_graph(testutil::build_dag("A, B, C, D, A -> C, B -> C, C -> D"));
    check_graph(testutil::build_dag("A -> B, T -> B, T -> C, D -> C", {{"T", Role::Latent}}));
    check_graph(testutil::build_dag("A -> S, B -> S, B -> C", {{"S", Role::Selection}}));

    std::mt19937_64 rng(90210);
    auto coin = [&](double p) { return (rng() >> 11) * 0x1.0p-53 < p; };
    for (int trial = 0; trial < 40; ++trial) {
        Dag g;
        int n = 3 + static_cast<int>(rng() % 3);
        int observed = 0;
        for (int i = 0; i < n; ++i) {
            Role r = Role::Observed;
            if (i >= 2) {
                double u = (rng() >> 11) * 0x1.0p-53;
                r = u < 0.6 ? Role::Observed : (u < 0.85 ? Role::Latent : Role::Selection);
            }
            observed += r == Role::Observed ? 1 : 0;
            g.add_vertex("V" + std::to_string(i), r);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (coin(0.4)) g.add_edge(i, j);
        if (observed == 0) continue;
        check_graph(g);
    }
}

TEST_CASE("table oracle compact statements agree with their witness graphs") {
    // the compact statement sets entail exactly what their witness graphs do
    CiSet cond2({"A", "B", "C", "D"});
    cond2.insert({0}, {1}, {});
    cond2.insert({0, 1}, {3}, {2});
    auto t2 = table_oracle(cond2);
    auto g2 = graphical_oracle(testutil::build_dag("A, B, C, D, A -> C, B -> C, C -> D"));
    for_all_queries(4, [&](VertexSet x, VertexSet z, VertexSet y) {
        CAPTURE(t2->describe_query(x, z, y));
        CHECK(t2->independent(x, z, y) == g2->independent(x, z, y));
    });

    CiSet cond3({"A", "B", "C", "D"});
    cond3.insert({0}, {2, 3}, {});
    cond3.insert({0, 1}, {3}, {});
    auto t3 = table_oracle(cond3);
    auto g3 = graphical_oracle(
        testutil::build_dag("A -> B, T -> B, T -> C, D -> C", {{"T", Role::Latent}}));
    for_all_queries(4, [&](VertexSet x, VertexSet z, VertexSet y) {
        CAPTURE(t3->describe_query(x, z, y));
        CHECK(t3->independent(x, z, y) == g3->independent(x, z, y));
    });
}

TEST_CASE("dataset validates its shape") {
    std::vector<std::vector<std::uint8_t>> rows = {{0, 1}, {1, 0}};
    CHECK_NOTHROW(Dataset({"A", "B"}, {2, 2}, rows));
    CHECK_THROWS_AS(Dataset({"A", "B"}, {1, 2}, rows), OracleError);
    CHECK_THROWS_AS(Dataset({"A", "A"}, {2, 2}, rows), OracleError);
    CHECK_THROWS_AS(Dataset({"A", "B"}, {2}, rows), OracleError);
    CHECK_THROWS_AS(Dataset({"A", "B"}, {2, 2}, {}), OracleError);
    CHECK_THROWS_AS(Dataset({"A", "B"}, {2, 2}, {{0}}), OracleError);
    CHECK_THROWS_AS(Dataset({"A", "B"}, {2, 2}, {{0, 2}}), OracleError);
    CHECK_THROWS_AS(Dataset({}, {}, {}), OracleError);
}

TEST_CASE("likelihood ratio test on sampled chains") {
    Dataset d = chain_dataset(1, 10000);

    TestResult indep = g2_test(d, 0, 1, {}, 0.01);
    CHECK(indep.verdict == Verdict::Independent);
    CHECK(indep.dof == 1);
    CHECK(indep.p_value > 0.01);

    TestResult collider = g2_test(d, 0, 1, {2}, 0.01);
    CHECK(collider.verdict == Verdict::Dependent);
    CHECK(collider.dof == 2);

    TestResult direct = g2_test(d, 0, 2, {}, 0.01);
    CHECK(direct.verdict == Verdict::Dependent);

    TestResult chain = g2_test(d, 0, 3, {2}, 0.01);
    CHECK(chain.verdict == Verdict::Independent);
}

TEST_CASE("likelihood ratio test flags thin data") {
    Dataset d({"A", "B"}, {2, 2}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 0}});
    TestResult r = g2_test(d, 0, 1, {}, 0.05);
    CHECK(r.verdict == Verdict::InsufficientData);
    CHECK(r.dof == 1);
}

TEST_CASE("likelihood ratio test validates its arguments") {
    Dataset d = chain_dataset(2, 100);
    CHECK_THROWS_AS(g2_test(d, 0, 4, {}, 0.05), OracleError);
    CHECK_THROWS_AS(g2_test(d, -1, 1, {}, 0.05), OracleError);
    CHECK_THROWS_AS(g2_test(d, 0, 0, {}, 0.05), OracleError);
    CHECK_THROWS_AS(g2_test(d, 0, 1, {0}, 0.05), OracleError);
    CHECK_THROWS_AS(g2_test(d, 0, 1, {}, 0.0), OracleError);
    CHECK_THROWS_AS(g2_test(d, 0, 1, {}, 1.0), OracleError);
}

TEST_CASE("empty conditioning strata drop degrees of freedom") {
    // declared arity 3 but the stratum y=2 never occurs
    std::vector<std::vector<std::uint8_t>> rows;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 400; ++i) {
        auto u = [&] { return (rng() >> 11) * 0x1.0p-53; };
        std::uint8_t a = u() < 0.5;
        std::uint8_t b = u() < 0.5;
        std::uint8_t y = u() < 0.5;
        rows.push_back({a, b, y});
    }
    Dataset d({"A", "B", "Y"}, {2, 2, 3}, rows);
    CHECK(g2_test(d, 0, 1, {2}, 0.05).dof == 2);
    CHECK(g2_test(d, 0, 1, {2}, 0.05, false).dof == 3);
}

TEST_CASE("likelihood ratio test is symmetric in its sides") {
    Dataset d = chain_dataset(7, 600);
    for (auto y : {VertexSet{}, VertexSet{2}, VertexSet{2, 3}}) {
        for (int x = 0; x < 4; ++x)
            for (int z = 0; z < 4; ++z) {
                if (x == z || y.contains(x) || y.contains(z)) continue;
                TestResult a = g2_test(d, x, z, y, 0.05);
                TestResult b = g2_test(d, z, x, y, 0.05);
                CHECK(a.statistic == doctest::Approx(b.statistic));
                CHECK(a.dof == b.dof);
                CHECK(a.p_value == doctest::Approx(b.p_value));
                CHECK(a.verdict == b.verdict);
            }
    }
}

TEST_CASE("chi-square upper tail matches standard critical values") {
    CHECK(detail::chi_square_sf(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(detail::chi_square_sf(6.634897, 1) == doctest::Approx(0.01).epsilon(1e-4));
    CHECK(detail::chi_square_sf(9.487729, 4) == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(detail::chi_square_sf(18.307038, 10) == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(detail::chi_square_sf(0.0, 3) == 1.0);
    CHECK(detail::chi_square_sf(120.0, 1) < 1e-20);
    double prev = 1.0;
    for (double x = 0.5; x < 20.0; x += 0.5) {
        double q = detail::chi_square_sf(x, 3);
        CHECK(q < prev);
        prev = q;
    }
    CHECK_THROWS_AS(detail::chi_square_sf(1.0, 0), OracleError);
}

TEST_CASE("data oracle codes composite sides jointly") {
    // C = A xor B on perfectly balanced rows: marginally invisible, jointly exact
    std::vector<std::vector<std::uint8_t>> rows;
    for (int copy = 0; copy < 10; ++copy)
        for (std::uint8_t a = 0; a < 2; ++a)
            for (std::uint8_t b = 0; b < 2; ++b)
                rows.push_back({a, b, static_cast<std::uint8_t>(a ^ b)});
    auto o = data_oracle(Dataset({"A", "B", "C"}, {2, 2, 2}, rows), 0.05);
    CHECK(o->independent({0}, {2}, {}));
    CHECK(o->independent({1}, {2}, {}));
    CHECK_FALSE(o->independent({0, 1}, {2}, {}));
    CHECK_FALSE(o->independent({0}, {2}, {1}));
}

TEST_CASE("data oracle applies the insufficiency policy") {
    std::vector<std::vector<std::uint8_t>> rows = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 0}};
    Dataset d({"A", "B"}, {2, 2}, rows);
    auto conservative = data_oracle(d, 0.05);
    CHECK_FALSE(conservative->independent({0}, {1}, {}));
    auto lenient = data_oracle(d, 0.05, InsufficientPolicy::AssumeIndependent);
    CHECK(lenient->independent({0}, {1}, {}));
    CHECK_THROWS_AS(data_oracle(d, 2.0), OracleError);
}

TEST_CASE("data oracle matches the standalone test on single columns") {
    Dataset d = chain_dataset(3, 2000);
    auto o = data_oracle(d, 0.05);
    for_all_queries(4, [&](VertexSet x, VertexSet z, VertexSet y) {
        if (x.size() != 1 || z.size() != 1) return;
        TestResult r = g2_test(d, x.min(), z.min(), y, 0.05);
        bool expect = r.verdict == Verdict::InsufficientData ? false
                                                             : r.verdict == Verdict::Independent;
        CHECK(o->independent(x, z, y) == expect);
    });
}

TEST_CASE("caching oracle reaches the inner oracle once per canonical query") {
    auto inner = graphical_oracle(testutil::build_dag("A, B, C, A -> C, B -> C"));
    auto cached = caching_oracle(inner);
    REQUIRE(cached->universe() == inner->universe());

    CHECK(cached->independent({0}, {1}, {}));
    CHECK(cached->independent({0}, {1}, {}));
    CHECK(inner->query_count() == 1);
    CHECK(cached->hits() == 1);
    CHECK(cached->misses() == 1);

    CHECK(cached->independent({1}, {0}, {}));
    CHECK(inner->query_count() == 1);
    CHECK(cached->hits() == 2);

    CHECK_FALSE(cached->independent({0}, {1}, {2}));
    CHECK(inner->query_count() == 2);
    CHECK(cached->misses() == 2);
    CHECK(cached->query_count() == 4);

    CHECK_THROWS_AS(caching_oracle(nullptr), OracleError);
}

TEST_CASE("null rejection rate sits near the nominal level") {
    int rejected = 0;
    const int trials = 300;
    for (int s = 1; s <= trials; ++s) {
        Dataset d = chain_dataset(static_cast<std::uint64_t>(s), 2000);
        if (g2_test(d, 0, 1, {}, 0.05).verdict == Verdict::Dependent) ++rejected;
    }
    double rate = static_cast<double>(rejected) / trials;
    CHECK(rate > 0.02);
    CHECK(rate < 0.09);
}
