#include "kwahl/catalog.hpp"
#include "kwahl/chain.hpp"
#include "kwahl/config.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace kw;

namespace {

const Configuration& a0() {
    static const Configuration c = load_config(default_data_dir() + "/a0.json");
    return c;
}

Configuration chain_config(const Chain& ch) {
    Configuration c;
    for (size_t i = 0; i < ch.size(); ++i) c.add_curve("A" + std::to_string(i + 1), -ch[i]);
    for (size_t i = 0; i + 1 < ch.size(); ++i) c.add_node(static_cast<int>(i), static_cast<int>(i + 1));
    return c;
}

// Random multigraph on n (-2)- or (-3)-curves without self-nodes.
Configuration random_config(std::mt19937_64& rng, int n, int edges) {
    Configuration c;
    std::uniform_int_distribution<int> pick(0, n - 1), self(2, 4);
    for (int i = 0; i < n; ++i) c.add_curve("X" + std::to_string(i), -self(rng));
    for (int k = 0; k < edges; ++k) {
        int a = pick(rng), b = pick(rng);
        if (a != b) c.add_node(a, b);
    }
    return c;
}

}  // namespace

TEST_CASE("determinant agrees with cofactor and permutation expansions") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<long long> entry(-9, 9);
    for (int k = 0; k < 2000; ++k) {
        const size_t n = 1 + k % 6;
        IntMatrix m(n, std::vector<long long>(n));
        for (auto& row : m)
            for (auto& v : row) v = entry(rng);
        const Int d = det_exact(m);
        REQUIRE(d == oracle::det_cofactor(m));
        REQUIRE(d == oracle::det_permutations(m));
        REQUIRE((rank_exact(m) == static_cast<int>(n)) == (d != 0));
    }
    CHECK(det_exact({}) == 1);
}

TEST_CASE("printed K^2=2 matrix determinant") {
    const auto m = intersection_matrix_by_name(a0(), {"C1", "C2", "B1", "A2", "A3", "D1"});
    CHECK(det_exact(m) == -40);
    CHECK(det_exact(m) == oracle::det_cofactor(m));
}

TEST_CASE("an I2 fibre is degenerate") {
    const auto m = intersection_matrix_by_name(a0(), {"B1", "B2"});
    CHECK(m == IntMatrix{{-2, 2}, {2, -2}});
    CHECK(det_exact(m) == 0);
    CHECK(rank_exact(m) == 1);
}

TEST_CASE("log Chern numbers") {
    CHECK(a0().r() == 32);
    CHECK(a0().t2() == 72);
    LogChern lc = log_chern(a0());
    CHECK(lc.c1sq == 80);
    CHECK(lc.c2 == 32);
    const Configuration k2 = a0().restrict({"C1", "C2", "B1", "A2", "A3", "D1"});
    CHECK(k2.r() == 6);
    CHECK(k2.t2() == 8);
    lc = log_chern(k2);
    CHECK(lc.c1sq == 4);
    CHECK(lc.c2 == 20);
    lc = log_chern(Configuration{});
    CHECK(lc.c1sq == 0);
    CHECK(lc.c2 == 24);
}

TEST_CASE("P and K") {
    PKInvariants pk = pk_invariants(a0().restrict({"C1", "C2", "B1", "A2", "A3", "D1"}));
    CHECK(pk.P == 2);
    CHECK(pk.K == 2);
    pk = pk_invariants(Configuration{});
    CHECK(pk.P == 0);
    CHECK(pk.K == 0);
    Configuration abstract;
    abstract.ambient = {AmbientKind::Abstract, 3, 9};
    CHECK(pk_invariants(abstract).K == 3);
    for (int l = 1; l <= 9; ++l)
        for (const Chain& c : wahl_generate(l)) REQUIRE(pk_invariants(chain_config(c)).P == 1);
}

TEST_CASE("blow-up at an ordinary node") {
    Configuration c;
    const int a = c.add_curve("A", -2), b = c.add_curve("B", -2);
    c.add_node(a, b);
    int e = -1;
    const Configuration d = blow_up(c, c.nodes[0].id, &e);
    CHECK(d.curve(a).self_int == -3);
    CHECK(d.curve(b).self_int == -3);
    CHECK(d.curve(e).self_int == -1);
    CHECK(d.meet(a, b) == 0);
    CHECK(d.meet(a, e) == 1);
    CHECK(d.meet(b, e) == 1);
    CHECK(d.t2() == 2);
    CHECK_THROWS(blow_up(c, 999));
}

TEST_CASE("blow-up at one point of a doubly meeting pair") {
    Configuration c = a0().restrict({"C1", "C2"});
    const int c1 = c.id_of("C1"), c2 = c.id_of("C2");
    REQUIRE(c.meet(c1, c2) == 2);
    int e = -1;
    const Configuration d = blow_up(c, c.nodes_between(c1, c2).front(), &e);
    CHECK(d.curve(c1).self_int == -3);
    CHECK(d.curve(c2).self_int == -3);
    CHECK(d.meet(c1, c2) == 1);
    CHECK(d.meet(c1, e) == 1);
    CHECK(d.meet(c2, e) == 1);
}

TEST_CASE("blow-ups preserve P and K and raise r and t2 by one") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 1000; ++k) {
        Configuration c = random_config(rng, 2 + k % 7, 3 + k % 11);
        if (c.nodes.empty()) continue;
        const PKInvariants before = pk_invariants(c);
        const LogChern lc = log_chern(c);
        const int steps = 1 + k % 4;
        for (int s = 0; s < steps; ++s) {
            const int r = c.r(), t2 = c.t2();
            const Node& nd = c.nodes[std::uniform_int_distribution<size_t>(0, c.nodes.size() - 1)(rng)];
            c = blow_up(c, nd.id);
            REQUIRE(c.r() == r + 1);
            REQUIRE(c.t2() == t2 + 1);
        }
        const PKInvariants after = pk_invariants(c);
        REQUIRE(after.P == before.P);
        REQUIRE(after.K == before.K);
        REQUIRE(log_chern(c).c1sq == lc.c1sq);
        REQUIRE(log_chern(c).c2 == lc.c2);
        REQUIRE(c.flagged_steps.empty());
    }
}

TEST_CASE("blow-up at a self-node is flagged") {
    Configuration c;
    const int a = c.add_curve("N", 1);
    c.add_node(a, a);
    int e = -1;
    const Configuration d = blow_up(c, c.nodes[0].id, &e);
    CHECK(d.curve(a).self_int == -3);
    CHECK(d.meet(a, e) == 2);
    CHECK(d.flagged_steps == std::vector<int>{0});
}

TEST_CASE("geography") {
    Geography g = geography_check(2, 2);
    CHECK(g.admissible);
    CHECK(g.r == 6);
    CHECK(g.t2 == 8);
    CHECK(g.nodes_to_blow_up == 4);
    CHECK(g.bound == Rat(66, 5));
    CHECK_FALSE(geography_check(2, 14).admissible);
    CHECK(geography_check(2, 13).admissible);
    CHECK(geography_check(0, 14).admissible);
}

TEST_CASE("json round trip and strictness") {
    const auto j = config_to_json(a0());
    const Configuration back = config_from_json(j);
    CHECK(back.r() == a0().r());
    CHECK(back.t2() == a0().t2());
    CHECK(intersection_matrix(back) == intersection_matrix(a0()));
    CHECK(config_to_json(back) == j);

    auto bad = nlohmann::json::parse(R"({"curves":[{"name":"A","self_int":-2,"colour":1}],"nodes":[]})");
    CHECK_THROWS_WITH(config_from_json(bad), doctest::Contains("unknown field 'colour'"));
    bad = nlohmann::json::parse(R"({"curves":[{"name":"A","self_int":-2}],"nodes":[["A","Z"]]})");
    CHECK_THROWS(config_from_json(bad));
    bad = nlohmann::json::parse(R"({"curves":[],"nodes":[],"extra":0})");
    CHECK_THROWS(config_from_json(bad));
}

TEST_CASE("intersection matrix is symmetric and ordering-independent up to permutation") {
    std::vector<std::string> names;
    for (const Curve& c : a0().curves) names.push_back(c.name);
    std::mt19937_64 rng(29);
    for (int k = 0; k < 50; ++k) {
        std::shuffle(names.begin(), names.end(), rng);
        std::vector<std::string> sub(names.begin(), names.begin() + 7);
        auto m = intersection_matrix_by_name(a0(), sub);
        for (size_t i = 0; i < m.size(); ++i)
            for (size_t j = 0; j < m.size(); ++j) REQUIRE(m[i][j] == m[j][i]);
        std::vector<std::string> rev(sub.rbegin(), sub.rend());
        REQUIRE(det_exact(m) == det_exact(intersection_matrix_by_name(a0(), rev)));
    }
}
