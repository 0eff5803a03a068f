#include "kwahl/catalog.hpp"
#include "kwahl/chain.hpp"
#include "kwahl/surface.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace kw;

namespace {

// Adds the chain as curves prefix1..prefixl joined in order; returns their ids.
std::vector<int> add_chain(Configuration& c, const std::string& prefix, const Chain& ch) {
    std::vector<int> ids;
    for (size_t i = 0; i < ch.size(); ++i) ids.push_back(c.add_curve(prefix + std::to_string(i + 1), -ch[i]));
    for (size_t i = 0; i + 1 < ids.size(); ++i) c.add_node(ids[i], ids[i + 1]);
    return ids;
}

// Two (-2)-curves meeting twice, both points blown up: [4] and [4] joined by two (-1)-curves.
Configuration two_fours() {
    Configuration c;
    const int a = c.add_curve("A", -2), b = c.add_curve("B", -2);
    c.add_node(a, b);
    c.add_node(a, b);
    c = blow_up(c, c.nodes_between(a, b)[0]);
    c = blow_up(c, c.nodes_between(a, b)[0]);
    return c;
}

MarkedSurface mark(const Configuration& c, const std::vector<std::vector<int>>& chains) {
    MarkedSurface ms;
    ms.surface = c;
    ms.wahl_chains = chains;
    ms.blowup_count = c.blowups;
    check_marking(ms);
    return ms;
}

}  // namespace

TEST_CASE("two [4] chains joined by (-1)-curves are nef but not ample") {
    const Configuration c = two_fours();
    const int a = c.id_of("A"), b = c.id_of("B");
    CHECK(c.curve(a).self_int == -4);
    CHECK(c.curve(b).self_int == -4);
    auto ms = auto_mark(c, {a, b});
    REQUIRE(ms);
    CHECK(ms->wahl_chains.size() == 2);
    CHECK(k_squared(*ms) == 0);
    const AmpleVerdict v = nef_ample_check(*ms);
    CHECK(v.status == Positivity::NefOnly);
    REQUIRE(v.witness_sum);
    CHECK(*v.witness_sum == -1);
    REQUIRE(v.contractions.size() == 2);
    for (const CyclicQuotient& cq : v.contractions) {
        CHECK(cq.m == 8);
        CHECK(cq.q == 3);
    }
    // K^2 = 0: no canonical model of general type
    CHECK_FALSE(v.canonical_ample);
}

TEST_CASE("a (-1)-curve meeting one [4] chain only is not nef") {
    Configuration c;
    const auto ch = add_chain(c, "A", {4});
    const int e = c.add_curve("E", -1);
    c.add_node(ch[0], e);
    const AmpleVerdict v = nef_ample_check(mark(c, {ch}));
    CHECK(v.status == Positivity::NotNef);
    REQUIRE(v.witness);
    CHECK(*v.witness == e);
}

TEST_CASE("a (-1)-curve meeting two chains at interior curves is ample") {
    Configuration c;
    const auto x = add_chain(c, "X", {4, 5, 3, 2, 2});
    const auto y = add_chain(c, "Y", {3, 5, 3, 2});
    const int e = c.add_curve("E", -1);
    c.add_node(x[1], e);
    c.add_node(y[1], e);
    const MarkedSurface ms = mark(c, {x, y});
    const AmpleVerdict v = nef_ample_check(ms);
    CHECK(v.status == Positivity::Ample);
    REQUIRE(v.witness_sum);
    CHECK(*v.witness_sum < -1);
}

TEST_CASE("curves that are neither (-1) nor (-2) outside the chains are reported") {
    Configuration c;
    const auto x = add_chain(c, "X", {4});
    c.add_curve("Z", -3);
    CHECK(nef_ample_check(mark(c, {x})).status != Positivity::Ample);
}

TEST_CASE("k_squared") {
    Configuration c;
    CHECK(k_squared(mark(c, {})) == 0);
    const auto x = add_chain(c, "X", {4});
    const auto y = add_chain(c, "Y", {2, 2, 6});
    MarkedSurface ms = mark(c, {x, y});
    ms.blowup_count = 2;
    CHECK(k_squared(ms) == 2);
}

TEST_CASE("k_squared agrees with the P/K invariant of the blown-down configuration") {
    for (int l = 1; l <= 6; ++l)
        for (const Chain& ch : wahl_generate(l)) {
            Configuration c;
            const auto ids = add_chain(c, "W", ch);
            auto ms = auto_mark(c, std::set<int>(ids.begin(), ids.end()));
            REQUIRE(ms);
            // P = 1 and a single chain of length l gives K^2 = l on a K3
            CHECK(pk_invariants(c).P == 1);
            CHECK(k_squared(*ms) == l);
            CHECK(k_squared(*ms) == pk_invariants(c).K);
        }
}

TEST_CASE("auto_mark") {
    Configuration c;
    const auto x = add_chain(c, "X", {4, 5, 3, 2, 2});
    const int d1 = c.add_curve("D1", -2), d2 = c.add_curve("D2", -2);
    c.add_node(d1, d2);
    std::set<int> support(x.begin(), x.end());
    auto ms = auto_mark(c, support);
    REQUIRE(ms);
    REQUIRE(ms->wahl_chains.size() == 1);
    // either reading direction
    Chain got = chain_of(c, ms->wahl_chains[0]);
    if (got.front() == 2) std::reverse(got.begin(), got.end());
    CHECK(got == Chain{4, 5, 3, 2, 2});
    REQUIRE(ms->ade_chains.size() == 1);
    CHECK(ms->ade_chains[0].size() == 2);
    const auto rep = singularity_report(*ms);
    REQUIRE(rep.size() == 2);
    CHECK(rep[0].n == 11);
    CHECK(same_wahl(rep[0].n, rep[0].a, 11, 3));
    CHECK(rep[0].cq.m == 121);
    CHECK(rep[1].text() == "A_2 1/3(1,2)");

    // a cycle in the support is not a chain
    Configuration cyc;
    const int p = cyc.add_curve("P", -3), q = cyc.add_curve("Q", -3), r = cyc.add_curve("R", -3);
    cyc.add_node(p, q);
    cyc.add_node(q, r);
    cyc.add_node(r, p);
    std::string why;
    CHECK_FALSE(auto_mark(cyc, {p, q, r}, &why));
    CHECK_FALSE(why.empty());
}

TEST_CASE("check_marking rejects bad markings") {
    Configuration c;
    const auto x = add_chain(c, "X", {5, 2});
    MarkedSurface ms;
    ms.surface = c;
    ms.wahl_chains = {{x[0], x[1]}};
    CHECK_NOTHROW(check_marking(ms));
    ms.wahl_chains = {{x[0]}, {x[0]}};
    CHECK_THROWS(check_marking(ms));
    const int z = c.add_curve("Z", -3);
    ms.surface = c;
    ms.wahl_chains = {{x[0], z}};
    CHECK_THROWS(check_marking(ms));
}

TEST_CASE("obstruction") {
    const Configuration a0 = load_config(default_data_dir() + "/a0.json");
    const Configuration k2 = a0.restrict({"C1", "C2", "B1", "A2", "A3", "D1"});
    Obstruction ob = obstruction(k2);
    CHECK(ob.dim == 0);
    CHECK_FALSE(ob.singular_gram);
    ob = obstruction(a0.restrict({"B1", "B2"}));
    CHECK(ob.dim == 1);
    CHECK(ob.singular_gram);
    // ordering does not matter
    CHECK(obstruction_dim(a0.restrict({"D1", "A3", "A2", "B1", "C2", "C1"})) == 0);
    // capped at the Picard rank of a K3
    CHECK(obstruction_dim(a0, 20) >= 12);
    CHECK(obstruction_dim(a0, 20) == a0.r() - std::min(20, rank_exact(intersection_matrix(a0))));
}

TEST_CASE("pi1: chains of indices 2 and 27 joined end to end") {
    Configuration c;
    const auto p = add_chain(c, "P", hj_expand(4, 1));      // (2,1)
    const auto q = add_chain(c, "Q", hj_expand(729, 215));  // (27,8)
    REQUIRE(is_wahl(chain_of(c, p))->n == 2);
    REQUIRE(is_wahl(chain_of(c, q))->n == 27);
    const int e = c.add_curve("E", -1);
    c.add_node(p.back(), e);
    c.add_node(e, q.front());
    const MarkedSurface ms = mark(c, {p, q});
    const Pi1Verdict v = pi1_verdict(ms, false);
    CHECK(v.status == Pi1Status::Trivial);
    REQUIRE(v.justification.size() == 1);
    CHECK(v.justification[0].find("gcd(2,27)=1") != std::string::npos);
}

TEST_CASE("pi1: one chain with an external curve at its end") {
    Configuration c;
    const auto p = add_chain(c, "P", {4, 5, 3, 2, 2});
    const int f = c.add_curve("F", -2);
    c.add_node(f, p.back());
    Pi1Verdict v = pi1_verdict(mark(c, {p}));
    CHECK(v.status == Pi1Status::Trivial);
    REQUIRE(v.imposed[0].size() == 1);
    CHECK(v.imposed[0][0].second == 1);
    // at the other end: t = 32 and gcd(32, 121) = 1
    Configuration d;
    const auto q = add_chain(d, "Q", {4, 5, 3, 2, 2});
    const int g = d.add_curve("G", -2);
    d.add_node(g, q.front());
    v = pi1_verdict(mark(d, {q}));
    CHECK(v.status == Pi1Status::Trivial);
    CHECK(v.imposed[0][0].second == 32);
}

TEST_CASE("pi1: inconclusive cases") {
    Configuration c;
    const auto p = add_chain(c, "P", {4});
    Pi1Verdict v = pi1_verdict(mark(c, {p}));
    CHECK(v.status == Pi1Status::Inconclusive);
    // [2,2,6] has order 16 and exponents (11,6,1); a curve at the middle imposes 6
    Configuration d;
    const auto q = add_chain(d, "Q", {2, 2, 6});
    const int f = d.add_curve("F", -2);
    d.add_node(f, q[1]);
    v = pi1_verdict(mark(d, {q}));
    CHECK(v.status == Pi1Status::Inconclusive);
    REQUIRE(v.imposed[0].size() == 1);
    CHECK(v.imposed[0][0].second == 6);
    CHECK(v.justification.back().find("gcd 2 with 16") != std::string::npos);
    // joining two chains with common factor is not enough
    Configuration e;
    const auto r = add_chain(e, "R", {4});
    const auto s = add_chain(e, "S", {4});
    const int g = e.add_curve("G", -1);
    e.add_node(r[0], g);
    e.add_node(g, s[0]);
    v = pi1_verdict(mark(e, {r, s}), false);
    CHECK(v.status == Pi1Status::Inconclusive);
}

TEST_CASE("report rendering") {
    const Configuration c = two_fours();
    auto ms = auto_mark(c, {c.id_of("A"), c.id_of("B")});
    REQUIRE(ms);
    const SurfaceReport r = assemble_report(*ms, c);
    CHECK(r.family_dim == 20);
    const auto j = report_to_json(r, c);
    CHECK(j["k2"] == 0);
    CHECK(j["singularities"].size() == 2);
    CHECK(report_to_text(r, c).find("nef-only") != std::string::npos);
}
