#pragma once

#include "kwahl/arith.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kw {

// Hirzebruch-Jung chain [b1,...,bl]; canonical chains have every entry >= 2.
using Chain = std::vector<int>;

// 1/m(1,q)
struct CyclicQuotient {
    Int m;
    Int q;
    bool normalized = false;

    bool operator==(const CyclicQuotient& o) const { return m == o.m && q == o.q; }
};

// Replaces q by min(q, q^-1 mod m). Idempotent.
CyclicQuotient normalize(CyclicQuotient cq);
std::string format_cq(const CyclicQuotient& cq);

struct WahlSingularity {
    Int n;
    Int a;
    Chain chain;
    std::vector<Rat> discrepancies;
};

// 1/(d n^2)(1, d n a - 1)
struct TSingularity {
    Int d;
    Int n;
    Int a;
    CyclicQuotient underlying() const;
};

inline constexpr int kWahlEnumerationCap = 25;

bool is_canonical(const Chain& c);

Chain hj_expand(const Int& m, const Int& q);
std::pair<Int, Int> hj_eval(const Chain& c);

std::optional<WahlSingularity> is_wahl(const Chain& c);
// (n,a) read from the other end of the chain is (n, n-a); both name the same singularity.
bool same_wahl(const Int& n1, const Int& a1, const Int& n2, const Int& a2);
// Undo the two growth rules until [4] is reached (or the chain gets stuck).
bool reduces_to_four(const Chain& c);
std::vector<Chain> wahl_generate(int length, int cap = kWahlEnumerationCap);

std::vector<Rat> discrepancies(const Chain& c);

// [left, 1, right] with every (-1) contracted, evaluated and normalized.
CyclicQuotient blow_down_compose(const Chain& left, const Chain& right);
// Contract every entry equal to 1 in place; throws on over-contraction.
std::vector<long long> contract_ones(std::vector<long long> entries);

// t_1..t_l, meridian exponents relative to the meridian of the last curve.
std::vector<Int> meridian_exponents(const Chain& c, Int* t0 = nullptr);

enum class AmbientClass { K3, ProperlyElliptic, GeneralType };
int length_bound(AmbientClass ambient, int k2, std::optional<int> k2_min = std::nullopt);

// F_{-1} = F_0 = 1, F_l = F_{l-1} + F_{l-2}.
Int fibonacci(int l);

// Largest-index T description of a cyclic quotient, in either orientation.
std::optional<TSingularity> t_type(const CyclicQuotient& cq);

std::string format_chain(const Chain& c);
// Accepts "[4,5,3]", "4 5 3", "[4, 5, 3]".
Chain parse_chain(std::string_view text);

}  // namespace kw
