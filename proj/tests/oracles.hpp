#pragma once

// Slow, independent reference implementations used only by the tests.

#include "kwahl/arith.hpp"
#include "kwahl/config.hpp"

#include <stdexcept>
#include <vector>

namespace oracle {

using kw::Int;
using kw::Rat;

// Continued fraction by repeated ceiling on the exact rational m/q.
inline std::vector<int> expand(const Int& m, const Int& q) {
    std::vector<int> out;
    Rat x(m, q);
    while (true) {
        Int b = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
        if (Rat(b) != x) b += 1;
        out.push_back(static_cast<int>(b));
        if (Rat(b) == x) break;
        x = Rat(1) / (Rat(b) - x);
    }
    return out;
}

// b1 - 1/(b2 - 1/(...)) evaluated top-down as a rational.
inline std::pair<Int, Int> eval(const std::vector<int>& c) {
    Rat x = c.back();
    for (size_t i = c.size() - 1; i-- > 0;) x = Rat(c[i]) - Rat(1) / x;
    return {boost::multiprecision::numerator(x), boost::multiprecision::denominator(x)};
}

// Laplace expansion along the first row.
inline Rat det_cofactor(const std::vector<std::vector<Rat>>& m) {
    const size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    Rat total = 0;
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j] == 0) continue;
        std::vector<std::vector<Rat>> minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<Rat> row;
            for (size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(row);
        }
        Rat term = m[0][j] * det_cofactor(minor);
        total += j % 2 ? -term : term;
    }
    return total;
}

inline Int det_cofactor(const kw::IntMatrix& m) {
    std::vector<std::vector<Rat>> r(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        for (long long v : m[i]) r[i].push_back(v);
    return boost::multiprecision::numerator(det_cofactor(r));
}

// Sum over permutations with explicit parity; only for tiny matrices.
inline Int det_permutations(const kw::IntMatrix& m) {
    const size_t n = m.size();
    std::vector<size_t> p(n);
    for (size_t i = 0; i < n; ++i) p[i] = i;
    Int total = 0;
    do {
        int inversions = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) inversions += p[i] > p[j];
        Int prod = 1;
        for (size_t i = 0; i < n && prod != 0; ++i) prod *= m[i][p[i]];
        total += inversions % 2 ? -prod : prod;
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

// Cramer's rule on -b_i d_i + d_{i-1} + d_{i+1} = b_i - 2.
inline std::vector<Rat> discrepancies_cramer(const std::vector<int>& c) {
    const size_t l = c.size();
    std::vector<std::vector<Rat>> a(l, std::vector<Rat>(l, 0));
    std::vector<Rat> rhs(l);
    for (size_t i = 0; i < l; ++i) {
        a[i][i] = -c[i];
        if (i > 0) a[i][i - 1] = 1;
        if (i + 1 < l) a[i][i + 1] = 1;
        rhs[i] = c[i] - 2;
    }
    const Rat d = det_cofactor(a);
    std::vector<Rat> out;
    for (size_t j = 0; j < l; ++j) {
        auto aj = a;
        for (size_t i = 0; i < l; ++i) aj[i][j] = rhs[i];
        out.push_back(det_cofactor(aj) / d);
    }
    return out;
}

// Abelian group on e_1..e_l with e_{i-1} e_{i+1} = e_i^{b_i} (e_0 = e_{l+1} = 1).
// It is cyclic of order D = det, generated by e_l. e_i = e_l^t iff e_i - t e_l lies in the
// relation lattice, i.e. adj(R)(e_i - t e_l) = 0 mod D; try every t below D.
inline std::vector<Int> meridians_presentation(const std::vector<int>& c) {
    const size_t l = c.size();
    std::vector<std::vector<Rat>> rel(l, std::vector<Rat>(l, 0));
    for (size_t i = 0; i < l; ++i) {
        rel[i][i] = c[i];
        if (i > 0) rel[i][i - 1] = -1;
        if (i + 1 < l) rel[i][i + 1] = -1;
    }
    const long long D = static_cast<long long>(boost::multiprecision::numerator(det_cofactor(rel)));
    // adjugate via cofactors
    std::vector<std::vector<long long>> adj(l, std::vector<long long>(l));
    for (size_t i = 0; i < l; ++i)
        for (size_t j = 0; j < l; ++j) {
            std::vector<std::vector<Rat>> minor;
            for (size_t r = 0; r < l; ++r) {
                if (r == j) continue;
                std::vector<Rat> row;
                for (size_t k = 0; k < l; ++k)
                    if (k != i) row.push_back(rel[r][k]);
                minor.push_back(row);
            }
            long long v = static_cast<long long>(boost::multiprecision::numerator(det_cofactor(minor)));
            adj[i][j] = (i + j) % 2 ? -v : v;
        }
    std::vector<Int> out;
    for (size_t i = 0; i < l; ++i) {
        if (i + 1 == l) {
            out.push_back(1);
            continue;
        }
        long long found = -1;
        for (long long t = 0; t < D && found < 0; ++t) {
            bool ok = true;
            for (size_t r = 0; r < l && ok; ++r) ok = (adj[r][i] - t * adj[r][l - 1]) % D == 0;
            if (ok) found = t;
        }
        if (found < 0) throw std::logic_error("presentation oracle: no exponent");
        out.push_back(found);
    }
    return out;
}

// [3,...,3,5,3,...,3,2] read in either direction with the 5 placed by the alternating growth.
inline bool fibonacci_shape(std::vector<int> c) {
    if (c.size() == 1) return c[0] == 4;
    if (c.front() == 2) std::reverse(c.begin(), c.end());
    if (c.back() != 2) return false;
    int fives = 0;
    for (size_t i = 0; i + 1 < c.size(); ++i) {
        if (c[i] == 5) ++fives;
        else if (c[i] != 3) return false;
    }
    return fives == 1;
}

}  // namespace oracle
