#include "kwahl/chain.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kw {

std::string str(const Rat& v) {
    const Int num = boost::multiprecision::numerator(v);
    const Int den = boost::multiprecision::denominator(v);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Int mod_inverse(const Int& a, const Int& m) {
    Int r0 = m, r1 = a % m;
    if (r1 < 0) r1 += m;
    Int s0 = 0, s1 = 1;
    while (r1 != 0) {
        Int q = r0 / r1;
        Int r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        Int s2 = s0 - q * s1;
        s0 = s1;
        s1 = s2;
    }
    if (r0 != 1) throw std::invalid_argument("mod_inverse: not invertible");
    s0 %= m;
    if (s0 < 0) s0 += m;
    return s0;
}

Int isqrt(const Int& v) {
    if (v < 0) throw std::invalid_argument("isqrt of negative");
    return boost::multiprecision::sqrt(v);
}

CyclicQuotient normalize(CyclicQuotient cq) {
    if (cq.m == 1) {
        cq.normalized = true;
        return cq;
    }
    Int inv = mod_inverse(cq.q, cq.m);
    if (inv < cq.q) cq.q = inv;
    cq.normalized = true;
    return cq;
}

std::string format_cq(const CyclicQuotient& cq) {
    return "1/" + cq.m.str() + "(1," + cq.q.str() + ")";
}

CyclicQuotient TSingularity::underlying() const {
    return CyclicQuotient{d * n * n, d * n * a - 1, false};
}

bool is_canonical(const Chain& c) {
    return !c.empty() && std::all_of(c.begin(), c.end(), [](int b) { return b >= 2; });
}

Chain hj_expand(const Int& m0, const Int& q0) {
    if (!(q0 > 0 && q0 < m0)) throw std::invalid_argument("hj_expand: need 0 < q < m");
    if (gcd(m0, q0) != 1) throw std::invalid_argument("hj_expand: m and q not coprime");
    Chain out;
    Int m = m0, q = q0;
    while (q != 0) {
        Int b = (m + q - 1) / q;
        if (b > std::numeric_limits<int>::max()) throw std::overflow_error("hj_expand: entry exceeds int range");
        out.push_back(static_cast<int>(b));
        Int next = b * q - m;
        m = q;
        q = next;
    }
    return out;
}

std::pair<Int, Int> hj_eval(const Chain& c) {
    if (!is_canonical(c)) throw std::invalid_argument("hj_eval: entries must be >= 2");
    Int num = c.back(), den = 1;
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) {
        Int next = Int(*it) * num - den;
        den = num;
        num = next;
    }
    return {num, den};
}

bool reduces_to_four(const Chain& c0) {
    Chain c = c0;
    while (true) {
        if (c.size() == 1) return c[0] == 4;
        if (c.empty()) return false;
        if (c.front() == 2 && c.back() >= 3) {
            c.erase(c.begin());
            c.back() -= 1;
        } else if (c.back() == 2 && c.front() >= 3) {
            c.pop_back();
            c.front() -= 1;
        } else {
            return false;
        }
    }
}

std::optional<WahlSingularity> is_wahl(const Chain& c) {
    if (!is_canonical(c)) return std::nullopt;
    auto [m, q] = hj_eval(c);
    std::optional<WahlSingularity> out;
    Int n = isqrt(m);
    if (n * n == m && (q + 1) % n == 0) {
        Int a = (q + 1) / n;
        if (a > 0 && a < n && gcd(a, n) == 1) {
            out = WahlSingularity{n, a, c, discrepancies(c)};
        }
    }
    if (out.has_value() != reduces_to_four(c))
        throw std::logic_error("is_wahl: arithmetic and rule tests disagree on " + format_chain(c));
    return out;
}

bool same_wahl(const Int& n1, const Int& a1, const Int& n2, const Int& a2) {
    return n1 == n2 && (a1 == a2 || a1 == n2 - a2);
}

std::vector<Chain> wahl_generate(int length, int cap) {
    if (length < 1) throw std::invalid_argument("wahl_generate: length must be >= 1");
    if (length > cap) throw std::invalid_argument("wahl_generate: length above enumeration cap");
    std::vector<Chain> cur{{4}};
    for (int l = 1; l < length; ++l) {
        std::vector<Chain> next;
        next.reserve(cur.size() * 2);
        for (const Chain& c : cur) {
            Chain a;
            a.reserve(c.size() + 1);
            a = c;
            a.front() += 1;
            a.push_back(2);
            next.push_back(std::move(a));
            Chain b;
            b.reserve(c.size() + 1);
            b.push_back(2);
            b.insert(b.end(), c.begin(), c.end());
            b.back() += 1;
            next.push_back(std::move(b));
        }
        cur = std::move(next);
    }
    std::sort(cur.begin(), cur.end());
    return cur;
}

std::vector<Rat> discrepancies(const Chain& c) {
    const size_t l = c.size();
    if (l == 0) return {};
    // Thomas elimination on -b_i d_i + d_{i-1} + d_{i+1} = b_i - 2.
    std::vector<Rat> diag(l), rhs(l);
    for (size_t i = 0; i < l; ++i) {
        diag[i] = -c[i];
        rhs[i] = c[i] - 2;
    }
    for (size_t i = 1; i < l; ++i) {
        if (diag[i - 1] == 0) throw std::logic_error("discrepancies: singular system");
        Rat f = Rat(1) / diag[i - 1];
        diag[i] -= f;
        rhs[i] -= f * rhs[i - 1];
    }
    std::vector<Rat> d(l);
    if (diag[l - 1] == 0) throw std::logic_error("discrepancies: singular system");
    d[l - 1] = rhs[l - 1] / diag[l - 1];
    for (size_t i = l - 1; i-- > 0;) d[i] = (rhs[i] - d[i + 1]) / diag[i];
    for (size_t i = 0; i < l; ++i) {
        Rat lhs = Rat(-c[i]) * d[i];
        if (i > 0) lhs += d[i - 1];
        if (i + 1 < l) lhs += d[i + 1];
        if (lhs != Rat(c[i] - 2)) throw std::logic_error("discrepancies: nonzero residual");
    }
    return d;
}

std::vector<long long> contract_ones(std::vector<long long> e) {
    while (true) {
        auto it = std::find(e.begin(), e.end(), 1);
        if (it == e.end()) break;
        size_t i = static_cast<size_t>(it - e.begin());
        if (e.size() == 1) throw std::invalid_argument("blow-down empties the chain");
        if (i > 0) e[i - 1] -= 1;
        if (i + 1 < e.size()) e[i + 1] -= 1;
        e.erase(e.begin() + static_cast<long>(i));
        for (long long v : e)
            if (v <= 0) throw std::invalid_argument("blow-down produced a non-negative curve");
    }
    return e;
}

CyclicQuotient blow_down_compose(const Chain& left, const Chain& right) {
    if (!is_canonical(left) || !is_canonical(right))
        throw std::invalid_argument("blow_down_compose: chains must be canonical");
    std::vector<long long> e(left.begin(), left.end());
    e.push_back(1);
    e.insert(e.end(), right.begin(), right.end());
    e = contract_ones(std::move(e));
    Chain c(e.begin(), e.end());
    auto [m, q] = hj_eval(c);
    return normalize(CyclicQuotient{m, q, false});
}

std::vector<Int> meridian_exponents(const Chain& c, Int* t0) {
    const size_t l = c.size();
    std::vector<Int> t(l + 2);
    t[l] = 1;
    t[l + 1] = 0;
    for (size_t i = l; i >= 1; --i) t[i - 1] = Int(c[i - 1]) * t[i] - t[i + 1];
    if (t0) *t0 = t[0];
    return std::vector<Int>(t.begin() + 1, t.begin() + static_cast<long>(l) + 1);
}

int length_bound(AmbientClass ambient, int k2, std::optional<int> k2_min) {
    if (k2 <= 0) throw std::invalid_argument("length_bound: K^2 must be positive");
    switch (ambient) {
        case AmbientClass::K3:
            return 4 * k2 + 1;
        case AmbientClass::ProperlyElliptic:
            return 4 * k2 - 1;
        case AmbientClass::GeneralType: {
            if (!k2_min) throw std::invalid_argument("length_bound: general type needs K_S^2");
            int diff = k2 - *k2_min;
            return diff > 1 ? 4 * diff - 3 : 2;
        }
    }
    return 0;
}

Int fibonacci(int l) {
    if (l < -1) throw std::invalid_argument("fibonacci: index below -1");
    Int a = 1, b = 1;  // F_{-1}, F_0
    for (int i = 0; i < l; ++i) {
        Int c = a + b;
        a = b;
        b = c;
    }
    return b;
}

std::optional<TSingularity> t_type(const CyclicQuotient& cq) {
    std::optional<TSingularity> best;
    if (cq.m < 2 || gcd(cq.m, cq.q) != 1) return best;
    const Int twists[2] = {cq.q, mod_inverse(cq.q, cq.m)};
    for (Int n = 2; n * n <= cq.m; ++n) {
        if (cq.m % (n * n) != 0) continue;
        Int d = cq.m / (n * n);
        for (const Int& q : twists) {
            if ((q + 1) % (d * n) != 0) continue;
            Int a = (q + 1) / (d * n);
            if (a > 0 && a < n && gcd(a, n) == 1) {
                if (!best || n > best->n) best = TSingularity{d, n, a};
                break;
            }
        }
    }
    return best;
}

std::string format_chain(const Chain& c) {
    std::string s = "[";
    for (size_t i = 0; i < c.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    return s + "]";
}

Chain parse_chain(std::string_view text) {
    Chain out;
    size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ','))
            ++i;
    };
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    bool bracket = i < text.size() && text[i] == '[';
    if (bracket) ++i;
    skip();
    while (i < text.size() && text[i] != ']') {
        if (!std::isdigit(static_cast<unsigned char>(text[i])) && text[i] != '-')
            throw std::invalid_argument("bad chain at offset " + std::to_string(i) + ": '" +
                                        std::string(text) + "'");
        size_t j = i + 1;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        out.push_back(std::stoi(std::string(text.substr(i, j - i))));
        i = j;
        skip();
    }
    if (bracket) {
        if (i >= text.size()) throw std::invalid_argument("unterminated chain: '" + std::string(text) + "'");
        ++i;
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    }
    if (i != text.size()) throw std::invalid_argument("trailing text in chain: '" + std::string(text) + "'");
    if (out.empty()) throw std::invalid_argument("empty chain");
    return out;
}

}  // namespace kw
