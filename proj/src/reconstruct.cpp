#include "kwahl/reconstruct.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace kw {

std::string section_name(int s) { return std::string(1, s < 4 ? 'A' : 'D') + std::to_string(s % 4 + 1); }

int fiber_size(int fiber) { return fiber < 2 ? 8 : 2; }

std::string component_name(int fiber, int index) {
    switch (fiber) {
        case 0: return "F" + std::to_string(index + 1);
        case 1: return "F" + std::to_string(index + 9);
        case 2: return "B" + std::to_string(index + 1);
        case 3: return "B" + std::to_string(index + 3);
        case 4: return "C" + std::to_string(index + 1);
        default: return "C" + std::to_string(index + 3);
    }
}

namespace {

struct Locator {
    int kind;  // 0 fiber component, 1 section
    int a, b;  // (fiber, index) or (section, -)
};

std::map<std::string, Locator> locator_table() {
    std::map<std::string, Locator> t;
    for (int f = 0; f < kFibers; ++f)
        for (int i = 0; i < fiber_size(f); ++i) t[component_name(f, i)] = {0, f, i};
    for (int s = 0; s < kSections; ++s) t[section_name(s)] = {1, s, 0};
    return t;
}

const std::map<std::string, Locator>& locators() {
    static const std::map<std::string, Locator> t = locator_table();
    return t;
}

// Intersection number of two distinct fiber components.
int fiber_meet(int f, int i, int j) {
    if (fiber_size(f) == 2) return 2;
    const int d = (i - j + 8) % 8;
    return d == 1 || d == 7 ? 1 : 0;
}

struct Var {
    int s, f;
};

}  // namespace

A0Constraints constraints_from(const Expected& ex, const std::vector<SurfaceRecord>& records) {
    A0Constraints c;
    c.matrices = ex.matrices;
    for (const SurfaceRecord& r : records) c.dets.emplace_back(r.curves, r.det);
    return c;
}

Configuration build_a0(const Incidence& inc) {
    Configuration c;
    for (int f = 0; f < kFibers; ++f)
        for (int i = 0; i < fiber_size(f); ++i) c.add_curve(component_name(f, i), -2);
    for (int s = 0; s < kSections; ++s) c.add_curve(section_name(s), -2);
    for (int f = 0; f < 2; ++f)
        for (int i = 0; i < 8; ++i) c.add_node(c.id_of(component_name(f, i)), c.id_of(component_name(f, (i + 1) % 8)));
    for (int f = 2; f < kFibers; ++f)
        for (int k = 0; k < 2; ++k) c.add_node(c.id_of(component_name(f, 0)), c.id_of(component_name(f, 1)));
    for (int s = 0; s < kSections; ++s)
        for (int f = 0; f < kFibers; ++f)
            c.add_node(c.id_of(section_name(s)), c.id_of(component_name(f, inc[static_cast<size_t>(s)][static_cast<size_t>(f)])));
    return c;
}

Incidence incidence_of(const Configuration& a0) {
    Incidence inc;
    for (int s = 0; s < kSections; ++s)
        for (int f = 0; f < kFibers; ++f) {
            int hit = -1;
            for (int i = 0; i < fiber_size(f); ++i)
                if (a0.meet(a0.id_of(section_name(s)), a0.id_of(component_name(f, i))) > 0) {
                    if (hit >= 0) throw std::invalid_argument(section_name(s) + " meets a fiber twice");
                    hit = i;
                }
            if (hit < 0) throw std::invalid_argument(section_name(s) + " misses a fiber");
            inc[static_cast<size_t>(s)][static_cast<size_t>(f)] = hit;
        }
    return inc;
}

namespace {

struct Locals {
    std::vector<Locator> loc;
};

Locals locate(const std::vector<std::string>& names) {
    Locals l;
    for (const std::string& n : names) {
        auto it = locators().find(n);
        if (it == locators().end()) throw std::invalid_argument("unknown curve " + n);
        l.loc.push_back(it->second);
    }
    return l;
}

long long entry(const Locator& x, const Locator& y, const Incidence& inc) {
    if (x.kind == 0 && y.kind == 0) return x.a == y.a ? fiber_meet(x.a, x.b, y.b) : 0;
    if (x.kind == 1 && y.kind == 1) return 0;
    const Locator& s = x.kind == 1 ? x : y;
    const Locator& f = x.kind == 1 ? y : x;
    return inc[static_cast<size_t>(s.a)][static_cast<size_t>(f.a)] == f.b ? 1 : 0;
}

__int128 det_of(const Locals& l, const Incidence& inc) {
    const size_t n = l.loc.size();
    std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) m[i][j] = i == j ? -2 : entry(l.loc[i], l.loc[j], inc);
    return det_bareiss<__int128>(m);
}

// Shioda height pairing with section `o` as origin, scaled by 8 so it stays integral.
bool heights_vanish(const Incidence& inc) {
    auto contr8 = [&](int f, int o, int p, int q) {
        const int n = fiber_size(f);
        int i = (inc[static_cast<size_t>(p)][static_cast<size_t>(f)] - inc[static_cast<size_t>(o)][static_cast<size_t>(f)] + n) % n;
        int j = (inc[static_cast<size_t>(q)][static_cast<size_t>(f)] - inc[static_cast<size_t>(o)][static_cast<size_t>(f)] + n) % n;
        if (i > j) std::swap(i, j);
        return 8 * i * (n - j) / n;
    };
    for (int o = 0; o < kSections; ++o)
        for (int p = 0; p < kSections; ++p) {
            if (p == o) continue;
            for (int q = p; q < kSections; ++q) {
                if (q == o) continue;
                int total = 0;
                for (int f = 0; f < kFibers; ++f) total += contr8(f, o, p, q);
                // <P,P> = 4 - sum = 0 and <P,Q> = 2 - sum = 0 for disjoint torsion sections
                if (total != (p == q ? 32 : 16)) return false;
            }
        }
    return true;
}

}  // namespace

ReconstructResult reconstruct_a0(const A0Constraints& cons, size_t max_models) {
    ReconstructResult res;
    // Unary filtering from printed entries.
    std::array<std::array<std::vector<char>, kFibers>, kSections> dom;
    for (int s = 0; s < kSections; ++s)
        for (int f = 0; f < kFibers; ++f) dom[static_cast<size_t>(s)][static_cast<size_t>(f)].assign(static_cast<size_t>(fiber_size(f)), 1);
    std::array<std::array<int, kFibers>, kSections> weight{};

    struct DetCon {
        Locals l;
        Int det;
    };
    std::vector<DetCon> dets;
    std::vector<std::vector<std::pair<int, int>>> touched;

    auto add_subset = [&](const std::vector<std::string>& names, const Int& det) {
        DetCon dc{locate(names), det};
        std::set<int> secs, fibs;
        for (const Locator& x : dc.l.loc) (x.kind == 1 ? secs : fibs).insert(x.a);
        std::vector<std::pair<int, int>> vs;
        for (int s : secs)
            for (int f : fibs) {
                vs.push_back({s, f});
                weight[static_cast<size_t>(s)][static_cast<size_t>(f)]++;
            }
        touched.push_back(vs);
        dets.push_back(std::move(dc));
    };
    for (const PrintedMatrix& pm : cons.matrices) {
        Locals l = locate(pm.curves);
        for (size_t i = 0; i < l.loc.size(); ++i)
            for (size_t j = 0; j < l.loc.size(); ++j) {
                const Locator &x = l.loc[i], &y = l.loc[j];
                const long long want = pm.rows.at(i).at(j);
                if (i == j) {
                    if (want != -2) return res;
                    continue;
                }
                if (x.kind == y.kind) {
                    Incidence dummy{};
                    if (entry(x, y, dummy) != want) {
                        // structural entry contradicts the fibration skeleton
                        return res;
                    }
                    continue;
                }
                const Locator& s = x.kind == 1 ? x : y;
                const Locator& f = x.kind == 1 ? y : x;
                auto& d = dom[static_cast<size_t>(s.a)][static_cast<size_t>(f.a)];
                if (want == 1) {
                    for (int v = 0; v < fiber_size(f.a); ++v)
                        if (v != f.b) d[static_cast<size_t>(v)] = 0;
                } else if (want == 0) {
                    d[static_cast<size_t>(f.b)] = 0;
                } else {
                    return res;
                }
            }
        add_subset(pm.curves, pm.det);
    }
    for (const auto& [names, det] : cons.dets) add_subset(names, det);

    // Variable order: smallest domain first, then most constrained.
    std::vector<Var> order;
    for (int s = 0; s < kSections; ++s)
        for (int f = 0; f < kFibers; ++f) order.push_back({s, f});
    auto dsize = [&](const Var& v) {
        const auto& d = dom[static_cast<size_t>(v.s)][static_cast<size_t>(v.f)];
        return std::count(d.begin(), d.end(), 1);
    };
    std::stable_sort(order.begin(), order.end(), [&](const Var& x, const Var& y) {
        if (dsize(x) != dsize(y)) return dsize(x) < dsize(y);
        return weight[static_cast<size_t>(x.s)][static_cast<size_t>(x.f)] > weight[static_cast<size_t>(y.s)][static_cast<size_t>(y.f)];
    });
    std::map<std::pair<int, int>, int> pos;
    for (size_t i = 0; i < order.size(); ++i) pos[{order[i].s, order[i].f}] = static_cast<int>(i);
    // Each determinant is checked as soon as its last variable is assigned.
    std::vector<std::vector<size_t>> due(order.size() + 1);
    for (size_t k = 0; k < dets.size(); ++k) {
        int last = -1;
        for (auto [s, f] : touched[k]) last = std::max(last, pos[{s, f}]);
        due[static_cast<size_t>(last + 1)].push_back(k);
    }

    Incidence inc{};
    std::function<void(size_t)> rec = [&](size_t i) {
        if (res.truncated) return;
        ++res.nodes;
        for (size_t k : due[i])
            if (Int(static_cast<long long>(det_of(dets[k].l, inc))) != dets[k].det) return;
        if (i == order.size()) {
            if (cons.height_axioms && !heights_vanish(inc)) return;
            if (res.models.size() >= max_models) {
                res.truncated = true;
                return;
            }
            res.models.push_back(inc);
            return;
        }
        const Var v = order[i];
        const auto& d = dom[static_cast<size_t>(v.s)][static_cast<size_t>(v.f)];
        for (int val = 0; val < fiber_size(v.f); ++val) {
            if (!d[static_cast<size_t>(val)]) continue;
            inc[static_cast<size_t>(v.s)][static_cast<size_t>(v.f)] = val;
            rec(i + 1);
        }
    };
    rec(0);

    for (int s = 0; s < kSections; ++s)
        for (int f = 0; f < kFibers; ++f) {
            std::set<int> vals;
            for (const Incidence& m : res.models) vals.insert(m[static_cast<size_t>(s)][static_cast<size_t>(f)]);
            if (vals.size() > 1) {
                Disagreement d{section_name(s), f, {}};
                for (int v : vals) d.components.push_back(component_name(f, v));
                res.undetermined.push_back(d);
            }
        }
    return res;
}

}  // namespace kw
