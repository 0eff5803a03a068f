#include "kwahl/surface.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kw {

namespace {

bool is_exceptional(const Curve& c) { return c.origin_step >= 0; }

// Orders a path component; returns empty when the component is not a simple path.
std::vector<int> walk_path(const Configuration& s, const std::vector<int>& comp,
                           const std::map<int, std::vector<int>>& adj) {
    if (comp.size() == 1) return comp;
    std::vector<int> ends;
    for (int v : comp) {
        const auto& nb = adj.at(v);
        if (nb.size() > 2) return {};
        if (nb.size() == 2 && nb[0] == nb[1]) return {};
        if (nb.size() == 1) ends.push_back(v);
    }
    if (ends.size() != 2) return {};
    std::vector<int> path{std::min(ends[0], ends[1])};
    int prev = -1;
    while (path.size() < comp.size()) {
        int cur = path.back(), nxt = -1;
        for (int w : adj.at(cur))
            if (w != prev) nxt = w;
        if (nxt < 0) return {};
        prev = cur;
        path.push_back(nxt);
    }
    (void)s;
    return path;
}

std::vector<std::vector<int>> components(const std::vector<int>& verts, const std::map<int, std::vector<int>>& adj) {
    std::vector<std::vector<int>> out;
    std::set<int> seen;
    for (int v : verts) {
        if (seen.count(v)) continue;
        std::vector<int> comp, stack{v};
        seen.insert(v);
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            comp.push_back(x);
            for (int y : adj.at(x))
                if (!seen.count(y)) {
                    seen.insert(y);
                    stack.push_back(y);
                }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(comp);
    }
    return out;
}

}  // namespace

Chain chain_of(const Configuration& c, const std::vector<int>& ids) {
    Chain out;
    for (int id : ids) out.push_back(-c.curve(id).self_int);
    return out;
}

std::optional<MarkedSurface> auto_mark(const Configuration& s, const std::set<int>& support, std::string* why) {
    auto fail = [&](const std::string& msg) -> std::optional<MarkedSurface> {
        if (why) *why = msg;
        return std::nullopt;
    };
    auto in_support = [&](const Curve& c) { return support.count(c.id) || is_exceptional(c); };

    std::vector<int> wahl_v, ade_v;
    std::set<int> wahl_set, ade_set;
    for (const Curve& c : s.curves) {
        if (in_support(c) && c.self_int <= -2) {
            wahl_v.push_back(c.id);
            wahl_set.insert(c.id);
        }
    }
    std::set<int> touches_support;
    for (const Node& n : s.nodes) {
        const bool sa = in_support(s.curve(n.a)), sb = in_support(s.curve(n.b));
        if (sa) touches_support.insert(n.b);
        if (sb) touches_support.insert(n.a);
    }
    for (const Curve& c : s.curves) {
        if (!in_support(c) && c.self_int == -2 && !touches_support.count(c.id) && c.self_nodes == 0) {
            ade_v.push_back(c.id);
            ade_set.insert(c.id);
        }
    }

    MarkedSurface ms;
    ms.surface = s;
    ms.blowup_count = s.blowups;
    for (int pass = 0; pass < 2; ++pass) {
        const auto& verts = pass == 0 ? wahl_v : ade_v;
        const auto& vset = pass == 0 ? wahl_set : ade_set;
        std::map<int, std::vector<int>> adj;
        for (int v : verts) adj[v];
        for (const Node& n : s.nodes) {
            if (!vset.count(n.a) || !vset.count(n.b)) continue;
            if (n.a == n.b) return fail("curve " + s.curve(n.a).name + " has a self-node");
            adj[n.a].push_back(n.b);
            adj[n.b].push_back(n.a);
        }
        for (const auto& comp : components(verts, adj)) {
            std::vector<int> path = walk_path(s, comp, adj);
            if (path.empty()) {
                std::string names;
                for (int v : comp) names += (names.empty() ? "" : " ") + s.curve(v).name;
                return fail(std::string(pass == 0 ? "candidate Wahl component" : "Du Val component") +
                            " is not a chain: " + names);
            }
            Chain fwd = chain_of(s, path), bwd(fwd.rbegin(), fwd.rend());
            if (bwd < fwd) std::reverse(path.begin(), path.end());
            (pass == 0 ? ms.wahl_chains : ms.ade_chains).push_back(path);
        }
    }
    auto chain_key = [&](const std::vector<int>& p) { return std::make_pair(-static_cast<long>(p.size()), chain_of(s, p)); };
    std::sort(ms.wahl_chains.begin(), ms.wahl_chains.end(),
              [&](const auto& x, const auto& y) { return chain_key(x) > chain_key(y); });
    std::sort(ms.ade_chains.begin(), ms.ade_chains.end());
    for (const Curve& c : s.curves)
        if (!wahl_set.count(c.id) && !ade_set.count(c.id)) ms.free_curves.push_back(c.id);
    return ms;
}

void check_marking(const MarkedSurface& ms) {
    const Configuration& s = ms.surface;
    std::set<int> used;
    for (const auto& group : {ms.wahl_chains, ms.ade_chains}) {
        for (const auto& ch : group) {
            for (size_t i = 0; i < ch.size(); ++i) {
                if (!used.insert(ch[i]).second)
                    throw std::invalid_argument("marking: curve " + s.curve(ch[i]).name + " used twice");
                if (i + 1 < ch.size() && s.meet(ch[i], ch[i + 1]) != 1)
                    throw std::invalid_argument("marking: consecutive curves must share exactly one node");
            }
        }
    }
    for (const auto& ch : ms.wahl_chains)
        if (!is_wahl(chain_of(s, ch)))
            throw std::invalid_argument("marking: not a Wahl chain " + format_chain(chain_of(s, ch)));
    for (const auto& ch : ms.ade_chains)
        for (int v : ch) {
            if (s.curve(v).self_int != -2) throw std::invalid_argument("marking: Du Val chain needs (-2)-curves");
            for (const auto& w : ms.wahl_chains)
                for (int u : w)
                    if (s.meet(u, v)) throw std::invalid_argument("marking: Du Val chain meets a Wahl chain");
        }
}

long long k_squared(const MarkedSurface& ms) {
    long long total = ms.surface.ambient.ks2 - ms.blowup_count;
    for (const auto& ch : ms.wahl_chains) total += static_cast<long long>(ch.size());
    return total;
}

std::string to_string(Positivity p) {
    switch (p) {
        case Positivity::Ample: return "ample";
        case Positivity::NefOnly: return "nef-only";
        case Positivity::NotNef: return "not-nef";
    }
    return "?";
}

AmpleVerdict nef_ample_check(const MarkedSurface& ms) {
    const Configuration& s = ms.surface;
    AmpleVerdict v;
    std::map<int, Rat> disc;
    std::map<int, std::pair<size_t, size_t>> where;  // curve -> (chain, position)
    for (size_t j = 0; j < ms.wahl_chains.size(); ++j) {
        const auto& ch = ms.wahl_chains[j];
        auto d = discrepancies(chain_of(s, ch));
        for (size_t i = 0; i < ch.size(); ++i) {
            disc[ch[i]] = d[i];
            where[ch[i]] = {j, i};
        }
    }
    std::set<int> ade;
    for (const auto& ch : ms.ade_chains) ade.insert(ch.begin(), ch.end());

    auto downgrade = [&](Positivity p) {
        if (static_cast<int>(p) > static_cast<int>(v.status)) v.status = p;
    };
    std::optional<Rat> worst;
    bool other_defect = false;
    // every curve outside the marked chains, whatever free_curves says
    for (const Curve& c : s.curves) {
        const int id = c.id;
        if (disc.count(id) || ade.count(id)) continue;
        Rat sum = 0;
        std::vector<int> hits;
        bool meets_minus_one = false;
        for (const Node& n : s.nodes) {
            if (n.a != id && n.b != id) continue;
            if (n.a == n.b) continue;
            int other = n.a == id ? n.b : n.a;
            auto it = disc.find(other);
            if (it != disc.end()) {
                sum += it->second;
                hits.push_back(other);
            } else if (s.curve(other).self_int == -1) {
                meets_minus_one = true;
            }
        }
        if (c.self_int == -1) {
            if (!worst || sum > *worst) {
                worst = sum;
                v.witness = id;
                v.witness_sum = sum;
            }
            if (sum > -1) {
                downgrade(Positivity::NotNef);
                v.notes.push_back("(-1)-curve " + c.name + " has s = " + str(sum) + " > -1");
            } else if (sum == -1) {
                downgrade(Positivity::NefOnly);
                v.notes.push_back("(-1)-curve " + c.name + " has s = -1");
                if (hits.size() == 2 && where[hits[0]].first != where[hits[1]].first) {
                    auto [j0, i0] = where[hits[0]];
                    auto [j1, i1] = where[hits[1]];
                    Chain a = chain_of(s, ms.wahl_chains[j0]), b = chain_of(s, ms.wahl_chains[j1]);
                    const bool a_end = i0 == 0 || i0 + 1 == a.size();
                    const bool b_end = i1 == 0 || i1 + 1 == b.size();
                    if (a_end && b_end) {
                        if (i0 == 0) std::reverse(a.begin(), a.end());
                        if (i1 + 1 == b.size() && b.size() > 1) std::reverse(b.begin(), b.end());
                        v.contractions.push_back(blow_down_compose(a, b));
                    } else {
                        other_defect = true;
                    }
                } else {
                    other_defect = true;
                }
            }
        } else if (c.self_int == -2 && c.self_nodes == 0) {
            if (hits.empty()) {
                downgrade(Positivity::NefOnly);
                other_defect = true;
                v.notes.push_back(std::string("(-2)-curve ") + c.name + " has degree 0" +
                                  (meets_minus_one ? " (meets only (-1)-curves)" : " (isolated)"));
                if (!v.witness) v.witness = id;
            }
        } else {
            downgrade(Positivity::NotNef);
            v.notes.push_back("curve " + c.name + " with self-intersection " + std::to_string(c.self_int) +
                              " lies outside every chain");
            v.witness = id;
        }
    }
    if (v.status == Positivity::Ample && k_squared(ms) <= 0) {
        v.status = Positivity::NefOnly;
        v.notes.push_back("K^2 <= 0");
        other_defect = true;
    }
    v.canonical_ample = v.status == Positivity::NefOnly && !other_defect && k_squared(ms) > 0;
    return v;
}

Obstruction obstruction(const Configuration& base, std::optional<int> rank_cap) {
    const IntMatrix g = intersection_matrix(base);
    int rank = rank_exact(g);
    const bool singular = rank < base.r();
    if (rank_cap) rank = std::min(rank, *rank_cap);
    return {base.r() - rank, rank, singular};
}

int obstruction_dim(const Configuration& base, std::optional<int> rank_cap) {
    return obstruction(base, rank_cap).dim;
}

std::string Singularity::text() const {
    if (kind == Kind::A) return "A_" + std::to_string(k) + " " + format_cq(cq);
    return "(" + n.str() + "," + a.str() + ") " + format_cq(cq);
}

std::vector<Singularity> singularity_report(const MarkedSurface& ms) {
    std::vector<Singularity> out;
    for (const auto& ch : ms.wahl_chains) {
        Chain c = chain_of(ms.surface, ch);
        auto w = is_wahl(c);
        if (!w) throw std::invalid_argument("singularity_report: not a Wahl chain " + format_chain(c));
        Singularity s;
        s.kind = Singularity::Kind::Wahl;
        s.n = w->n;
        s.a = w->a;
        s.cq = CyclicQuotient{w->n * w->n, w->n * w->a - 1, false};
        out.push_back(s);
    }
    for (const auto& ch : ms.ade_chains) {
        Singularity s;
        s.kind = Singularity::Kind::A;
        s.k = static_cast<int>(ch.size());
        s.cq = CyclicQuotient{Int(s.k + 1), Int(s.k), false};
        out.push_back(s);
    }
    return out;
}

Pi1Verdict pi1_verdict(const MarkedSurface& ms, bool single_incidence) {
    const Configuration& s = ms.surface;
    Pi1Verdict v;
    const size_t P = ms.wahl_chains.size();
    std::vector<Int> n(P), order(P), g(P);
    std::vector<std::vector<Int>> t(P);
    std::map<int, std::pair<size_t, size_t>> where;
    for (size_t j = 0; j < P; ++j) {
        const auto& ch = ms.wahl_chains[j];
        auto w = is_wahl(chain_of(s, ch));
        if (!w) throw std::invalid_argument("pi1_verdict: marked chain is not Wahl");
        n[j] = w->n;
        order[j] = w->n * w->n;
        g[j] = order[j];
        t[j] = meridian_exponents(chain_of(s, ch));
        for (size_t i = 0; i < ch.size(); ++i) where[ch[i]] = {j, i};
    }
    v.imposed.assign(P, {});
    if (P == 0) {
        v.status = Pi1Status::Trivial;
        v.justification.push_back("no Wahl chains");
        return v;
    }

    // Transversal rational curves: everything outside the Wahl chains without self-nodes.
    struct Hit {
        size_t chain, pos;
    };
    std::vector<std::pair<int, std::vector<Hit>>> curves;
    for (const Curve& c : s.curves) {
        if (where.count(c.id) || c.self_nodes > 0) continue;
        std::vector<Hit> hits;
        for (const Node& nd : s.nodes) {
            if (nd.a == nd.b || (nd.a != c.id && nd.b != c.id)) continue;
            int other = nd.a == c.id ? nd.b : nd.a;
            auto it = where.find(other);
            if (it != where.end()) hits.push_back({it->second.first, it->second.second});
        }
        if (!hits.empty()) curves.emplace_back(c.id, hits);
    }

    std::vector<bool> killed(P, false);
    auto is_end = [&](size_t j, size_t i) { return i == 0 || i + 1 == ms.wahl_chains[j].size(); };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [cid, hits] : curves) {
            std::vector<Hit> active;
            for (const Hit& h : hits)
                if (!killed[h.chain]) active.push_back(h);
            if (active.size() == 1 && single_incidence) {
                const Hit h = active[0];
                const Int& ti = t[h.chain][h.pos];
                auto& imp = v.imposed[h.chain];
                if (std::none_of(imp.begin(), imp.end(), [&](const auto& p) { return p.first == static_cast<int>(h.pos); }))
                    imp.emplace_back(static_cast<int>(h.pos), ti);
                Int ng = gcd(g[h.chain], ti);
                if (ng != g[h.chain]) {
                    g[h.chain] = ng;
                    changed = true;
                }
                if (ng == 1) {
                    killed[h.chain] = true;
                    std::ostringstream os;
                    os << "chain " << h.chain + 1 << ": " << s.curve(cid).name << " meets curve "
                       << h.pos + 1;
                    if (is_end(h.chain, h.pos) && hits.size() == 1) os << " (an end) once and no other chain";
                    else os << " once; exponent gcd with " << order[h.chain] << " is 1";
                    v.justification.push_back(os.str());
                }
            } else if (active.size() == 2 && active[0].chain != active[1].chain &&
                       is_end(active[0].chain, active[0].pos) && is_end(active[1].chain, active[1].pos) &&
                       gcd(n[active[0].chain], n[active[1].chain]) == 1) {
                killed[active[0].chain] = killed[active[1].chain] = true;
                changed = true;
                std::ostringstream os;
                os << "chains " << active[0].chain + 1 << " and " << active[1].chain + 1 << ": "
                   << s.curve(cid).name << " joins their ends and gcd(" << n[active[0].chain] << ","
                   << n[active[1].chain] << ")=1";
                v.justification.push_back(os.str());
            }
        }
    }
    const bool all = std::all_of(killed.begin(), killed.end(), [](bool b) { return b; });
    v.status = all ? Pi1Status::Trivial : Pi1Status::Inconclusive;
    if (!all)
        for (size_t j = 0; j < P; ++j)
            if (!killed[j])
                v.justification.push_back("chain " + std::to_string(j + 1) + ": imposed exponents leave gcd " +
                                          g[j].str() + " with " + order[j].str());
    return v;
}

SurfaceReport assemble_report(const MarkedSurface& ms, const Configuration& base) {
    SurfaceReport r;
    r.k2 = k_squared(ms);
    r.singularities = singularity_report(ms);
    r.ample = nef_ample_check(ms);
    Obstruction ob = obstruction(base);
    r.obstruction_dim = ob.dim;
    r.obstruction_caveat = ob.singular_gram;
    r.pi1 = pi1_verdict(ms);
    r.family_dim = 20 - 2 * r.k2;
    return r;
}

nlohmann::ordered_json report_to_json(const SurfaceReport& r, const Configuration& surface) {
    nlohmann::ordered_json j;
    j["k2"] = r.k2;
    j["singularities"] = nlohmann::ordered_json::array();
    for (const Singularity& s : r.singularities) {
        nlohmann::ordered_json sj;
        if (s.kind == Singularity::Kind::Wahl) {
            sj["type"] = "wahl";
            sj["n"] = s.n.str();
            sj["a"] = s.a.str();
        } else {
            sj["type"] = "A";
            sj["k"] = s.k;
        }
        sj["m"] = s.cq.m.str();
        sj["q"] = s.cq.q.str();
        j["singularities"].push_back(sj);
    }
    nlohmann::ordered_json aj;
    aj["status"] = to_string(r.ample.status);
    aj["witness"] = r.ample.witness ? nlohmann::ordered_json(surface.curve(*r.ample.witness).name) : nlohmann::ordered_json();
    aj["witness_sum"] = r.ample.witness_sum ? nlohmann::ordered_json(str(*r.ample.witness_sum)) : nlohmann::ordered_json();
    aj["notes"] = r.ample.notes;
    j["positivity"] = aj;
    j["obstruction_dim"] = r.obstruction_dim;
    j["obstruction_caveat"] = r.obstruction_caveat;
    nlohmann::ordered_json pj;
    pj["status"] = r.pi1.status == Pi1Status::Trivial ? "trivial" : "inconclusive";
    pj["justification"] = r.pi1.justification;
    j["pi1"] = pj;
    j["family_dim"] = r.family_dim;
    return j;
}

std::string report_to_text(const SurfaceReport& r, const Configuration& surface) {
    std::ostringstream os;
    os << "K^2 = " << r.k2 << "\n";
    os << "singularities:";
    for (const Singularity& s : r.singularities) os << "  " << s.text();
    os << "\n";
    os << "positivity: " << to_string(r.ample.status);
    if (r.ample.witness) {
        os << " (witness " << surface.curve(*r.ample.witness).name;
        if (r.ample.witness_sum) os << ", s = " << str(*r.ample.witness_sum);
        os << ")";
    }
    os << "\n";
    os << "obstruction_dim: " << r.obstruction_dim << (r.obstruction_caveat ? " (singular Gram matrix)" : "") << "\n";
    os << "pi1: " << (r.pi1.status == Pi1Status::Trivial ? "trivial" : "inconclusive") << "\n";
    for (const auto& line : r.pi1.justification) os << "  " << line << "\n";
    os << "family_dim: " << r.family_dim << "\n";
    return os.str();
}

}  // namespace kw
