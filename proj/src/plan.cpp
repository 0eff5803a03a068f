#include "kwahl/plan.hpp"
#include "plan_internal.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kw {

namespace detail {

GroupShape group_shape(const std::string& moves) {
    GroupShape g;
    g.inner = {1};
    size_t p = 0;
    bool seen_l = false, seen_r = false;
    for (char mv : moves) {
        if (mv == 'R') {
            g.inner[p] += 1;
            if (p + 1 < g.inner.size()) g.inner[p + 1] += 1;
            else if (!seen_l) g.lead_r += 1;
            g.inner.insert(g.inner.begin() + static_cast<long>(p) + 1, 1);
            p += 1;
            seen_r = true;
        } else {
            g.inner[p] += 1;
            if (p > 0) g.inner[p - 1] += 1;
            else if (!seen_r) g.lead_l += 1;
            g.inner.insert(g.inner.begin() + static_cast<long>(p), 1);
            seen_l = true;
        }
    }
    return g;
}

namespace {

void words_rec(std::vector<int>& v, size_t p, const std::vector<int>& target, std::string& cur,
               std::vector<std::string>& out) {
    // Curves no longer adjacent to the newest one are frozen and must already agree with the target.
    if (v.size() > target.size()) return;
    for (size_t i = 0; i + 1 < p; ++i)
        if (v[i] != target[i]) return;
    for (size_t i = p + 2; i < v.size(); ++i)
        if (v[i] != target[target.size() - v.size() + i]) return;
    for (size_t i = 0; i < v.size(); ++i) {
        // live curves can only grow
        size_t lo = i, hi = target.size() - v.size() + i;
        if (v[i] > std::max(target[lo], target[hi])) return;
    }
    if (v.size() == target.size()) {
        if (v == target) out.push_back(cur);
        return;
    }
    for (char mv : {'L', 'R'}) {
        std::vector<int> w = v;
        size_t q = p;
        if (mv == 'R') {
            w[p] += 1;
            if (p + 1 < w.size()) w[p + 1] += 1;
            w.insert(w.begin() + static_cast<long>(p) + 1, 1);
            q = p + 1;
        } else {
            w[p] += 1;
            if (p > 0) w[p - 1] += 1;
            w.insert(w.begin() + static_cast<long>(p), 1);
        }
        cur.push_back(mv);
        words_rec(w, q, target, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<std::string> words_for(const std::vector<int>& target) {
    std::vector<std::string> out;
    std::vector<int> v{1};
    std::string cur;
    words_rec(v, 0, target, cur, out);
    return out;
}

std::vector<std::vector<int>> sketch_chains(const Sketch& s, bool* all_paths) {
    const int n = static_cast<int>(s.val.size());
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (auto [a, b] : s.edges) {
        if (s.val[static_cast<size_t>(a)] < 2 || s.val[static_cast<size_t>(b)] < 2) continue;
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    std::vector<std::vector<int>> out;
    std::vector<char> seen(static_cast<size_t>(n), 0);
    *all_paths = true;
    for (int v = 0; v < n; ++v) {
        if (seen[static_cast<size_t>(v)] || s.val[static_cast<size_t>(v)] < 2) continue;
        std::vector<int> comp, stack{v};
        seen[static_cast<size_t>(v)] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            comp.push_back(x);
            for (int y : adj[static_cast<size_t>(x)])
                if (!seen[static_cast<size_t>(y)]) {
                    seen[static_cast<size_t>(y)] = 1;
                    stack.push_back(y);
                }
        }
        int ends = 0;
        for (int x : comp) {
            const auto& nb = adj[static_cast<size_t>(x)];
            if (nb.size() > 2 || (nb.size() == 2 && nb[0] == nb[1])) {
                *all_paths = false;
                return {};
            }
            if (nb.size() <= 1) ++ends;
        }
        if (comp.size() > 1 && ends != 2) {
            *all_paths = false;
            return {};
        }
        int start = comp[0];
        for (int x : comp)
            if (adj[static_cast<size_t>(x)].size() <= 1) {
                start = x;
                break;
            }
        std::vector<int> path{start};
        int prev = -1;
        while (path.size() < comp.size()) {
            int cur = path.back(), nxt = -1;
            for (int y : adj[static_cast<size_t>(cur)])
                if (y != prev) nxt = y;
            prev = cur;
            path.push_back(nxt);
        }
        out.push_back(path);
    }
    return out;
}

Chain canonical(Chain c) {
    Chain r(c.rbegin(), c.rend());
    return std::min(c, r);
}

void forests(const Configuration& base, int keep, const std::function<void(const std::vector<char>&)>& visit) {
    const auto& nodes = base.nodes;
    const size_t E = nodes.size();
    std::map<int, int> local;
    for (const Curve& c : base.curves) local.emplace(c.id, static_cast<int>(local.size()));
    std::vector<int> deg(local.size(), 0), parent(local.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<char> chosen(E, 0);
    std::function<int(int)> find = [&](int x) { return parent[static_cast<size_t>(x)] == x ? x : find(parent[static_cast<size_t>(x)]); };
    std::function<void(size_t, int)> rec = [&](size_t i, int taken) {
        if (taken == keep) {
            visit(chosen);
            return;
        }
        if (static_cast<int>(E - i) < keep - taken) return;
        const Node& nd = nodes[i];
        const int a = local.at(nd.a), b = local.at(nd.b);
        if (a != b && deg[static_cast<size_t>(a)] < 2 && deg[static_cast<size_t>(b)] < 2) {
            int ra = find(a), rb = find(b);
            if (ra != rb) {
                parent[static_cast<size_t>(ra)] = rb;
                deg[static_cast<size_t>(a)]++;
                deg[static_cast<size_t>(b)]++;
                chosen[i] = 1;
                rec(i + 1, taken + 1);
                chosen[i] = 0;
                deg[static_cast<size_t>(a)]--;
                deg[static_cast<size_t>(b)]--;
                parent[static_cast<size_t>(ra)] = ra;
            }
        }
        rec(i + 1, taken);
    };
    rec(0, 0);
}

std::vector<std::string> all_words(int len) {
    std::vector<std::string> out;
    for (int mask = 0; mask < (1 << len); ++mask) {
        std::string w;
        for (int i = 0; i < len; ++i) w.push_back((mask >> i) & 1 ? 'R' : 'L');
        out.push_back(w);
    }
    return out;
}

Sketch build_sketch(const Configuration& base, const std::vector<char>& kept,
                    const std::vector<std::string>& words) {
    Sketch s;
    std::map<int, int> local;
    for (const Curve& c : base.curves) {
        local.emplace(c.id, static_cast<int>(s.val.size()));
        s.val.push_back(-c.self_int);
    }
    size_t w = 0;
    for (size_t i = 0; i < base.nodes.size(); ++i) {
        const Node& nd = base.nodes[i];
        const int a = local.at(nd.a), b = local.at(nd.b);
        if (kept[i]) {
            s.edges.push_back({a, b});
            continue;
        }
        GroupShape g = group_shape(words[w++]);
        s.val[static_cast<size_t>(a)] += 1 + g.lead_l;
        s.val[static_cast<size_t>(b)] += 1 + g.lead_r;
        int prev = a;
        for (int v : g.inner) {
            int e = static_cast<int>(s.val.size());
            s.val.push_back(v);
            s.edges.push_back({prev, e});
            prev = e;
        }
        s.edges.push_back({prev, b});
    }
    return s;
}

BlowupPlan plan_from_words(const Configuration& base, const std::vector<char>& kept,
                           const std::vector<std::string>& words) {
    BlowupPlan plan;
    Configuration c = base;
    size_t w = 0;
    for (size_t i = 0; i < base.nodes.size(); ++i) {
        if (kept[i]) continue;
        const Node& nd = base.nodes[i];
        const std::string x = base.curve(nd.a).name, y = base.curve(nd.b).name;
        auto parallel = c.nodes_between(nd.a, nd.b);
        int occ = static_cast<int>(std::find(parallel.begin(), parallel.end(), nd.id) - parallel.begin());
        std::vector<int> pattern = apply_group(c, x, y, occ, words[w++], &plan.steps);
        BlowStep bs;
        bs.pattern = pattern;
        bs.x = x;
        bs.y = y;
        bs.bracketed = pattern.size() > 1;
        plan.groups.push_back(bs);
    }
    return plan;
}

}  // namespace detail

using namespace detail;

Configuration replay(const Configuration& start, const BlowupPlan& plan) {
    Configuration c = start;
    for (const PlanStep& st : plan.steps) {
        auto nb = c.nodes_between(c.id_of(st.x), c.id_of(st.y));
        if (st.occurrence < 0 || static_cast<size_t>(st.occurrence) >= nb.size())
            throw std::invalid_argument("replay: no node " + st.x + "∩" + st.y + " #" + std::to_string(st.occurrence));
        c = blow_up(c, nb[static_cast<size_t>(st.occurrence)]);
    }
    return c;
}

std::vector<int> apply_group(Configuration& c, const std::string& x, const std::string& y, int occurrence,
                             const std::string& moves, std::vector<PlanStep>* steps) {
    const int xi = c.id_of(x), yi = c.id_of(y);
    auto nb = c.nodes_between(xi, yi);
    if (occurrence < 0 || static_cast<size_t>(occurrence) >= nb.size())
        throw std::invalid_argument("no node " + x + "∩" + y + " #" + std::to_string(occurrence));
    int e = -1;
    c = blow_up(c, nb[static_cast<size_t>(occurrence)], &e);
    if (steps) steps->push_back({x, y, occurrence});
    std::vector<int> seq{xi, e, yi};
    size_t p = 1;
    for (char mv : moves) {
        const int other = mv == 'L' ? seq[p - 1] : seq[p + 1];
        auto between = c.nodes_between(seq[p], other);
        if (between.empty()) throw std::logic_error("apply_group: newest curve lost its neighbour");
        if (steps) steps->push_back({c.curve(seq[p]).name, c.curve(other).name, 0});
        int e2 = -1;
        c = blow_up(c, between[0], &e2);
        if (mv == 'L') {
            seq.insert(seq.begin() + static_cast<long>(p), e2);
        } else {
            seq.insert(seq.begin() + static_cast<long>(p) + 1, e2);
            p += 1;
        }
    }
    std::vector<int> out;
    for (size_t i = 1; i + 1 < seq.size(); ++i) out.push_back(-c.curve(seq[i]).self_int);
    return out;
}

PlanOutcome finish_outcome(const BlowupPlan& plan, const std::vector<std::string>& curves,
                           const std::vector<StatedChain>& chains, const Configuration& a0) {
    PlanOutcome out;
    out.plan = plan;
    Configuration global = replay(a0, plan);
    std::set<int> support;
    for (const std::string& nm : curves) support.insert(a0.id_of(nm));
    std::string why;
    auto ms = auto_mark(global, support, &why);
    if (!ms) {
        out.error = "marking failed: " + why;
        return out;
    }
    std::vector<std::vector<int>> ordered;
    std::vector<char> used(ms->wahl_chains.size(), 0);
    for (const StatedChain& sc : chains) {
        bool found = false;
        for (size_t j = 0; j < ms->wahl_chains.size() && !found; ++j) {
            if (used[j]) continue;
            auto ids = ms->wahl_chains[j];
            Chain c = chain_of(global, ids);
            if (c != sc.chain) {
                std::reverse(ids.begin(), ids.end());
                c = chain_of(global, ids);
            }
            if (c == sc.chain) {
                used[j] = 1;
                ordered.push_back(ids);
                found = true;
            }
        }
        if (!found) {
            out.error = "stated chain " + format_chain(sc.chain) + " not realized";
            return out;
        }
    }
    if (ordered.size() != ms->wahl_chains.size()) {
        out.error = "surface carries unexpected extra chains";
        return out;
    }
    ms->wahl_chains = ordered;
    check_marking(*ms);
    out.report = assemble_report(*ms, a0.restrict(curves));
    out.marked = std::move(ms);
    out.ok = true;
    return out;
}

namespace {

std::string describe(const std::vector<Chain>& cs) {
    std::string s;
    for (const Chain& c : cs) s += (s.empty() ? "" : " ") + format_chain(c);
    return s.empty() ? "(none)" : s;
}

}  // namespace

PlanOutcome infer_plan(const SurfaceRecord& rec, const Configuration& a0, const InferOptions& opt) {
    PlanOutcome out;
    for (const StatedChain& sc : rec.chains) {
        auto w = is_canonical(sc.chain) ? is_wahl(sc.chain) : std::nullopt;
        if (!w || !same_wahl(w->n, w->a, sc.n, sc.a)) {
            out.error = "claimed chain " + format_chain(sc.chain) + " is not the Wahl chain (" + sc.n.str() + "," +
                        sc.a.str() + ")";
            return out;
        }
    }
    Configuration base;
    try {
        base = a0.restrict(rec.curves);
    } catch (const std::exception& e) {
        out.error = e.what();
        return out;
    }
    std::vector<Chain> wanted;
    for (const StatedChain& sc : rec.chains) wanted.push_back(canonical(sc.chain));
    std::sort(wanted.begin(), wanted.end());

    // Candidate move words per group and orientation, from the pattern alone.
    std::vector<std::vector<std::pair<bool, std::string>>> options(rec.steps.size());
    for (size_t g = 0; g < rec.steps.size(); ++g) {
        const auto& pat = rec.steps[g].pattern;
        std::vector<int> rev(pat.rbegin(), pat.rend());
        for (const std::string& w : words_for(pat)) options[g].push_back({false, w});
        if (rev != pat)
            for (const std::string& w : words_for(rev)) options[g].push_back({true, w});
        if (options[g].empty()) {
            out.error = "pattern " + format_chain(pat) + " cannot arise from one string of blow-ups";
            return out;
        }
    }

    std::optional<BlowupPlan> first;
    std::set<std::vector<Chain>> misses;
    BlowupPlan cur;
    std::function<void(size_t, const Configuration&)> dfs = [&](size_t g, const Configuration& c) {
        if (out.explored >= opt.max_interpretations || out.solutions >= opt.max_solutions) return;
        if (g == rec.steps.size()) {
            ++out.explored;
            std::set<int> all;
            for (const Curve& cv : c.curves) all.insert(cv.id);
            auto ms = auto_mark(c, all);
            std::vector<Chain> got;
            if (ms)
                for (const auto& ids : ms->wahl_chains) got.push_back(canonical(chain_of(c, ids)));
            std::sort(got.begin(), got.end());
            if (ms && got == wanted) {
                ++out.solutions;
                if (!first) first = cur;
            } else if (misses.size() < 5) {
                misses.insert(got);
            }
            return;
        }
        const BlowStep& st = rec.steps[g];
        const int xi = c.id_of(st.x), yi = c.id_of(st.y);
        const size_t parallel = c.nodes_between(xi, yi).size();
        for (size_t occ = 0; occ < parallel; ++occ) {
            for (const auto& [reversed, word] : options[g]) {
                Configuration next = c;
                const size_t mark = cur.steps.size();
                std::vector<int> s = apply_group(next, st.x, st.y, static_cast<int>(occ), word, &cur.steps);
                std::vector<int> expect = st.pattern;
                if (reversed) std::reverse(expect.begin(), expect.end());
                if (s != expect) throw std::logic_error("infer_plan: group replay disagrees with its pattern");
                BlowStep bs = st;
                bs.pattern = s;
                cur.groups.push_back(bs);
                dfs(g + 1, next);
                cur.groups.pop_back();
                cur.steps.resize(mark);
            }
        }
    };
    if (rec.steps.empty()) {
        out.error = "record has no blow-up steps";
        return out;
    }
    try {
        if (!base.nodes_between(base.id_of(rec.steps[0].x), base.id_of(rec.steps[0].y)).size())
            throw std::invalid_argument("no node " + rec.steps[0].x + "∩" + rec.steps[0].y);
        dfs(0, base);
    } catch (const std::exception& e) {
        out.error = e.what();
        return out;
    }
    for (const auto& m : misses) out.near_misses.push_back("chains " + describe(m) + " vs " + describe(wanted));
    if (!first) {
        out.error = "no interpretation of the bracket groups realizes the stated chains";
        return out;
    }
    PlanOutcome fin = finish_outcome(*first, rec.curves, rec.chains, a0);
    fin.solutions = out.solutions;
    fin.explored = out.explored;
    fin.near_misses = out.near_misses;
    return fin;
}

PlanOutcome infer_main(const MainConstruction& mc, const Configuration& a0, const InferOptions& opt) {
    PlanOutcome out;
    for (const StatedChain& sc : mc.chains) {
        auto w = is_canonical(sc.chain) ? is_wahl(sc.chain) : std::nullopt;
        if (!w || !same_wahl(w->n, w->a, sc.n, sc.a)) {
            out.error = "claimed chain " + format_chain(sc.chain) + " is not Wahl with the stated (n,a)";
            return out;
        }
    }
    const Configuration base = a0.restrict(mc.curves);
    const int P = static_cast<int>(mc.chains.size());
    const int k2 = mc.k2;
    const int keep = base.t2() - (P + k2);
    int total_len = 0;
    for (const auto& sc : mc.chains) total_len += static_cast<int>(sc.chain.size());
    const int extra = total_len - k2 - (P + k2);
    if (keep < 0 || base.r() - keep != P || extra < 0) {
        out.error = "curve and node counts do not fit " + std::to_string(P) + " chains with K^2=" + std::to_string(k2);
        return out;
    }
    std::vector<Chain> wanted;
    for (const auto& sc : mc.chains) wanted.push_back(canonical(sc.chain));
    std::sort(wanted.begin(), wanted.end());

    std::map<int, int> local;
    for (const Curve& c : base.curves) local.emplace(c.id, static_cast<int>(local.size()));
    const size_t r = base.curves.size();
    std::vector<std::pair<std::vector<char>, std::vector<std::string>>> found;
    std::set<std::pair<std::vector<char>, std::vector<std::string>>> seen;

    forests(base, keep, [&](const std::vector<char>& kept) {
        if (out.explored >= opt.max_interpretations || static_cast<int>(found.size()) >= opt.max_solutions) return;
        // Paths of the kept forest.
        std::vector<std::vector<int>> adj(r);
        std::vector<int> cnt(r, 0);
        std::vector<std::pair<int, int>> blown;
        for (size_t i = 0; i < base.nodes.size(); ++i) {
            int a = local.at(base.nodes[i].a), b = local.at(base.nodes[i].b);
            if (kept[i]) {
                adj[static_cast<size_t>(a)].push_back(b);
                adj[static_cast<size_t>(b)].push_back(a);
            } else {
                cnt[static_cast<size_t>(a)]++;
                cnt[static_cast<size_t>(b)]++;
                blown.push_back({a, b});
            }
        }
        std::vector<std::vector<int>> paths;
        std::vector<char> seen_v(r, 0);
        for (size_t v = 0; v < r; ++v) {
            if (seen_v[v] || adj[v].size() > 1) continue;
            std::vector<int> p{static_cast<int>(v)};
            seen_v[v] = 1;
            int prev = -1;
            while (true) {
                int nxt = -1;
                for (int y : adj[static_cast<size_t>(p.back())])
                    if (y != prev && !seen_v[static_cast<size_t>(y)]) nxt = y;
                if (nxt < 0) break;
                prev = p.back();
                p.push_back(nxt);
                seen_v[static_cast<size_t>(nxt)] = 1;
            }
            paths.push_back(p);
        }
        if (static_cast<int>(paths.size()) != P) return;

        std::vector<int> perm(static_cast<size_t>(P));
        std::iota(perm.begin(), perm.end(), 0);
        std::set<std::vector<int>> need_seen;
        do {
            // Every placement of each path as a window of its chain.
            std::vector<std::vector<std::vector<int>>> windows(static_cast<size_t>(P));
            for (int j = 0; j < P; ++j) {
                const auto& path = paths[static_cast<size_t>(j)];
                const Chain& ch = mc.chains[static_cast<size_t>(perm[static_cast<size_t>(j)])].chain;
                for (int dir = 0; dir < 2; ++dir) {
                    Chain c = ch;
                    if (dir) std::reverse(c.begin(), c.end());
                    for (size_t o = 0; o + path.size() <= c.size(); ++o) {
                        std::vector<int> need;
                        bool ok = true;
                        for (size_t i = 0; i < path.size() && ok; ++i) {
                            int d = c[o + i] - 2 - cnt[static_cast<size_t>(path[i])];
                            ok = d >= 0;
                            need.push_back(d);
                        }
                        if (ok) windows[static_cast<size_t>(j)].push_back(need);
                    }
                }
            }
            std::vector<size_t> idx(static_cast<size_t>(P), 0);
            bool any = std::all_of(windows.begin(), windows.end(), [](const auto& w) { return !w.empty(); });
            while (any) {
                std::vector<int> need(r, 0);
                int total = 0;
                for (int j = 0; j < P; ++j) {
                    const auto& path = paths[static_cast<size_t>(j)];
                    const auto& nd = windows[static_cast<size_t>(j)][idx[static_cast<size_t>(j)]];
                    for (size_t i = 0; i < path.size(); ++i) {
                        need[static_cast<size_t>(path[i])] = nd[i];
                        total += nd[i];
                    }
                }
                if (total <= extra && need_seen.insert(need).second) {
                    std::vector<std::string> words(blown.size());
                    std::function<void(size_t, int)> rec = [&](size_t i, int budget) {
                        if (out.explored >= opt.max_interpretations) return;
                        if (i == blown.size()) {
                            if (budget) return;
                            for (int v : need)
                                if (v) return;
                            ++out.explored;
                            Sketch s = build_sketch(base, kept, words);
                            bool paths_ok = false;
                            auto chains = sketch_chains(s, &paths_ok);
                            if (!paths_ok) return;
                            std::vector<Chain> got;
                            for (const auto& p : chains) {
                                Chain c;
                                for (int v : p) c.push_back(s.val[static_cast<size_t>(v)]);
                                got.push_back(canonical(c));
                            }
                            std::sort(got.begin(), got.end());
                            if (got == wanted && seen.insert({kept, words}).second) found.push_back({kept, words});
                            return;
                        }
                        auto [a, b] = blown[i];
                        for (int len = 0; len <= budget; ++len) {
                            for (const std::string& w : all_words(len)) {
                                GroupShape g = group_shape(w);
                                if (g.lead_l > need[static_cast<size_t>(a)] || g.lead_r > need[static_cast<size_t>(b)]) continue;
                                need[static_cast<size_t>(a)] -= g.lead_l;
                                need[static_cast<size_t>(b)] -= g.lead_r;
                                words[i] = w;
                                rec(i + 1, budget - len);
                                need[static_cast<size_t>(a)] += g.lead_l;
                                need[static_cast<size_t>(b)] += g.lead_r;
                            }
                        }
                    };
                    rec(0, extra);
                }
                size_t j = 0;
                while (j < static_cast<size_t>(P) && ++idx[j] == windows[j].size()) idx[j++] = 0;
                if (j == static_cast<size_t>(P)) break;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    });

    out.solutions = static_cast<int>(found.size());
    if (found.empty()) {
        out.error = "no forest-and-string plan realizes the stated chains";
        return out;
    }
    std::sort(found.begin(), found.end());
    BlowupPlan plan = plan_from_words(base, found.front().first, found.front().second);
    PlanOutcome fin = finish_outcome(plan, mc.curves, mc.chains, a0);
    fin.solutions = out.solutions;
    fin.explored = out.explored;
    return fin;
}

}  // namespace kw
