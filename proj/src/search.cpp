#include "kwahl/plan.hpp"
#include "plan_internal.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>

namespace kw {

using namespace detail;

namespace {

struct Candidate {
    std::vector<char> kept;
    std::vector<std::string> words;
    std::vector<Chain> chains;  // in sketch component order
};

// Admissible curve subsets of a0 (as index lists into a0.curves) with the required node count
// and an invertible Gram matrix.
std::vector<std::vector<int>> admissible_subsets(const Configuration& a0, int r, int t2, long cap, bool* exhausted) {
    const int n = a0.r();
    std::map<int, int> local;
    for (int i = 0; i < n; ++i) local.emplace(a0.curves[static_cast<size_t>(i)].id, i);
    std::vector<std::vector<int>> mult(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 0));
    for (const Node& nd : a0.nodes) {
        int a = local.at(nd.a), b = local.at(nd.b);
        if (a == b) continue;
        mult[static_cast<size_t>(a)][static_cast<size_t>(b)]++;
        mult[static_cast<size_t>(b)][static_cast<size_t>(a)]++;
    }
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    long visited = 0;
    std::function<void(int, int)> rec = [&](int start, int edges) {
        if (*exhausted) return;
        if (static_cast<int>(cur.size()) == r) {
            if (++visited > cap) {
                *exhausted = true;
                return;
            }
            if (edges != t2) return;
            std::vector<std::vector<__int128>> m(static_cast<size_t>(r), std::vector<__int128>(static_cast<size_t>(r)));
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) {
                    const int ci = cur[static_cast<size_t>(i)], cj = cur[static_cast<size_t>(j)];
                    m[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        i == j ? a0.curves[static_cast<size_t>(ci)].self_int : mult[static_cast<size_t>(ci)][static_cast<size_t>(cj)];
                }
            if (det_bareiss<__int128>(m) != 0) out.push_back(cur);
            return;
        }
        for (int v = start; v <= n - (r - static_cast<int>(cur.size())); ++v) {
            int add = 0;
            for (int u : cur) add += mult[static_cast<size_t>(u)][static_cast<size_t>(v)];
            if (edges + add > t2) continue;
            cur.push_back(v);
            rec(v + 1, edges + add);
            cur.pop_back();
        }
    };
    rec(0, 0);
    return out;
}

// Distribute `extra` infinitely-near blow-ups over the blown nodes, every word of each length.
void for_each_words(size_t slots, int extra, const std::function<void(const std::vector<std::string>&)>& visit) {
    std::vector<std::string> words(slots);
    std::vector<std::vector<std::string>> cache;
    for (int l = 0; l <= extra; ++l) cache.push_back(all_words(l));
    std::function<void(size_t, int)> rec = [&](size_t i, int left) {
        if (i == slots) {
            if (left == 0) visit(words);
            return;
        }
        const int lo = i + 1 == slots ? left : 0;
        for (int l = lo; l <= left; ++l)
            for (const std::string& w : cache[static_cast<size_t>(l)]) {
                words[i] = w;
                rec(i + 1, left - l);
            }
    };
    rec(0, extra);
}

std::vector<Candidate> search_subset(const Configuration& base, int P, int k2, int max_extra, int max_len,
                                     long budget, long* simulated, bool* exhausted) {
    std::vector<Candidate> out;
    const int keep = base.t2() - (P + k2);
    forests(base, keep, [&](const std::vector<char>& kept) {
        for (int extra = 0; extra <= max_extra && !*exhausted; ++extra) {
            for_each_words(static_cast<size_t>(P + k2), extra, [&](const std::vector<std::string>& words) {
                if (*exhausted) return;
                if (++*simulated > budget) {
                    *exhausted = true;
                    return;
                }
                Sketch s = build_sketch(base, kept, words);
                bool paths = false;
                auto comps = sketch_chains(s, &paths);
                if (!paths || static_cast<int>(comps.size()) != P) return;
                std::vector<Chain> chains;
                for (const auto& p : comps) {
                    if (static_cast<int>(p.size()) > max_len) return;
                    Chain c;
                    for (int v : p) c.push_back(s.val[static_cast<size_t>(v)]);
                    if (!is_wahl(c)) return;
                    chains.push_back(c);
                }
                out.push_back({kept, words, chains});
            });
        }
    });
    return out;
}

std::string singularity_key(const std::vector<StatedChain>& chains) {
    std::vector<std::string> parts;
    for (const auto& sc : chains) parts.push_back(sc.n.str() + "," + sc.a.str());
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const auto& p : parts) key += p + ";";
    return key;
}

}  // namespace

SearchResult search_constructions(const SearchParams& params, const Configuration& a0) {
    SearchResult res;
    if (params.k2 < 1) {
        res.notes.push_back("K^2 must be positive");
        return res;
    }
    const int len_bound = params.max_chain_length.value_or(length_bound(AmbientClass::K3, params.k2));

    struct Task {
        int P;
        std::vector<int> subset;
    };
    std::vector<Task> tasks;
    for (int P = 1; P <= params.max_chains; ++P) {
        Geography g = geography_check(P, params.k2);
        if (!g.admissible) {
            res.notes.push_back("P=" + std::to_string(P) + ", K^2=" + std::to_string(params.k2) +
                                " violates the geography bound " + str(g.bound));
            continue;
        }
        const int max_extra = params.max_blowups - g.nodes_to_blow_up;
        if (max_extra < 0) {
            res.notes.push_back("P=" + std::to_string(P) + " needs " + std::to_string(g.nodes_to_blow_up) +
                                " blow-ups at least");
            continue;
        }
        if (g.r > a0.r()) continue;
        bool ex = false;
        auto subs = admissible_subsets(a0, g.r, g.t2, params.max_subsets - res.subsets_examined, &ex);
        res.subsets_examined += static_cast<long>(subs.size());
        if (ex) {
            res.budget_exhausted = true;
            res.notes.push_back("subset budget exhausted at P=" + std::to_string(P));
        }
        for (auto& s : subs) tasks.push_back({P, std::move(s)});
    }

    std::vector<std::vector<Candidate>> found(tasks.size());
    std::vector<long> sims(tasks.size(), 0);
    std::vector<char> exhausted(tasks.size(), 0);
    auto work = [&](size_t i) {
        const Task& t = tasks[i];
        std::vector<std::string> names;
        for (int idx : t.subset) names.push_back(a0.curves[static_cast<size_t>(idx)].name);
        Configuration base = a0.restrict(names);
        bool ex = false;
        found[i] = search_subset(base, t.P, params.k2, params.max_blowups - (t.P + params.k2), len_bound,
                                 params.max_simulations_per_subset, &sims[i], &ex);
        exhausted[i] = ex;
    };
    unsigned threads = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
    if (!params.parallel) threads = 1;
    if (threads == 1) {
        for (size_t i = 0; i < tasks.size(); ++i) work(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (size_t i; (i = next.fetch_add(1)) < tasks.size();) work(i);
            });
        for (auto& th : pool) th.join();
    }

    // Ordered merge, then certification on the full configuration.
    std::set<std::pair<std::vector<std::string>, std::string>> seen;
    for (size_t i = 0; i < tasks.size(); ++i) {
        res.candidates_simulated += sims[i];
        if (exhausted[i]) res.budget_exhausted = true;
        std::vector<std::string> names;
        for (int idx : tasks[i].subset) names.push_back(a0.curves[static_cast<size_t>(idx)].name);
        Configuration base = a0.restrict(names);
        for (const Candidate& cand : found[i]) {
            std::vector<StatedChain> chains;
            for (const Chain& c : cand.chains) {
                auto w = is_wahl(c);
                chains.push_back({w->n, w->a, c});
            }
            std::sort(chains.begin(), chains.end(), [](const StatedChain& x, const StatedChain& y) {
                return x.n != y.n ? x.n > y.n : x.chain < y.chain;
            });
            const std::string key = singularity_key(chains);
            if (seen.count({names, key})) continue;
            BlowupPlan plan = plan_from_words(base, cand.kept, cand.words);
            PlanOutcome po = finish_outcome(plan, names, chains, a0);
            if (!po.ok || po.report->ample.status != Positivity::Ample) continue;
            seen.insert({names, key});
            SurfaceRecord rec;
            rec.k2 = params.k2;
            rec.id = "S" + std::to_string(params.k2) + "." + std::to_string(res.found.size() + 1);
            rec.curves = names;
            rec.det = det_exact(intersection_matrix(base));
            rec.steps = plan.groups;
            rec.chains = chains;
            rec.text = format_record(rec);
            res.found.push_back(rec);
            res.reports.push_back(*po.report);
        }
    }
    return res;
}

}  // namespace kw
