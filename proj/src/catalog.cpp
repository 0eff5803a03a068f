#include "kwahl/catalog.hpp"
#include "kwahl/plan.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#ifndef KWAHL_SOURCE_DATA_DIR
#define KWAHL_SOURCE_DATA_DIR "data"
#endif

namespace kw {

namespace {

using nlohmann::json;

void only_fields(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
            throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
}

Int big(const json& j) {
    if (j.is_string()) return Int(j.get<std::string>());
    return Int(j.get<long long>());
}

StatedChain stated_chain(const json& j, const std::string& where) {
    only_fields(j, {"n", "a", "chain"}, where);
    return {big(j.at("n")), big(j.at("a")), j.at("chain").get<Chain>()};
}

void parallel_for(size_t n, bool parallel, const std::function<void(size_t)>& f) {
    unsigned threads = parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
    if (threads == 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<size_t>(threads, n); ++w)
        pool.emplace_back([&] {
            for (size_t i; (i = next.fetch_add(1)) < n;) f(i);
        });
    for (auto& t : pool) t.join();
}

std::string chain_text(const StatedChain& sc) {
    return "(" + sc.n.str() + "," + sc.a.str() + "):" + format_chain(sc.chain);
}

std::string cq_text(const CyclicQuotient& cq) { return "(" + cq.m.str() + "," + cq.q.str() + ")"; }

// L-1-R in all four orientations.
std::vector<CyclicQuotient> compositions(const Chain& l, const Chain& r) {
    std::vector<CyclicQuotient> out;
    for (int fl = 0; fl < 2; ++fl)
        for (int fr = 0; fr < 2; ++fr) {
            Chain a = l, b = r;
            if (fl) std::reverse(a.begin(), a.end());
            if (fr) std::reverse(b.begin(), b.end());
            try {
                out.push_back(blow_down_compose(a, b));
            } catch (const std::invalid_argument&) {
            }
        }
    return out;
}

std::multiset<std::pair<Int, Int>> wahl_multiset(const std::vector<StatedChain>& cs) {
    std::multiset<std::pair<Int, Int>> out;
    for (const auto& c : cs) out.insert({c.n, std::min<Int>(c.a, c.n - c.a)});
    return out;
}

std::multiset<std::pair<Int, Int>> wahl_multiset(const SurfaceReport& r) {
    std::multiset<std::pair<Int, Int>> out;
    for (const Singularity& s : r.singularities)
        if (s.kind == Singularity::Kind::Wahl) out.insert({s.n, std::min<Int>(s.a, s.n - s.a)});
    return out;
}

void chain_checks(Ledger& L, const std::string& subject, const std::vector<StatedChain>& chains, int k2) {
    for (const StatedChain& sc : chains) {
        std::optional<WahlSingularity> w;
        std::string detail;
        try {
            w = is_wahl(sc.chain);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        const bool ok = w && same_wahl(w->n, w->a, sc.n, sc.a);
        if (w && detail.empty())
            detail = w->a == sc.a ? "as written" : "engine gives (" + w->n.str() + "," + w->a.str() + "), read from the other end";
        else if (detail.empty())
            detail = "not a Wahl chain";
        L.add(subject, "is_wahl " + chain_text(sc), ok, detail);
        if (k2 > 0) {
            const int bound = length_bound(AmbientClass::K3, k2);
            L.add(subject, "length " + std::to_string(sc.chain.size()) + " <= " + std::to_string(bound),
                  static_cast<int>(sc.chain.size()) <= bound);
        }
    }
}

void geography_checks(Ledger& L, const std::string& subject, const Configuration& base, int P, int k2) {
    const Geography g = geography_check(P, k2);
    L.add(subject, "r = P + 2K^2 = " + std::to_string(g.r), base.r() == g.r, "r=" + std::to_string(base.r()));
    L.add(subject, "t2 = 3K^2 + P = " + std::to_string(g.t2), base.t2() == g.t2, "t2=" + std::to_string(base.t2()));
    const LogChern lc = log_chern(base);
    L.add(subject, "log c1^2 = 2K^2", lc.c1sq == 2 * k2, std::to_string(lc.c1sq));
    L.add(subject, "log c2 = 24 - P - K^2", lc.c2 == 24 - P - k2, std::to_string(lc.c2));
    const PKInvariants pk = pk_invariants(base);
    L.add(subject, "(P,K) invariants", pk.P == P && pk.K == k2,
          "P=" + std::to_string(pk.P) + " K=" + std::to_string(pk.K));
    L.add(subject, "K^2 <= 14 - (3P-2)/5", g.admissible, "bound " + str(g.bound));
}

}  // namespace

void Ledger::add(std::string subject, std::string assertion, bool pass, std::string detail) {
    checks.push_back({std::move(subject), std::move(assertion), pass, std::move(detail)});
}

bool Ledger::ok() const { return failures() == 0; }

size_t Ledger::failures() const {
    return static_cast<size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; }));
}

void Ledger::append(const Ledger& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }

Expected load_expected(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    only_fields(j, {"printed_matrices", "main_constructions", "wormholes", "t_joins", "k2_one_chains"}, "expected");
    Expected ex;
    for (const auto& m : j.at("printed_matrices")) {
        only_fields(m, {"k2", "curves", "det", "rows"}, "printed_matrices");
        ex.matrices.push_back({m.at("k2").get<int>(), m.at("curves").get<std::vector<std::string>>(), big(m.at("det")),
                               m.at("rows").get<IntMatrix>()});
    }
    for (const auto& m : j.at("main_constructions")) {
        only_fields(m, {"id", "k2", "curves", "det", "chains", "du_val", "meridian_anchors"}, "main_constructions");
        MainConstruction mc;
        mc.id = m.at("id").get<std::string>();
        mc.k2 = m.at("k2").get<int>();
        mc.curves = m.at("curves").get<std::vector<std::string>>();
        mc.det = big(m.at("det"));
        for (const auto& c : m.at("chains")) mc.chains.push_back(stated_chain(c, mc.id));
        mc.du_val = m.at("du_val").get<std::vector<std::vector<std::string>>>();
        if (m.contains("meridian_anchors"))
            for (const auto& a : m.at("meridian_anchors")) {
                only_fields(a, {"curve", "exponent"}, "meridian_anchors");
                mc.meridian_anchors.emplace_back(a.at("curve").get<std::string>(), big(a.at("exponent")));
            }
        ex.mains.push_back(mc);
    }
    for (const auto& w : j.at("wormholes")) {
        only_fields(w, {"pair", "delta", "omega"}, "wormholes");
        auto pair = w.at("pair").get<std::vector<std::string>>();
        if (pair.size() != 2) throw std::invalid_argument("wormholes: pair must name two records");
        ex.wormholes.push_back({pair[0], pair[1], big(w.at("delta")), big(w.at("omega"))});
    }
    for (const auto& t : j.at("t_joins")) {
        only_fields(t, {"record", "n"}, "t_joins");
        ex.t_joins.push_back({t.at("record").get<std::string>(), big(t.at("n"))});
    }
    for (const auto& c : j.at("k2_one_chains")) ex.k2_one_chains.push_back(c.get<Chain>());
    return ex;
}

Ledger validate_a0(const Configuration& a0, const Expected& ex, const std::vector<SurfaceRecord>& records) {
    Ledger L;
    const std::string S = "a0";
    L.add(S, "32 curves, 72 nodes", a0.r() == 32 && a0.t2() == 72,
          std::to_string(a0.r()) + " curves, " + std::to_string(a0.t2()) + " nodes");
    bool all_m2 = std::all_of(a0.curves.begin(), a0.curves.end(), [](const Curve& c) { return c.self_int == -2; });
    L.add(S, "all curves are (-2)-curves", all_m2);
    auto name = [](char p, int i) { return std::string(1, p) + std::to_string(i); };
    auto meet = [&](const std::string& x, const std::string& y) {
        auto a = a0.find(x), b = a0.find(y);
        return a && b ? a0.meet(*a, *b) : -1;
    };
    bool cycles = true;
    for (int base : {0, 8})
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) {
                const bool adj = j == i + 1 || (i == 0 && j == 7);
                cycles = cycles && meet(name('F', base + i + 1), name('F', base + j + 1)) == (adj ? 1 : 0);
            }
    L.add(S, "F1..F8 and F9..F16 are 8-cycles", cycles);
    bool pairs = meet("B1", "B2") == 2 && meet("B3", "B4") == 2 && meet("C1", "C2") == 2 && meet("C3", "C4") == 2;
    L.add(S, "I2 pairs meet twice", pairs);
    const std::vector<std::vector<std::string>> fibers = {
        {"F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8"},
        {"F9", "F10", "F11", "F12", "F13", "F14", "F15", "F16"},
        {"B1", "B2"}, {"B3", "B4"}, {"C1", "C2"}, {"C3", "C4"}};
    std::vector<std::string> sections;
    for (int i = 1; i <= 4; ++i) sections.push_back(name('A', i));
    for (int i = 1; i <= 4; ++i) sections.push_back(name('D', i));
    for (const std::string& s : sections) {
        bool ok = true;
        std::string detail;
        for (const auto& f : fibers) {
            int total = 0;
            for (const auto& c : f) total += meet(s, c);
            if (total != 1) {
                ok = false;
                detail += f[0] + "-fiber:" + std::to_string(total) + " ";
            }
        }
        L.add(S, s + " meets each fiber once", ok, detail);
    }
    bool disjoint = true;
    for (size_t i = 0; i < sections.size(); ++i)
        for (size_t j = i + 1; j < sections.size(); ++j) disjoint = disjoint && meet(sections[i], sections[j]) == 0;
    L.add(S, "sections pairwise disjoint", disjoint);

    for (const PrintedMatrix& pm : ex.matrices) {
        const std::string subj = "matrix K^2=" + std::to_string(pm.k2);
        try {
            IntMatrix m = intersection_matrix_by_name(a0, pm.curves);
            std::string detail;
            for (size_t i = 0; i < m.size() && detail.empty(); ++i)
                for (size_t j = 0; j < m.size() && detail.empty(); ++j)
                    if (i >= pm.rows.size() || j >= pm.rows[i].size() || pm.rows[i][j] != m[i][j])
                        detail = pm.curves[i] + "." + pm.curves[j] + " model " + std::to_string(m[i][j]);
            L.add(subj, "entries match", detail.empty() && pm.rows.size() == m.size(), detail);
            Int d = det_exact(m);
            L.add(subj, "det = " + pm.det.str(), d == pm.det, "model " + d.str());
        } catch (const std::exception& e) {
            L.add(subj, "entries match", false, e.what());
        }
    }
    for (const SurfaceRecord& r : records) {
        const std::string subj = "record " + r.id;
        try {
            Int d = det_exact(intersection_matrix_by_name(a0, r.curves));
            L.add(subj, "det = " + r.det.str(), d == r.det, "model " + d.str());
        } catch (const std::exception& e) {
            L.add(subj, "det = " + r.det.str(), false, e.what());
        }
    }
    return L;
}

Ledger verify_all(const Configuration& a0, const std::vector<SurfaceRecord>& records, const Expected& ex,
                  const VerifyOptions& opt) {
    Ledger L = validate_a0(a0, ex, records);
    std::map<std::string, const SurfaceRecord*> by_id;
    for (const SurfaceRecord& r : records) by_id[r.id] = &r;

    // Per-record checks run independently and are merged in record order.
    std::vector<Ledger> per(records.size());
    parallel_for(records.size(), opt.parallel, [&](size_t i) {
        const SurfaceRecord& r = records[i];
        Ledger& R = per[i];
        const std::string subj = "record " + r.id;
        chain_checks(R, subj, r.chains, r.k2);
        Configuration base;
        try {
            base = a0.restrict(r.curves);
        } catch (const std::exception& e) {
            R.add(subj, "curves exist in a0", false, e.what());
            return;
        }
        const int P = static_cast<int>(r.chains.size());
        geography_checks(R, subj, base, P, r.k2);
        size_t total_len = 0;
        for (const auto& c : r.chains) total_len += c.chain.size();
        R.add(subj, "chain lengths = r + blow-ups - groups",
              static_cast<int>(total_len) == base.r() + r.blowup_count() - static_cast<int>(r.steps.size()),
              std::to_string(total_len) + " vs " + std::to_string(base.r()) + "+" +
                  std::to_string(r.blowup_count()) + "-" + std::to_string(r.steps.size()));
        R.add(subj, "groups = P + K^2", static_cast<int>(r.steps.size()) == P + r.k2);
        const Obstruction ob = obstruction(base);
        R.add(subj, "obstruction_dim = 0", ob.dim == 0, ob.singular_gram ? "singular Gram matrix" : "");
        if (!opt.infer_plans) return;
        PlanOutcome po = infer_plan(r, a0);
        std::string detail = po.ok ? std::to_string(po.solutions) + " interpretation(s)" : po.error;
        for (const auto& nm : po.near_misses) detail += "; near miss " + nm;
        R.add(subj, "plan inference realizes the chains", po.ok, detail);
        if (!po.ok) return;
        const SurfaceReport& rep = *po.report;
        auto tj = std::find_if(ex.t_joins.begin(), ex.t_joins.end(), [&](const TJoin& t) { return t.record == r.id; });
        if (tj == ex.t_joins.end()) {
            R.add(subj, "ample", rep.ample.status == Positivity::Ample, to_string(rep.ample.status));
        } else {
            // The joining (-1)-curve is K-trivial; the canonical model carries the T-singularity.
            bool t_ok = false;
            std::string got = to_string(rep.ample.status);
            if (rep.ample.contractions.size() == 1) {
                const CyclicQuotient& cq = rep.ample.contractions[0];
                auto tt = t_type(cq);
                got += ", contracts to " + format_cq(cq);
                t_ok = cq.m == 2 * tj->n * tj->n && tt && tt->d == 2 && tt->n == tj->n;
            }
            R.add(subj, "nef, ample on the canonical model with one T-singularity of order 2n^2",
                  rep.ample.status == Positivity::NefOnly && rep.ample.canonical_ample && t_ok, got);
        }
        R.add(subj, "K^2 = " + std::to_string(r.k2), rep.k2 == r.k2, std::to_string(rep.k2));
        R.add(subj, "Wahl singularities match", wahl_multiset(rep) == wahl_multiset(r.chains));
        R.add(subj, "family_dim = 20 - 2K^2", rep.family_dim == 20 - 2 * r.k2, std::to_string(rep.family_dim));
    });
    for (const Ledger& R : per) L.append(R);

    for (const Wormhole& w : ex.wormholes) {
        const std::string subj = "wormhole " + w.first + "/" + w.second;
        const CyclicQuotient target = normalize({w.delta, w.omega, false});
        for (const std::string& id : {w.first, w.second}) {
            auto it = by_id.find(id);
            if (it == by_id.end() || it->second->chains.size() != 2) {
                L.add(subj, id + " has two chains", false);
                continue;
            }
            const auto& cs = it->second->chains;
            std::string got;
            bool hit = false;
            for (const CyclicQuotient& cq : compositions(cs[0].chain, cs[1].chain)) {
                got += cq_text(cq) + " ";
                hit = hit || (cq.m == target.m && cq.q == target.q);
            }
            L.add(subj, id + " composes to " + cq_text(target), hit, got);
        }
    }
    for (const TJoin& t : ex.t_joins) {
        const std::string subj = "T-join " + t.record;
        auto it = by_id.find(t.record);
        if (it == by_id.end() || it->second->chains.size() != 2) {
            L.add(subj, "record has two chains", false);
            continue;
        }
        const auto& cs = it->second->chains;
        L.add(subj, "both chains have n = " + t.n.str(), cs[0].n == t.n && cs[1].n == t.n);
        bool hit = false;
        std::string got;
        for (const CyclicQuotient& cq : compositions(cs[0].chain, cs[1].chain)) {
            auto tt = t_type(cq);
            got += cq_text(cq) + " ";
            hit = hit || (cq.m == 2 * t.n * t.n && tt && tt->d == 2 && tt->n == t.n);
        }
        L.add(subj, "self-join has order 2*" + t.n.str() + "^2", hit, got);
    }

    std::vector<Ledger> mains(ex.mains.size());
    parallel_for(ex.mains.size(), opt.parallel, [&](size_t i) {
        const MainConstruction& mc = ex.mains[i];
        Ledger& R = mains[i];
        const std::string subj = mc.id;
        chain_checks(R, subj, mc.chains, mc.k2);
        Configuration base = a0.restrict(mc.curves);
        Int d = det_exact(intersection_matrix(base));
        R.add(subj, "det = " + mc.det.str(), d == mc.det, "model " + d.str());
        geography_checks(R, subj, base, static_cast<int>(mc.chains.size()), mc.k2);
        if (!opt.infer_plans) return;
        PlanOutcome po = infer_main(mc, a0);
        R.add(subj, "plan inference realizes the chains", po.ok,
              po.ok ? std::to_string(po.solutions) + " plan(s)" : po.error);
        if (!po.ok) return;
        const SurfaceReport& rep = *po.report;
        const Configuration& s = po.marked->surface;
        R.add(subj, "ample", rep.ample.status == Positivity::Ample, to_string(rep.ample.status));
        R.add(subj, "K^2 = " + std::to_string(mc.k2), rep.k2 == mc.k2, std::to_string(rep.k2));
        std::set<std::set<std::string>> want, got;
        for (const auto& g : mc.du_val) want.insert(std::set<std::string>(g.begin(), g.end()));
        for (const auto& g : po.marked->ade_chains) {
            std::set<std::string> names;
            for (int id : g) names.insert(s.curve(id).name);
            got.insert(names);
        }
        std::string gtxt;
        for (const auto& g : got) {
            gtxt += "{";
            for (const auto& n : g) gtxt += n + " ";
            gtxt += "}";
        }
        R.add(subj, "Du Val curves match", want == got, gtxt);
        std::string just;
        for (const auto& j : rep.pi1.justification) just += j + "; ";
        const bool trivial = rep.pi1.status == Pi1Status::Trivial;
        R.add(subj, std::string("pi1 verdict: ") + (trivial ? "trivial" : "inconclusive"), true, just);
        for (const auto& [curve, exponent] : mc.meridian_anchors) {
            bool ok = false;
            std::string detail = curve + " not on a Wahl chain";
            const int cid = s.id_of(curve);
            for (const auto& ids : po.marked->wahl_chains) {
                auto pos = std::find(ids.begin(), ids.end(), cid);
                if (pos == ids.end()) continue;
                // Generator at the first curve of the chain as stated.
                Chain c = chain_of(s, ids);
                std::reverse(c.begin(), c.end());
                auto t = meridian_exponents(c);
                const Int& e = t[ids.size() - 1 - static_cast<size_t>(pos - ids.begin())];
                ok = e == exponent;
                detail = "position " + std::to_string(pos - ids.begin() + 1) + ", exponent " + e.str();
            }
            R.add(subj, "meridian exponent at " + curve + " = " + exponent.str(), ok, detail);
        }
    });
    for (const Ledger& R : mains) L.append(R);

    for (const Chain& c : ex.k2_one_chains) {
        bool ok = false;
        try {
            ok = is_wahl(c).has_value();
        } catch (const std::exception&) {
        }
        L.add("K^2=1 chain " + format_chain(c), "is a Wahl chain", ok);
    }
    return L;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("KWAHL_DATA")) return env;
    return KWAHL_SOURCE_DATA_DIR;
}

}  // namespace kw
