#include "kwahl/catalog.hpp"
#include "kwahl/plan.hpp"
#include "kwahl/reconstruct.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace kw;
using ojson = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Chain chain_arg(const std::string& s) {
    try {
        return parse_chain(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

Chain canonical_arg(const std::string& s) {
    Chain c = chain_arg(s);
    if (!is_canonical(c)) throw UsageError("chain entries must be >= 2: " + s);
    return c;
}

Int int_arg(const std::string& s) {
    try {
        size_t i = s[0] == '-' ? 1 : 0;
        if (i == s.size() || s.find_first_not_of("0123456789", i) != std::string::npos) throw std::exception();
        return Int(s);
    } catch (...) {
        throw UsageError("not an integer: " + s);
    }
}

std::string t_note(const CyclicQuotient& cq) {
    auto t = t_type(cq);
    if (!t) return "";
    return " [T: d=" + t->d.str() + ",n=" + t->n.str() + ",a=" + t->a.str() + "]";
}

ojson chain_json(const Chain& c) { return ojson(c); }

ojson ledger_json(const Ledger& L) {
    ojson j;
    j["checks"] = ojson::array();
    for (const Check& c : L.checks)
        j["checks"].push_back({{"subject", c.subject}, {"assertion", c.assertion}, {"pass", c.pass}, {"detail", c.detail}});
    j["total"] = L.checks.size();
    j["failures"] = L.failures();
    return j;
}

void print_ledger(const Ledger& L, bool json) {
    if (json) {
        std::cout << ledger_json(L).dump(2) << "\n";
        return;
    }
    for (const Check& c : L.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.subject << ": " << c.assertion;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
    }
    std::cout << L.checks.size() - L.failures() << "/" << L.checks.size() << " checks passed\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wahl chains, K3 configurations and KSBA surface constructions"};
    app.require_subcommand(1, 1);
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    bool seedless = false;
    app.add_flag("--seedless", seedless, "Disable parallelism for bit-identical logs");

    const std::string data = default_data_dir();
    std::string records_path = data + "/records.txt", a0_path = data + "/a0.json", expected_path = data + "/expected.json";
    auto data_opts = [&](CLI::App* sub) {
        sub->add_option("--records", records_path, "Compact record file");
        sub->add_option("--a0", a0_path, "Configuration file for the extremal K3");
        sub->add_option("--expected", expected_path, "Expected-values file");
    };

    std::string s1, s2;
    auto* expand = app.add_subcommand("expand", "Hirzebruch-Jung expansion of m/q");
    expand->add_option("m", s1)->required();
    expand->add_option("q", s2)->required();

    auto* eval = app.add_subcommand("eval", "Evaluate a chain to (m,q)");
    eval->add_option("chain", s1)->required();

    auto* wahl = app.add_subcommand("wahl", "Test a chain for the Wahl property, or list Wahl chains of a length");
    wahl->add_option("chain", s1);
    int gen_length = 0;
    wahl->add_option("--length", gen_length, "List all Wahl chains of this length");

    auto* disc = app.add_subcommand("disc", "Discrepancies of a chain");
    disc->add_option("chain", s1)->required();

    auto* join = app.add_subcommand("join", "Contract left-1-right and evaluate");
    join->add_option("left", s1)->required();
    join->add_option("right", s2)->required();

    auto* mer = app.add_subcommand("meridians", "Meridian exponents relative to the last curve");
    mer->add_option("chain", s1)->required();

    auto* bounds = app.add_subcommand("bounds", "Chain length bound for one Wahl singularity");
    int k2 = 2;
    std::string ambient = "K3";
    std::optional<int> k2_min;
    bounds->add_option("--k2", k2)->required();
    bounds->add_option("--ambient", ambient)->check(CLI::IsMember({"K3", "elliptic", "general"}));
    bounds->add_option("--k2-min", k2_min, "K^2 of the minimal model (general type)");

    auto* geo = app.add_subcommand("geography", "Geography check for P chains and K^2");
    int P = 2;
    geo->add_option("P", P)->required();
    geo->add_option("k2", k2)->required();

    auto* verify = app.add_subcommand("verify", "Run the verification ledger");
    data_opts(verify);
    bool no_infer = false, failures_only = false;
    std::string only;
    verify->add_flag("--no-infer", no_infer, "Skip plan inference");
    verify->add_flag("--failures", failures_only, "Print failing checks only");
    verify->add_option("--record", only, "Infer one record (or main-K construction) and print its surface report");

    auto* search = app.add_subcommand("search", "Search for constructions over the extremal configuration");
    data_opts(search);
    SearchParams sp;
    search->add_option("--k2", sp.k2);
    search->add_option("--max-blowups", sp.max_blowups);
    search->add_option("--max-chains", sp.max_chains);
    search->add_option("--max-length", sp.max_chain_length);
    search->add_option("--max-subsets", sp.max_subsets);

    auto* recon = app.add_subcommand("reconstruct-a0", "Recover section incidences from the printed data");
    data_opts(recon);
    bool height = false;
    std::string write_path;
    std::vector<std::string> corrupt;
    recon->add_flag("--height", height, "Also impose zero height on the torsion sections");
    recon->add_option("--write", write_path, "Write the first model as configuration JSON");
    recon->add_option("--override-det", corrupt, "Replace a stated determinant: ID=VALUE (record id or main-K)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const bool json = format == "json";

    try {
        if (*expand) {
            Int m = int_arg(s1), q = int_arg(s2);
            if (!(q > 0 && q < m) || gcd(m, q) != 1) throw UsageError("need 0 < q < m with gcd(m,q) = 1");
            Chain c = hj_expand(m, q);
            if (json) std::cout << ojson{{"m", m.str()}, {"q", q.str()}, {"chain", chain_json(c)}}.dump() << "\n";
            else std::cout << format_chain(c) << "\n";
        } else if (*eval) {
            auto [m, q] = hj_eval(canonical_arg(s1));
            if (json) std::cout << ojson{{"m", m.str()}, {"q", q.str()}}.dump() << "\n";
            else std::cout << "(m,q)=(" << m << "," << q << ")\n";
        } else if (*wahl) {
            if (gen_length > 0) {
                if (gen_length > kWahlEnumerationCap) throw UsageError("length above enumeration cap");
                auto all = wahl_generate(gen_length);
                ojson arr = ojson::array();
                for (const Chain& c : all) {
                    auto w = is_wahl(c);
                    if (json) arr.push_back({{"chain", chain_json(c)}, {"n", w->n.str()}, {"a", w->a.str()}});
                    else std::cout << format_chain(c) << " (n,a)=(" << w->n << "," << w->a << ")\n";
                }
                if (json) std::cout << arr.dump() << "\n";
            } else {
                if (s1.empty()) throw UsageError("wahl needs a chain or --length");
                auto w = is_wahl(canonical_arg(s1));
                if (json) {
                    ojson j{{"wahl", w.has_value()}};
                    if (w) {
                        j["n"] = w->n.str();
                        j["a"] = w->a.str();
                    }
                    std::cout << j.dump() << "\n";
                } else if (w) {
                    std::cout << "(n,a)=(" << w->n << "," << w->a << ")\n";
                } else {
                    std::cout << "not a Wahl chain\n";
                }
            }
        } else if (*disc) {
            auto d = discrepancies(canonical_arg(s1));
            std::vector<std::string> parts;
            for (const Rat& v : d) parts.push_back(str(v));
            if (json) {
                std::cout << ojson(parts).dump() << "\n";
            } else {
                std::cout << "[";
                for (size_t i = 0; i < parts.size(); ++i) std::cout << (i ? "," : "") << parts[i];
                std::cout << "]\n";
            }
        } else if (*join) {
            CyclicQuotient cq;
            try {
                cq = blow_down_compose(canonical_arg(s1), canonical_arg(s2));
            } catch (const UsageError&) {
                throw;
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            if (json) {
                ojson j{{"m", cq.m.str()}, {"q", cq.q.str()}};
                if (auto t = t_type(cq)) j["t"] = {{"d", t->d.str()}, {"n", t->n.str()}, {"a", t->a.str()}};
                std::cout << j.dump() << "\n";
            } else {
                std::cout << format_cq(cq) << t_note(cq) << "\n";
            }
        } else if (*mer) {
            Int t0;
            auto t = meridian_exponents(canonical_arg(s1), &t0);
            std::vector<std::string> parts;
            for (const Int& v : t) parts.push_back(v.str());
            if (json) {
                std::cout << ojson{{"exponents", parts}, {"t0", t0.str()}}.dump() << "\n";
            } else {
                std::cout << "[";
                for (size_t i = 0; i < parts.size(); ++i) std::cout << (i ? "," : "") << parts[i];
                std::cout << "] t0=" << t0 << "\n";
            }
        } else if (*bounds) {
            AmbientClass a = ambient == "K3" ? AmbientClass::K3
                             : ambient == "elliptic" ? AmbientClass::ProperlyElliptic
                                                     : AmbientClass::GeneralType;
            if (a == AmbientClass::GeneralType && !k2_min) throw UsageError("--ambient general needs --k2-min");
            if (k2 <= 0) throw UsageError("--k2 must be positive");
            int b = length_bound(a, k2, k2_min);
            if (json) std::cout << ojson{{"length_bound", b}}.dump() << "\n";
            else std::cout << b << "\n";
        } else if (*geo) {
            Geography g = geography_check(P, k2);
            if (json) {
                std::cout << ojson{{"admissible", g.admissible}, {"r", g.r}, {"t2", g.t2},
                                   {"nodes_to_blow_up", g.nodes_to_blow_up}, {"bound", str(g.bound)}}
                                 .dump()
                          << "\n";
            } else {
                std::cout << (g.admissible ? "admissible" : "inadmissible") << " r=" << g.r << " t2=" << g.t2
                          << " nodes=" << g.nodes_to_blow_up << " bound=" << str(g.bound) << "\n";
            }
        } else if (*verify) {
            Configuration a0 = load_config(a0_path);
            auto records = load_records(records_path);
            Expected ex = load_expected(expected_path);
            if (!only.empty()) {
                PlanOutcome po;
                bool found = false;
                for (const auto& r : records)
                    if (r.id == only) {
                        po = infer_plan(r, a0);
                        found = true;
                    }
                for (const auto& mc : ex.mains)
                    if (mc.id == only) {
                        po = infer_main(mc, a0);
                        found = true;
                    }
                if (!found) throw UsageError("no record or construction named " + only);
                if (!po.ok) {
                    std::cerr << only << ": " << po.error << "\n";
                    for (const auto& nm : po.near_misses) std::cerr << "  near miss: " << nm << "\n";
                    return 1;
                }
                SurfaceRecord shown;
                shown.id = only;
                shown.steps = po.plan.groups;
                if (json) {
                    ojson j = report_to_json(*po.report, po.marked->surface);
                    ojson plan = ojson::array();
                    for (const auto& st : po.plan.steps) plan.push_back({st.x, st.y, st.occurrence});
                    j["plan"] = plan;
                    std::cout << j.dump(2) << "\n";
                } else {
                    std::cout << "plan:";
                    for (const auto& g : po.plan.groups)
                        std::cout << " " << (g.pattern.size() > 1 ? format_chain(g.pattern) + " x " : "") << g.x << "^" << g.y;
                    std::cout << "\n" << report_to_text(*po.report, po.marked->surface);
                }
                return 0;
            }
            VerifyOptions vo;
            vo.infer_plans = !no_infer;
            vo.parallel = !seedless;
            Ledger L = verify_all(a0, records, ex, vo);
            if (failures_only) {
                Ledger F;
                for (const Check& c : L.checks)
                    if (!c.pass) F.checks.push_back(c);
                print_ledger(F, json);
                if (!json) std::cout << L.checks.size() - L.failures() << "/" << L.checks.size() << " overall\n";
            } else {
                print_ledger(L, json);
            }
            return L.ok() ? 0 : 1;
        } else if (*search) {
            Configuration a0 = load_config(a0_path);
            sp.parallel = !seedless;
            SearchResult res = search_constructions(sp, a0);
            if (json) {
                ojson j;
                j["found"] = ojson::array();
                for (size_t i = 0; i < res.found.size(); ++i) {
                    ojson rec{{"record", res.found[i].text}};
                    j["found"].push_back(rec);
                }
                j["subsets_examined"] = res.subsets_examined;
                j["candidates_simulated"] = res.candidates_simulated;
                j["budget_exhausted"] = res.budget_exhausted;
                j["notes"] = res.notes;
                std::cout << j.dump(2) << "\n";
            } else {
                for (const auto& r : res.found) std::cout << r.text << "\n";
                for (const auto& n : res.notes) std::cout << "# " << n << "\n";
                std::cout << "# " << res.found.size() << " construction(s); " << res.subsets_examined
                          << " curve subsets, " << res.candidates_simulated << " candidates"
                          << (res.budget_exhausted ? "; budget exhausted" : "") << "\n";
            }
        } else if (*recon) {
            auto records = load_records(records_path);
            Expected ex = load_expected(expected_path);
            for (const std::string& o : corrupt) {
                auto eq = o.find('=');
                if (eq == std::string::npos) throw UsageError("--override-det expects ID=VALUE");
                const std::string id = o.substr(0, eq);
                Int v = int_arg(o.substr(eq + 1));
                bool hit = false;
                for (auto& r : records)
                    if (r.id == id) r.det = v, hit = true;
                for (const auto& mc : ex.mains)
                    if (mc.id == id)
                        for (auto& pm : ex.matrices)
                            if (pm.k2 == mc.k2) pm.det = v, hit = true;
                if (!hit) throw UsageError("unknown id " + id);
            }
            A0Constraints cons = constraints_from(ex, records);
            cons.height_axioms = height;
            ReconstructResult res = reconstruct_a0(cons);
            std::optional<bool> frozen_found;
            try {
                Incidence frozen = incidence_of(load_config(a0_path));
                frozen_found = std::find(res.models.begin(), res.models.end(), frozen) != res.models.end();
            } catch (const std::exception&) {
            }
            if (!write_path.empty() && !res.models.empty()) {
                std::ofstream out(write_path);
                out << config_to_json(build_a0(res.models.front())).dump(2) << "\n";
            }
            if (json) {
                ojson j{{"models", res.models.size()}, {"truncated", res.truncated}, {"search_nodes", res.nodes}};
                j["undetermined"] = ojson::array();
                for (const auto& d : res.undetermined)
                    j["undetermined"].push_back({{"section", d.section}, {"fiber", d.fiber}, {"components", d.components}});
                if (frozen_found) j["frozen_model_found"] = *frozen_found;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << (res.models.empty() ? "unsatisfiable" : std::to_string(res.models.size()) + " model(s)")
                          << (res.truncated ? " (truncated)" : "") << ", " << res.nodes << " search nodes\n";
                for (const auto& d : res.undetermined) {
                    std::cout << "undetermined: " << d.section << " meets one of";
                    for (const auto& c : d.components) std::cout << " " << c;
                    std::cout << "\n";
                }
                if (frozen_found) std::cout << "frozen a0 " << (*frozen_found ? "is" : "is NOT") << " among the models\n";
            }
            return res.models.empty() ? 1 : 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
