#include "kwahl/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace kw {

int Configuration::add_curve(const std::string& name, int self_int) {
    if (find(name)) throw std::invalid_argument("duplicate curve name " + name);
    for (const Curve& c : curves) next_curve_id_ = std::max(next_curve_id_, c.id + 1);
    Curve c;
    c.id = next_curve_id_++;
    c.name = name;
    c.self_int = self_int;
    curves.push_back(c);
    return c.id;
}

int Configuration::add_node(int a, int b) {
    if (!has_curve(a) || !has_curve(b)) throw std::invalid_argument("node references unknown curve");
    for (const Node& n : nodes) next_node_id_ = std::max(next_node_id_, n.id + 1);
    Node n{next_node_id_++, std::min(a, b), std::max(a, b)};
    nodes.push_back(n);
    if (a == b) curve(a).self_nodes += 1;
    return n.id;
}

const Curve& Configuration::curve(int id) const {
    for (const Curve& c : curves)
        if (c.id == id) return c;
    throw std::out_of_range("unknown curve id " + std::to_string(id));
}

Curve& Configuration::curve(int id) {
    for (Curve& c : curves)
        if (c.id == id) return c;
    throw std::out_of_range("unknown curve id " + std::to_string(id));
}

bool Configuration::has_curve(int id) const {
    return std::any_of(curves.begin(), curves.end(), [&](const Curve& c) { return c.id == id; });
}

std::optional<int> Configuration::find(const std::string& name) const {
    for (const Curve& c : curves)
        if (c.name == name) return c.id;
    return std::nullopt;
}

int Configuration::id_of(const std::string& name) const {
    auto id = find(name);
    if (!id) throw std::out_of_range("unknown curve " + name);
    return *id;
}

std::vector<int> Configuration::nodes_between(int a, int b) const {
    std::vector<int> out;
    const int lo = std::min(a, b), hi = std::max(a, b);
    for (const Node& n : nodes)
        if (n.a == lo && n.b == hi) out.push_back(n.id);
    std::sort(out.begin(), out.end());
    return out;
}

int Configuration::meet(int a, int b) const {
    return static_cast<int>(nodes_between(a, b).size());
}

std::vector<int> Configuration::neighbours(int id) const {
    std::vector<int> out;
    for (const Node& n : nodes) {
        if (n.a == n.b) continue;
        if (n.a == id) out.push_back(n.b);
        else if (n.b == id) out.push_back(n.a);
    }
    return out;
}

int Configuration::node_index(int node_id) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == node_id) return static_cast<int>(i);
    throw std::out_of_range("unknown node id " + std::to_string(node_id));
}

Configuration Configuration::restrict(const std::vector<std::string>& names) const {
    Configuration out;
    out.ambient = ambient;
    std::set<int> keep;
    for (const std::string& nm : names) {
        int id = id_of(nm);
        if (!keep.insert(id).second) throw std::invalid_argument("curve listed twice: " + nm);
        out.curves.push_back(curve(id));
    }
    for (const Node& n : nodes)
        if (keep.count(n.a) && keep.count(n.b)) out.nodes.push_back(n);
    out.next_curve_id_ = next_curve_id_;
    out.next_node_id_ = next_node_id_;
    return out;
}

IntMatrix intersection_matrix(const Configuration& c, const std::vector<int>& order) {
    const size_t n = order.size();
    std::map<int, size_t> pos;
    for (size_t i = 0; i < n; ++i) {
        if (!c.has_curve(order[i])) throw std::out_of_range("unknown curve id in order");
        pos[order[i]] = i;
    }
    IntMatrix m(n, std::vector<long long>(n, 0));
    for (size_t i = 0; i < n; ++i) m[i][i] = c.curve(order[i]).self_int;
    for (const Node& nd : c.nodes) {
        if (nd.a == nd.b) continue;
        auto ia = pos.find(nd.a), ib = pos.find(nd.b);
        if (ia == pos.end() || ib == pos.end()) continue;
        m[ia->second][ib->second] += 1;
        m[ib->second][ia->second] += 1;
    }
    return m;
}

IntMatrix intersection_matrix(const Configuration& c) {
    std::vector<int> order;
    for (const Curve& cv : c.curves) order.push_back(cv.id);
    return intersection_matrix(c, order);
}

IntMatrix intersection_matrix_by_name(const Configuration& c, const std::vector<std::string>& names) {
    std::vector<int> order;
    for (const std::string& nm : names) order.push_back(c.id_of(nm));
    return intersection_matrix(c, order);
}

Int det_exact(const IntMatrix& m) {
    std::vector<std::vector<Int>> a(m.size());
    for (size_t i = 0; i < m.size(); ++i) {
        if (m[i].size() != m.size()) throw std::invalid_argument("det_exact: matrix not square");
        a[i].assign(m[i].begin(), m[i].end());
    }
    return det_bareiss<Int>(std::move(a));
}

int rank_exact(const IntMatrix& m) {
    if (m.empty()) return 0;
    std::vector<std::vector<Int>> a(m.size());
    for (size_t i = 0; i < m.size(); ++i) a[i].assign(m[i].begin(), m[i].end());
    const size_t rows = a.size(), cols = a[0].size();
    size_t rank = 0;
    Int prev = 1;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t p = rank;
        while (p < rows && a[p][col] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[rank], a[p]);
        for (size_t i = rank + 1; i < rows; ++i) {
            for (size_t j = col + 1; j < cols; ++j)
                a[i][j] = (a[i][j] * a[rank][col] - a[i][col] * a[rank][j]) / prev;
            a[i][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return static_cast<int>(rank);
}

LogChern log_chern(const Configuration& c) {
    const long long r = c.r(), t2 = c.t2();
    // each blow-up adds one to the Euler number of the ambient surface
    return {2 * t2 - 2 * r, c.ambient.chi_top + c.blowups + t2 - 2 * r};
}

PKInvariants pk_invariants(const Configuration& c) {
    long long sum_sq = 0;
    for (const Curve& cv : c.curves) sum_sq += cv.self_int;
    const long long r = c.r(), t2 = c.t2();
    const long long P = sum_sq + 5 * r - 2 * t2;
    const long long K = c.ambient.ks2 - c.blowups + 2 * r - t2 - P;
    return {P, K};
}

Configuration blow_up(const Configuration& c, int node_id, int* new_curve) {
    Configuration out = c;
    const int idx = out.node_index(node_id);
    const Node nd = out.nodes[static_cast<size_t>(idx)];
    out.nodes.erase(out.nodes.begin() + idx);
    const int step = out.blowups;
    out.blowups += 1;
    int k = out.blowups;
    while (out.find("E" + std::to_string(k))) ++k;
    const int e = out.add_curve("E" + std::to_string(k), -1);
    out.curve(e).origin_step = step;
    if (nd.a == nd.b) {
        // Both branches through the node separate onto E: C' = C - 2E.
        Curve& cv = out.curve(nd.a);
        cv.self_int -= 4;
        cv.self_nodes -= 1;
        out.add_node(nd.a, e);
        out.add_node(nd.a, e);
        out.flagged_steps.push_back(step);
    } else {
        out.curve(nd.a).self_int -= 1;
        out.curve(nd.b).self_int -= 1;
        out.add_node(nd.a, e);
        out.add_node(e, nd.b);
    }
    if (new_curve) *new_curve = e;
    return out;
}

Geography geography_check(int P, int k2) {
    Geography g;
    g.bound = Rat(14) - Rat(3 * P - 2, 5);
    g.admissible = Rat(k2) <= g.bound;
    g.r = P + 2 * k2;
    g.t2 = 3 * k2 + P;
    g.nodes_to_blow_up = P + k2;
    return g;
}

namespace {

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
    }
}

}  // namespace

Configuration config_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"curves", "nodes", "ambient"}, "configuration");
    Configuration c;
    if (j.contains("ambient")) {
        const auto& a = j.at("ambient");
        reject_unknown(a, {"kind", "ks2", "chi_top"}, "ambient");
        const std::string kind = a.at("kind").get<std::string>();
        if (kind == "K3") c.ambient = Ambient::k3();
        else if (kind == "Enriques") c.ambient = Ambient::enriques();
        else if (kind == "abstract") c.ambient = {AmbientKind::Abstract, a.at("ks2").get<int>(), a.at("chi_top").get<int>()};
        else throw std::invalid_argument("ambient: unknown kind '" + kind + "'");
    }
    for (const auto& cj : j.at("curves")) {
        reject_unknown(cj, {"name", "self_int"}, "curve");
        c.add_curve(cj.at("name").get<std::string>(), cj.at("self_int").get<int>());
    }
    for (const auto& nj : j.at("nodes")) {
        if (!nj.is_array() || nj.size() != 2) throw std::invalid_argument("node: expected [nameA, nameB]");
        auto a = c.find(nj[0].get<std::string>()), b = c.find(nj[1].get<std::string>());
        if (!a || !b) throw std::invalid_argument("node references unknown curve " + nj.dump());
        c.add_node(*a, *b);
    }
    return c;
}

nlohmann::ordered_json config_to_json(const Configuration& c) {
    nlohmann::ordered_json j;
    if (c.ambient.kind != AmbientKind::K3) {
        nlohmann::ordered_json a;
        a["kind"] = c.ambient.kind == AmbientKind::Enriques ? "Enriques" : "abstract";
        if (c.ambient.kind == AmbientKind::Abstract) {
            a["ks2"] = c.ambient.ks2;
            a["chi_top"] = c.ambient.chi_top;
        }
        j["ambient"] = a;
    }
    j["curves"] = nlohmann::ordered_json::array();
    for (const Curve& cv : c.curves) {
        nlohmann::ordered_json cj;
        cj["name"] = cv.name;
        cj["self_int"] = cv.self_int;
        j["curves"].push_back(cj);
    }
    j["nodes"] = nlohmann::ordered_json::array();
    for (const Node& n : c.nodes) j["nodes"].push_back({c.curve(n.a).name, c.curve(n.b).name});
    return j;
}

Configuration load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

}  // namespace kw
