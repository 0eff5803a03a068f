#pragma once

#include "kwahl/arith.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace kw {

struct Curve {
    int id = 0;
    std::string name;
    int self_int = -2;
    int self_nodes = 0;
    int origin_step = -1;  // -1 for base curves, else the blow-up step that created it
};

// One transverse intersection point. a == b marks a self-node.
struct Node {
    int id = 0;
    int a = 0;
    int b = 0;
};

enum class AmbientKind { K3, Enriques, Abstract };

struct Ambient {
    AmbientKind kind = AmbientKind::K3;
    int ks2 = 0;
    int chi_top = 24;

    static Ambient k3() { return {AmbientKind::K3, 0, 24}; }
    static Ambient enriques() { return {AmbientKind::Enriques, 0, 12}; }
};

using IntMatrix = std::vector<std::vector<long long>>;

class Configuration {
public:
    std::vector<Curve> curves;
    std::vector<Node> nodes;
    Ambient ambient;
    int blowups = 0;  // ambient is the base surface blown up this many times
    std::vector<int> flagged_steps;  // blow-ups performed at self-nodes

    int add_curve(const std::string& name, int self_int);
    int add_node(int a, int b);

    const Curve& curve(int id) const;
    Curve& curve(int id);
    std::optional<int> find(const std::string& name) const;
    int id_of(const std::string& name) const;  // throws on unknown names
    bool has_curve(int id) const;

    // Node ids joining a and b, in id order.
    std::vector<int> nodes_between(int a, int b) const;
    // Number of nodes joining a and b (a != b).
    int meet(int a, int b) const;
    std::vector<int> neighbours(int id) const;  // with multiplicity
    int node_index(int node_id) const;

    int r() const { return static_cast<int>(curves.size()); }
    int t2() const { return static_cast<int>(nodes.size()); }

    // Sub-configuration on the named curves, keeping their ids and the nodes among them.
    Configuration restrict(const std::vector<std::string>& names) const;

private:
    int next_curve_id_ = 0;
    int next_node_id_ = 0;
};

IntMatrix intersection_matrix(const Configuration& c, const std::vector<int>& order);
IntMatrix intersection_matrix(const Configuration& c);
IntMatrix intersection_matrix_by_name(const Configuration& c, const std::vector<std::string>& names);

// Fraction-free elimination; T must hold intermediate minors and products of two of them.
template <class T>
T det_bareiss(std::vector<std::vector<T>> a) {
    const size_t n = a.size();
    if (n == 0) return T(1);
    T sign = 1, prev = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            size_t p = k + 1;
            while (p < n && a[p][k] == 0) ++p;
            if (p == n) return T(0);
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

Int det_exact(const IntMatrix& m);
int rank_exact(const IntMatrix& m);

struct LogChern {
    long long c1sq;
    long long c2;
};
LogChern log_chern(const Configuration& c);

struct PKInvariants {
    long long P;
    long long K;
};
PKInvariants pk_invariants(const Configuration& c);

// Blow up a node; returns the new configuration. The new curve is named E<k>.
Configuration blow_up(const Configuration& c, int node_id, int* new_curve = nullptr);

struct Geography {
    bool admissible;
    int r;
    int t2;
    int nodes_to_blow_up;
    Rat bound;  // 14 - (3P - 2)/5
};
Geography geography_check(int P, int k2);

Configuration config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const Configuration& c);
Configuration load_config(const std::string& path);

}  // namespace kw
