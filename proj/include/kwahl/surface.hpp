#pragma once

#include "kwahl/chain.hpp"
#include "kwahl/config.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kw {

struct MarkedSurface {
    Configuration surface;
    std::vector<std::vector<int>> wahl_chains;  // curve ids, in reading order
    std::vector<std::vector<int>> ade_chains;
    std::vector<int> free_curves;
    int blowup_count = 0;
};

// Chains of curves with self-intersection <= -2 inside `support`; fails unless every
// component is a path. ADE chains are the (-2)-paths outside `support` meeting nothing in it.
std::optional<MarkedSurface> auto_mark(const Configuration& surface, const std::set<int>& support,
                                       std::string* why = nullptr);
// Validate a hand-made marking (chain order, adjacency, disjointness).
void check_marking(const MarkedSurface& ms);

Chain chain_of(const Configuration& c, const std::vector<int>& ids);

long long k_squared(const MarkedSurface& ms);

enum class Positivity { Ample, NefOnly, NotNef };
std::string to_string(Positivity p);

struct AmpleVerdict {
    Positivity status = Positivity::Ample;
    std::optional<int> witness;     // curve id of the worst (-1)-curve or offending curve
    std::optional<Rat> witness_sum;  // s(witness)
    std::vector<std::string> notes;
    // For nef-only surfaces: the singularities produced by contracting each (-1)-curve
    // with s = -1 together with the two chains it joins.
    std::vector<CyclicQuotient> contractions;
    // Nef-only, and every K-trivial curve is a (-1)-curve joining two chain ends: K is then
    // ample on the canonical model obtained by those contractions.
    bool canonical_ample = false;
};
AmpleVerdict nef_ample_check(const MarkedSurface& ms);

struct Obstruction {
    int dim;
    int rank;
    bool singular_gram;
};
Obstruction obstruction(const Configuration& base, std::optional<int> rank_cap = std::nullopt);
int obstruction_dim(const Configuration& base, std::optional<int> rank_cap = std::nullopt);

struct Singularity {
    enum class Kind { Wahl, A } kind;
    Int n = 0, a = 0;  // Wahl
    int k = 0;         // A_k
    CyclicQuotient cq;
    std::string text() const;  // "(11,3) 1/121(1,32)" or "A_2 1/3(1,2)"
};
std::vector<Singularity> singularity_report(const MarkedSurface& ms);

enum class Pi1Status { Trivial, Inconclusive };
struct Pi1Verdict {
    Pi1Status status = Pi1Status::Inconclusive;
    std::vector<std::string> justification;
    // Per Wahl chain: exponents imposed by transversal curves, keyed by chain position (0-based).
    std::vector<std::vector<std::pair<int, Int>>> imposed;
};
// With single_incidence off, only the coprime-ends rule is applied.
Pi1Verdict pi1_verdict(const MarkedSurface& ms, bool single_incidence = true);

struct SurfaceReport {
    long long k2 = 0;
    std::vector<Singularity> singularities;
    AmpleVerdict ample;
    int obstruction_dim = 0;
    bool obstruction_caveat = false;
    Pi1Verdict pi1;
    long long family_dim = 0;
};
SurfaceReport assemble_report(const MarkedSurface& ms, const Configuration& base);
nlohmann::ordered_json report_to_json(const SurfaceReport& r, const Configuration& surface);
std::string report_to_text(const SurfaceReport& r, const Configuration& surface);

}  // namespace kw
