#pragma once

#include "kwahl/catalog.hpp"
#include "kwahl/surface.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kw {

// A base node is named by its two curves plus an occurrence index among parallel nodes;
// infinitely-near nodes are named the same way through exceptional curves (E1, E2, ...).
struct PlanStep {
    std::string x, y;
    int occurrence = 0;
};

struct BlowupPlan {
    std::vector<PlanStep> steps;
    std::vector<BlowStep> groups;  // the same plan in compact record form
};

Configuration replay(const Configuration& start, const BlowupPlan& plan);

// Blow up x∩y, then follow `moves` ('L': newest with its x-side neighbour, 'R': with its
// y-side neighbour). Returns the exceptional string read from x to y.
std::vector<int> apply_group(Configuration& c, const std::string& x, const std::string& y, int occurrence,
                             const std::string& moves, std::vector<PlanStep>* steps = nullptr);

struct InferOptions {
    long max_interpretations = 200000;
    int max_solutions = 64;
};

struct PlanOutcome {
    bool ok = false;
    BlowupPlan plan;
    std::optional<MarkedSurface> marked;  // on the blown-up full configuration
    std::optional<SurfaceReport> report;
    int solutions = 0;
    long explored = 0;
    std::vector<std::string> near_misses;
    std::string error;
};

PlanOutcome infer_plan(const SurfaceRecord& rec, const Configuration& a0, const InferOptions& opt = {});
// For constructions given only by curve list and chains: the kept nodes form a linear forest
// and every blown node carries one string of infinitely-near blow-ups.
PlanOutcome infer_main(const MainConstruction& mc, const Configuration& a0, const InferOptions& opt = {});

// Shared tail of both inference routes: replay on a0, mark, orient to the stated chains, report.
PlanOutcome finish_outcome(const BlowupPlan& plan, const std::vector<std::string>& curves,
                           const std::vector<StatedChain>& chains, const Configuration& a0);

struct SearchParams {
    int k2 = 2;
    int max_chains = 2;
    int max_blowups = 8;
    std::optional<int> max_chain_length;  // defaults to the K3 length bound
    long max_subsets = 2000000;
    long max_simulations_per_subset = 2000000;
    bool parallel = true;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct SearchResult {
    std::vector<SurfaceRecord> found;
    std::vector<SurfaceReport> reports;
    bool budget_exhausted = false;
    long subsets_examined = 0;
    long candidates_simulated = 0;
    std::vector<std::string> notes;
};

SearchResult search_constructions(const SearchParams& params, const Configuration& a0);

}  // namespace kw
