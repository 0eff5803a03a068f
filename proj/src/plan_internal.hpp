#pragma once

#include "kwahl/plan.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace kw::detail {

// Shape of one string of blow-ups, from its move word alone.
struct GroupShape {
    std::vector<int> inner;  // -self-intersections of the exceptional curves, x side first
    int lead_l = 0;          // extra decrements on x beyond the first blow-up
    int lead_r = 0;
};

GroupShape group_shape(const std::string& moves);
std::vector<std::string> words_for(const std::vector<int>& target);
std::vector<std::string> all_words(int len);

// Lightweight dual graph: val = -self-intersection, only curves with val >= 2 count.
struct Sketch {
    std::vector<int> val;
    std::vector<std::array<int, 2>> edges;
};

Sketch build_sketch(const Configuration& base, const std::vector<char>& kept,
                    const std::vector<std::string>& words);
// Components of the val >= 2 part; all_paths is false when one of them is not a chain.
std::vector<std::vector<int>> sketch_chains(const Sketch& s, bool* all_paths);
Chain canonical(Chain c);

// Linear forests with `keep` edges among the nodes of base, as a mask over base.nodes.
void forests(const Configuration& base, int keep, const std::function<void(const std::vector<char>&)>& visit);

BlowupPlan plan_from_words(const Configuration& base, const std::vector<char>& kept,
                           const std::vector<std::string>& words);

}  // namespace kw::detail
