#pragma once

#include "kwahl/catalog.hpp"

#include <array>
#include <string>
#include <vector>

namespace kw {

// Fibration skeleton of the extremal K3: two I8 cycles (F1..F8, F9..F16), four I2 pairs
// (B1B2, B3B4, C1C2, C3C4) and eight disjoint sections A1..A4, D1..D4. Each section meets
// exactly one component of every fiber; those choices are the unknowns.
inline constexpr int kSections = 8;
inline constexpr int kFibers = 6;

struct A0Constraints {
    std::vector<PrintedMatrix> matrices;  // entry-wise, plus determinant
    std::vector<std::pair<std::vector<std::string>, Int>> dets;
    // Torsion sections have zero height: adds the Shioda pairing equations.
    bool height_axioms = false;
};

A0Constraints constraints_from(const Expected& ex, const std::vector<SurfaceRecord>& records);

// incidence[s][f] = index of the component of fiber f met by section s.
using Incidence = std::array<std::array<int, kFibers>, kSections>;

struct Disagreement {
    std::string section;
    int fiber;                            // 0..5
    std::vector<std::string> components;  // values taken across models
};

struct ReconstructResult {
    std::vector<Incidence> models;
    bool truncated = false;
    long nodes = 0;
    std::vector<Disagreement> undetermined;
};

ReconstructResult reconstruct_a0(const A0Constraints& cons, size_t max_models = 4096);

Configuration build_a0(const Incidence& inc);
Incidence incidence_of(const Configuration& a0);

std::string section_name(int s);
std::string component_name(int fiber, int index);
int fiber_size(int fiber);

}  // namespace kw
