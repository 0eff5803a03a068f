#include "kwahl/catalog.hpp"
#include "kwahl/reconstruct.hpp"

#include <doctest.h>

#include <algorithm>

using namespace kw;

namespace {

struct Data {
    Configuration a0 = load_config(default_data_dir() + "/a0.json");
    Expected ex = load_expected(default_data_dir() + "/expected.json");
    std::vector<SurfaceRecord> records = load_records(default_data_dir() + "/records.txt");
};

const Data& data() {
    static const Data d;
    return d;
}

// Component of `fiber` that section `sec` meets in model m, by name.
std::string met(const Incidence& m, const std::string& sec, int fiber) {
    for (int s = 0; s < kSections; ++s)
        if (section_name(s) == sec) return component_name(fiber, m[static_cast<size_t>(s)][static_cast<size_t>(fiber)]);
    throw std::out_of_range(sec);
}

int fiber_of(const std::string& comp) {
    for (int f = 0; f < kFibers; ++f)
        for (int i = 0; i < fiber_size(f); ++i)
            if (component_name(f, i) == comp) return f;
    throw std::out_of_range(comp);
}

}  // namespace

TEST_CASE("skeleton naming") {
    int total = 0;
    for (int f = 0; f < kFibers; ++f) total += fiber_size(f);
    CHECK(total + kSections == 32);
    CHECK(fiber_of("F1") == fiber_of("F8"));
    CHECK(fiber_of("F9") != fiber_of("F1"));
    CHECK(fiber_of("C1") == fiber_of("C2"));
}

TEST_CASE("incidence round trip") {
    const Incidence inc = incidence_of(data().a0);
    const Configuration back = build_a0(inc);
    CHECK(back.r() == 32);
    CHECK(back.t2() == 72);
    std::vector<std::string> names;
    for (const Curve& c : data().a0.curves) names.push_back(c.name);
    CHECK(intersection_matrix_by_name(back, names) == intersection_matrix(data().a0));
    CHECK(incidence_of(back) == inc);
}

TEST_CASE("all printed data together") {
    const A0Constraints cons = constraints_from(data().ex, data().records);
    const ReconstructResult res = reconstruct_a0(cons);
    REQUIRE_FALSE(res.models.empty());
    CHECK_FALSE(res.truncated);
    const Incidence frozen = incidence_of(data().a0);
    CHECK(std::count(res.models.begin(), res.models.end(), frozen) == 1);
    // every model reproduces every stated determinant
    for (const Incidence& m : res.models) {
        const Configuration c = build_a0(m);
        for (const SurfaceRecord& r : data().records)
            REQUIRE(det_exact(intersection_matrix_by_name(c, r.curves)) == r.det);
        for (const PrintedMatrix& pm : data().ex.matrices)
            REQUIRE(intersection_matrix_by_name(c, pm.curves) == pm.rows);
    }
    // D4 never appears together with the C3/C4 fibre in any constraint
    bool d4 = false;
    for (const Disagreement& d : res.undetermined)
        if (d.section == "D4" && fiber_of(d.components.front()) == fiber_of("C3")) d4 = true;
    CHECK(d4);
    CHECK(res.models.size() > 1);
}

TEST_CASE("zero height singles out the frozen configuration") {
    A0Constraints cons = constraints_from(data().ex, data().records);
    cons.height_axioms = true;
    const ReconstructResult res = reconstruct_a0(cons);
    REQUIRE(res.models.size() == 1);
    CHECK(res.models[0] == incidence_of(data().a0));
    CHECK(res.undetermined.empty());
}

TEST_CASE("a corrupted determinant is detected") {
    auto records = data().records;
    auto it = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.id == "2.3"; });
    REQUIRE(it != records.end());
    REQUIRE(it->det == -28);
    it->det = -29;
    const ReconstructResult res = reconstruct_a0(constraints_from(data().ex, records));
    CHECK(res.models.empty());
}

TEST_CASE("the first printed matrix alone forces its section incidences") {
    A0Constraints cons;
    auto pm = std::find_if(data().ex.matrices.begin(), data().ex.matrices.end(), [](const auto& m) { return m.k2 == 2; });
    REQUIRE(pm != data().ex.matrices.end());
    cons.matrices = {*pm};
    // the other sections stay nearly free, so only a prefix of the models is listed;
    // printed entries are filtered before the search, hence hold in every model
    const ReconstructResult res = reconstruct_a0(cons, 4096);
    REQUIRE_FALSE(res.models.empty());
    for (const Incidence& m : res.models) {
        REQUIRE(met(m, "A2", fiber_of("C1")) == "C1");
        REQUIRE(met(m, "D1", fiber_of("C2")) == "C2");
        REQUIRE(met(m, "A2", fiber_of("B1")) == "B1");
    }
}

TEST_CASE("truncation is reported") {
    A0Constraints none;
    const ReconstructResult res = reconstruct_a0(none, 5);
    CHECK(res.models.size() == 5);
    CHECK(res.truncated);
}
