#include "kwahl/catalog.hpp"
#include "kwahl/chain.hpp"
#include "kwahl/plan.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

namespace py = pybind11;
using namespace kw;

namespace {

py::int_ to_py(const Int& v) {
    return py::reinterpret_steal<py::int_>(PyLong_FromString(v.str().c_str(), nullptr, 10));
}

Int from_py(const py::int_& v) { return Int(py::str(v).cast<std::string>()); }

py::object to_fraction(const Rat& v) {
    static py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(to_py(numerator(v)), to_py(denominator(v)));
}

py::list fractions(const std::vector<Rat>& v) {
    py::list out;
    for (const Rat& r : v) out.append(to_fraction(r));
    return out;
}

py::object json_to_py(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

std::string dir_or_default(const std::optional<std::string>& d) { return d ? *d : default_data_dir(); }

py::dict record_to_py(const SurfaceRecord& r) {
    py::dict d;
    d["id"] = r.id;
    d["k2"] = r.k2;
    d["curves"] = r.curves;
    d["det"] = to_py(r.det);
    py::list steps;
    for (const BlowStep& s : r.steps) steps.append(py::make_tuple(s.pattern, s.x, s.y));
    d["steps"] = steps;
    py::list chains;
    for (const StatedChain& c : r.chains) chains.append(py::make_tuple(to_py(c.n), to_py(c.a), c.chain));
    d["chains"] = chains;
    d["blowups"] = r.blowup_count();
    return d;
}

}  // namespace

PYBIND11_MODULE(_kwahl, m) {
    m.doc() = "Wahl chains, surface assembly and catalogue checks";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("hj_expand", [](const py::int_& mm, const py::int_& q) { return hj_expand(from_py(mm), from_py(q)); },
          py::arg("m"), py::arg("q"));
    m.def("hj_eval", [](const Chain& c) {
        auto [mm, q] = hj_eval(c);
        return py::make_tuple(to_py(mm), to_py(q));
    });
    m.def("is_wahl", [](const Chain& c) -> py::object {
        auto w = is_wahl(c);
        if (!w) return py::none();
        return py::make_tuple(to_py(w->n), to_py(w->a));
    });
    m.def("same_wahl", [](const py::int_& n1, const py::int_& a1, const py::int_& n2, const py::int_& a2) {
        return same_wahl(from_py(n1), from_py(a1), from_py(n2), from_py(a2));
    });
    m.def("wahl_chains", [](int length) { return wahl_generate(length); }, py::arg("length"));
    m.def("discrepancies", [](const Chain& c) { return fractions(discrepancies(c)); });
    m.def("meridian_exponents", [](const Chain& c) {
        Int t0;
        py::list ts;
        for (const Int& t : meridian_exponents(c, &t0)) ts.append(to_py(t));
        return py::make_tuple(to_py(t0), ts);
    });
    m.def("blow_down_compose", [](const Chain& l, const Chain& r) {
        CyclicQuotient cq = blow_down_compose(l, r);
        return py::make_tuple(to_py(cq.m), to_py(cq.q));
    });
    m.def("fibonacci", [](int l) { return to_py(fibonacci(l)); });
    m.def("length_bound", [](int k2) { return length_bound(AmbientClass::K3, k2); }, py::arg("k2"));
    m.def("geography", [](int P, int k2) {
        Geography g = geography_check(P, k2);
        return py::make_tuple(g.admissible, g.r, g.t2);
    });

    m.def("default_data_dir", &default_data_dir);
    m.def("parse_record", [](const std::string& text) { return record_to_py(parse_record(text)); });
    m.def(
        "load_records",
        [](const std::optional<std::string>& dir) {
            py::list out;
            for (const auto& r : load_records(dir_or_default(dir) + "/records.txt")) out.append(record_to_py(r));
            return out;
        },
        py::arg("data_dir") = py::none());

    m.def(
        "infer_record",
        [](const std::string& id, const std::optional<std::string>& dir) -> py::object {
            const std::string d = dir_or_default(dir);
            const auto records = load_records(d + "/records.txt");
            auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.id == id; });
            if (it == records.end()) throw py::key_error(id);
            const Configuration a0 = load_config(d + "/a0.json");
            PlanOutcome po;
            {
                py::gil_scoped_release release;
                po = infer_plan(*it, a0);
            }
            if (!po.ok) throw std::runtime_error(po.error);
            return json_to_py(report_to_json(*po.report, po.marked->surface));
        },
        py::arg("id"), py::arg("data_dir") = py::none());

    m.def(
        "verify",
        [](bool infer_plans, const std::optional<std::string>& dir) {
            const std::string d = dir_or_default(dir);
            const Configuration a0 = load_config(d + "/a0.json");
            const auto records = load_records(d + "/records.txt");
            const Expected ex = load_expected(d + "/expected.json");
            VerifyOptions opt;
            opt.infer_plans = infer_plans;
            Ledger L;
            {
                py::gil_scoped_release release;
                L = verify_all(a0, records, ex, opt);
            }
            py::list failed;
            for (const Check& c : L.checks)
                if (!c.pass) failed.append(py::make_tuple(c.subject, c.assertion, c.detail));
            return py::make_tuple(L.checks.size() - L.failures(), L.checks.size(), failed);
        },
        py::arg("infer_plans") = false, py::arg("data_dir") = py::none());
}
