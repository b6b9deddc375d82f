#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arrayobs/decisions.hpp"
#include "arrayobs/dynamics.hpp"
#include "arrayobs/io.hpp"
#include "arrayobs/ngraph.hpp"
#include "arrayobs/spectral.hpp"

namespace py = pybind11;
using namespace arrayobs;

namespace {

ArraySystem make_system_py(const CMatrix& A, const std::map<PairKey, CMatrix>& couplings, int q) {
    return make_array_system(q, A, symmetrize_couplings(couplings, static_cast<int>(A.rows()), q));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "observability and detectability analysis of coupled LTI arrays over "
              "matrix-weighted graphs";

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<disagreement_error>(m, "DisagreementError", PyExc_RuntimeError);

    py::class_<Tolerance>(m, "Tolerance")
        .def(py::init<>())
        .def_readwrite("rank_rtol", &Tolerance::rank_rtol)
        .def_readwrite("eig_cluster_atol", &Tolerance::eig_cluster_atol)
        .def_readwrite("psd_slack", &Tolerance::psd_slack)
        .def_readwrite("boundary_atol", &Tolerance::boundary_atol);

    py::class_<ArraySystem>(m, "ArraySystem")
        .def(py::init(&make_system_py), py::arg("A"), py::arg("couplings"), py::arg("q"))
        .def_readonly("q", &ArraySystem::q)
        .def_readonly("n", &ArraySystem::n)
        .def_readonly("A", &ArraySystem::A)
        .def_readonly("couplings", &ArraySystem::couplings);

    py::class_<NGraph>(m, "NGraph")
        .def_readonly("q", &NGraph::q)
        .def_readonly("n", &NGraph::n)
        .def_readonly("weights", &NGraph::weights);

    py::class_<EigEntry>(m, "EigEntry")
        .def_readonly("mu", &EigEntry::mu)
        .def_readonly("V", &EigEntry::V)
        .def_readonly("geometric_mult", &EigEntry::geometric_mult)
        .def_readonly("algebraic_mult", &EigEntry::algebraic_mult);

    py::class_<EigStructure>(m, "EigStructure")
        .def_readonly("entries", &EigStructure::entries)
        .def_readonly("nonderogatory", &EigStructure::nonderogatory)
        .def_readonly("diagnostics", &EigStructure::diagnostics)
        .def_property_readonly("m", &EigStructure::m);

    py::class_<EffectiveConductance>(m, "EffectiveConductance")
        .def_readonly("k", &EffectiveConductance::k)
        .def_readonly("l", &EffectiveConductance::l)
        .def_readonly("gamma", &EffectiveConductance::gamma)
        .def_readonly("potentials", &EffectiveConductance::potentials)
        .def_readonly("residual", &EffectiveConductance::residual);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("outputs", &Trajectory::outputs)
        .def_readonly("disagreement", &Trajectory::disagreement);

    m.def("observability_matrix", &observability_matrix, py::arg("C"), py::arg("A"));
    m.def("eig_structure", &eig_structure, py::arg("A"), py::arg("tol") = Tolerance{});
    m.def("interconnection_graph", &interconnection_graph, py::arg("sys"));
    m.def(
        "eigengraph",
        [](const ArraySystem& sys, std::size_t sigma, const Tolerance& tol) {
            return eigengraph(sys, sigma, eig_structure(sys.A, tol));
        },
        py::arg("sys"), py::arg("sigma"), py::arg("tol") = Tolerance{});

    m.def(
        "is_connected",
        [](const NGraph& g, const Tolerance& tol) {
            auto v = is_connected(g, tol);
            return py::make_tuple(v.connected, v.witness);
        },
        py::arg("g"), py::arg("tol") = Tolerance{});
    m.def(
        "is_pair_connected",
        [](const NGraph& g, int k, int l, const Tolerance& tol) {
            auto v = is_pair_connected(g, k, l, tol);
            return py::make_tuple(v.connected, v.witness);
        },
        py::arg("g"), py::arg("k"), py::arg("l"), py::arg("tol") = Tolerance{});
    m.def("effective_conductance", &effective_conductance, py::arg("g"), py::arg("k"), py::arg("l"),
          py::arg("tol") = Tolerance{});

    m.def(
        "is_observable",
        [](const ArraySystem& sys, const Tolerance& tol) {
            return is_observable(sys, tol).observable;
        },
        py::arg("sys"), py::arg("tol") = Tolerance{});
    m.def(
        "is_detectable",
        [](const ArraySystem& sys, const Tolerance& tol) {
            return is_detectable(sys, tol).detectable;
        },
        py::arg("sys"), py::arg("tol") = Tolerance{});
    m.def(
        "is_pair_observable",
        [](const ArraySystem& sys, int k, int l, const Tolerance& tol) {
            return is_pair_observable(sys, k, l, tol).pair_observable;
        },
        py::arg("sys"), py::arg("k"), py::arg("l"), py::arg("tol") = Tolerance{});
    m.def(
        "is_pair_detectable",
        [](const ArraySystem& sys, int k, int l, const Tolerance& tol) {
            return is_pair_detectable(sys, k, l, tol).pair_detectable;
        },
        py::arg("sys"), py::arg("k"), py::arg("l"), py::arg("tol") = Tolerance{});
    m.def("eigengraph_necessity_check", &eigengraph_necessity_check, py::arg("sys"), py::arg("k"),
          py::arg("l"), py::arg("tol") = Tolerance{});

    m.def(
        "analyze_json",
        [](const ArraySystem& sys, const Tolerance& tol, const std::vector<PairKey>& pairs,
           bool cross_check) {
            return report_to_json(analyze(sys, tol, pairs, cross_check), tol, 0.0).dump(2);
        },
        py::arg("sys"), py::arg("tol") = Tolerance{}, py::arg("pairs") = std::vector<PairKey>{},
        py::arg("cross_check") = false);

    m.def("simulate", &simulate, py::arg("sys"), py::arg("x0"), py::arg("times"));
    m.def(
        "parse_array_document",
        [](const std::string& text) { return parse_array_document(text).system; },
        py::arg("text"));
    m.def(
        "serialize_array_document",
        [](const ArraySystem& sys) {
            ArrayDocument doc;
            doc.system = sys;
            return serialize_array_document(doc);
        },
        py::arg("sys"));

#ifdef ARRAYOBS_VERSION
    m.attr("__version__") = ARRAYOBS_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
