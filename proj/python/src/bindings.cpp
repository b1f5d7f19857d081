#include "ncbf/bounders.hpp"
#include "ncbf/boundary_search.hpp"
#include "ncbf/dynamics.hpp"
#include "ncbf/network.hpp"
#include "ncbf/report.hpp"
#include "ncbf/verifier.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace ncbf;

namespace {

py::tuple toPair(const IntervalVector &v)
{
    return py::make_tuple(Vec(v.lo()), Vec(v.hi()));
}

py::tuple toPair(const Interval &v)
{
    return py::make_tuple(v.lo(), v.hi());
}

GridSpec gridFor(const Box &domain, const std::vector<int> &cells)
{
    if (cells.size() == 1)
        return GridSpec::uniform(domain, cells.front());
    return GridSpec{domain, cells};
}

} // namespace

PYBIND11_MODULE(_ncbf, m)
{
    m.doc() = "Interval bounds and barrier-certificate verification for tanh/sigmoid/swish MLPs";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<NetworkError>(m, "NetworkError", PyExc_ValueError);
    py::register_exception<DynamicsError>(m, "DynamicsError", PyExc_ValueError);

    py::enum_<Activation>(m, "Activation")
        .value("tanh", Activation::Tanh)
        .value("sigmoid", Activation::Sigmoid)
        .value("swish", Activation::Swish);
    py::enum_<Bounder>(m, "Bounder").value("lightcrown", Bounder::LightCrown).value("baseline", Bounder::Baseline);

    py::class_<MlpNetwork>(m, "Network")
        .def_property_readonly("input_dim", &MlpNetwork::inputDim)
        .def_property_readonly("num_hidden", &MlpNetwork::numHidden)
        .def_property_readonly("activation", &MlpNetwork::activation)
        .def("forward", &MlpNetwork::forward, py::arg("x"))
        .def("gradient", &MlpNetwork::gradient, py::arg("x"))
        .def("to_json", [](const MlpNetwork &n) { return networkToJson(n); });

    m.def("load_weights", &loadWeights, py::arg("path"));
    m.def("network_from_json", [](const std::string &text) { return networkFromJson(text); }, py::arg("text"));

    m.def(
        "preactivation_bounds",
        [](const MlpNetwork &net, const Vec &lo, const Vec &hi) {
            const auto pb = preactivationIntervals(net, Box(lo, hi));
            py::list hidden;
            for (const auto &layer : pb.hidden)
                hidden.append(toPair(layer));
            return py::make_tuple(hidden, toPair(pb.output));
        },
        py::arg("net"), py::arg("lo"), py::arg("hi"));

    m.def(
        "deriv_bounds",
        [](Activation act, double lo, double hi, Bounder b) {
            const auto spec = ActivationSpec::forKind(act);
            const Interval z(lo, hi);
            return toPair(b == Bounder::Baseline ? baselineDerivBounds(spec, z) : genericDerivBounds(spec, z));
        },
        py::arg("activation"), py::arg("lo"), py::arg("hi"), py::arg("bounder") = Bounder::LightCrown);

    m.def(
        "jacobian_bounds",
        [](const MlpNetwork &net, const Vec &lo, const Vec &hi, Bounder b) {
            const auto pre = preactivationIntervals(net, Box(lo, hi));
            return toPair(jacobianBounds(net, layerDerivBounds(net, pre, b)));
        },
        py::arg("net"), py::arg("lo"), py::arg("hi"), py::arg("bounder") = Bounder::LightCrown);

    m.def(
        "inner_product_upper",
        [](const Vec &gLo, const Vec &gHi, const Vec &fLo, const Vec &fHi) {
            return innerProductUpper(IntervalVector(gLo, gHi), IntervalVector(fLo, fHi));
        },
        py::arg("g_lo"), py::arg("g_hi"), py::arg("f_lo"), py::arg("f_hi"));

    py::class_<SystemModel>(m, "System")
        .def_property_readonly("name", &SystemModel::name)
        .def_property_readonly("state_dim", &SystemModel::stateDim)
        .def_property_readonly("domain", [](const SystemModel &s) { return toPair(s.domain()); })
        .def_property_readonly("control_vertices", [](const SystemModel &s) { return s.controls().vertices(); })
        .def("f", &SystemModel::f, py::arg("x"), py::arg("u"))
        .def("jac_x", &SystemModel::jacX, py::arg("x"), py::arg("u"));

    m.def(
        "make_system",
        [](const std::string &name, const std::string &configJson) {
            return configJson.empty() ? makeSystem(name) : makeSystemFromConfig(name, configJson);
        },
        py::arg("name"), py::arg("config_json") = "");

    m.def(
        "taylor_bounds",
        [](const SystemModel &sys, const Vec &lo, const Vec &hi, const Vec &u) {
            const auto ab = taylorAffineBounds(sys, Box(lo, hi), u);
            py::dict out;
            out["w"] = Mat(ab.w);
            out["b_under"] = Vec(ab.bUnder);
            out["b_over"] = Vec(ab.bOver);
            out["f_box"] = toPair(concretize(ab));
            return out;
        },
        py::arg("system"), py::arg("lo"), py::arg("hi"), py::arg("u"));

    m.def(
        "search_boundary",
        [](const MlpNetwork &net, const Vec &lo, const Vec &hi, const std::vector<int> &cells, bool midpoint,
           unsigned workers) {
            const auto cover = searchBoundary(net, gridFor(Box(lo, hi), cells), {midpoint, workers});
            std::vector<py::tuple> out;
            for (const auto &r : cover.regions)
                out.push_back(toPair(r));
            return out;
        },
        py::arg("net"), py::arg("lo"), py::arg("hi"), py::arg("cells"), py::arg("midpoint_check") = false,
        py::arg("workers") = 1U);

    m.def(
        "verify_json",
        [](const SystemModel &sys, const MlpNetwork &net, const std::vector<int> &cells, double alpha, int maxSplits,
           Bounder bounder, unsigned workers, bool keepGoing, bool midpointCheck) {
            VerifierConfig cfg;
            cfg.grid = gridFor(sys.domain(), cells);
            cfg.alpha = alpha;
            cfg.maxSplits = maxSplits;
            cfg.bounder = bounder;
            cfg.workers = workers;
            cfg.keepGoing = keepGoing;
            cfg.midpointCheck = midpointCheck;
            VerificationReport report;
            {
                py::gil_scoped_release release;
                report = verify(sys, net, cfg);
            }
            auto doc = reportToJson(report, cfg, sys.name());
            doc["certificates"] = certificatesToJson(report);
            return doc.dump();
        },
        py::arg("system"), py::arg("net"), py::arg("cells"), py::arg("alpha") = 0.0, py::arg("max_splits") = 3,
        py::arg("bounder") = Bounder::LightCrown, py::arg("workers") = 1U, py::arg("keep_going") = false,
        py::arg("midpoint_check") = false);
}
