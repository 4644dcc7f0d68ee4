#include "weierkern/diffbasis.hpp"
#include "weierkern/errors.hpp"
#include "weierkern/kernel.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace wk = weierkern;

namespace {

wk::SpaceCurve make_curve(const std::string& f, const std::string& g, double tolerance) {
    std::vector<std::string> vars{"x1", "x2", "x3"};
    return wk::SpaceCurve(wk::MultiPoly::parse(f, vars), wk::MultiPoly::parse(g, vars),
                          tolerance);
}

} // namespace

PYBIND11_MODULE(_weierkern, m) {
    m.doc() = "kernels and differentials on intersection curves";

    py::register_exception<wk::Error>(m, "WeierkernError");

    m.def("genus_complete_intersection", &wk::genus_complete_intersection,
          py::arg("deg_f"), py::arg("deg_g"));

    py::class_<wk::SpaceCurve>(m, "SpaceCurve")
        .def(py::init(&make_curve), py::arg("f"), py::arg("g"),
             py::arg("tolerance") = 1e-9)
        .def("genus", &wk::SpaceCurve::genus)
        .def("deg_f", &wk::SpaceCurve::deg_f)
        .def("deg_g", &wk::SpaceCurve::deg_g)
        .def("residual", &wk::SpaceCurve::residual, py::arg("x"))
        .def(
            "fiber",
            [](const wk::SpaceCurve& c, wk::Complex a) {
                std::vector<wk::Triple> out;
                for (const auto& p : c.fiber(a).points) out.push_back(p.x);
                return out;
            },
            py::arg("x1"))
        .def(
            "kernel",
            [](const wk::SpaceCurve& c, const std::string& variant, const wk::Triple& x,
               const wk::Triple& y) {
                return wk::kernel_eval(c, wk::parse_variant(variant), x, y).coeff;
            },
            py::arg("variant"), py::arg("x"), py::arg("y"))
        .def(
            "basis",
            [](const wk::SpaceCurve& c, int weight) {
                std::vector<std::string> out;
                for (const auto& e : wk::holomorphic_basis(c, weight))
                    out.push_back(e.numerator.print({"x1", "x2", "x3"}));
                return out;
            },
            py::arg("weight"));
}
