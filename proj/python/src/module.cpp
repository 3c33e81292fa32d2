#include "arfrd/dm.hpp"
#include "arfrd/errors.hpp"
#include "arfrd/folded_normal.hpp"
#include "arfrd/inversion.hpp"
#include "arfrd/local_poly.hpp"
#include "arfrd/rkd.hpp"
#include "arfrd/simulate.hpp"
#include "arfrd/smoothness.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace arfrd;

namespace {

Sample make_sample(std::vector<double> x, std::vector<double> y, std::vector<double> t)
{
    Sample s{std::move(x), std::move(y), std::move(t)};
    validate(s);
    return s;
}

AnalysisConfig make_config(double b_y, double b_t, double alpha, double eta, int neighbors,
                           std::optional<std::pair<double, double>> c_range, int grid,
                           std::optional<double> fixed_h, const std::string& kernel)
{
    AnalysisConfig cfg;
    cfg.bounds.b_y = b_y;
    cfg.bounds.b_t = b_t;
    cfg.alpha = alpha;
    cfg.eta = eta;
    cfg.r_neighbors = neighbors;
    if (c_range)
        cfg.c_grid = CGrid{c_range->first, c_range->second, grid};
    cfg.fixed_bandwidth = fixed_h;
    cfg.fit.kernel = parse_kernel(kernel);
    validate(cfg);
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Bias-aware confidence sets for fuzzy regression discontinuity designs";
    m.attr("__version__") = ARFRD_VERSION;

    py::register_exception<Error>(m, "ArfrdError", PyExc_ValueError);

    py::class_<Piece>(m, "Piece")
        .def_readonly("lo", &Piece::lo)
        .def_readonly("hi", &Piece::hi)
        .def("__repr__", [](const Piece& p) {
            return "Piece(" + std::to_string(p.lo) + ", " + std::to_string(p.hi) + ")";
        });

    py::class_<SrdCi>(m, "SrdCi")
        .def_readonly("estimate", &SrdCi::estimate)
        .def_readonly("lower", &SrdCi::lower)
        .def_readonly("upper", &SrdCi::upper)
        .def_readonly("sd", &SrdCi::sd)
        .def_readonly("bias_bound", &SrdCi::bias_bound)
        .def_readonly("cv", &SrdCi::cv)
        .def_readonly("h", &SrdCi::h)
        .def_readonly("floor_flagged", &SrdCi::floor_flagged);

    py::class_<AuxInference>(m, "AuxInference")
        .def_readonly("c", &AuxInference::c)
        .def_readonly("tau_hat", &AuxInference::tau_hat)
        .def_readonly("sd", &AuxInference::sd)
        .def_readonly("bias_bound", &AuxInference::bias_bound)
        .def_readonly("h", &AuxInference::h_used)
        .def_readonly("p_value", &AuxInference::p_value);

    py::class_<ConfidenceSet>(m, "ConfidenceSet")
        .def_property_readonly("shape", [](const ConfidenceSet& c) { return shape_name(c.shape); })
        .def_readonly("endpoints", &ConfidenceSet::endpoints)
        .def_readonly("pieces", &ConfidenceSet::pieces)
        .def_readonly("alpha", &ConfidenceSet::alpha)
        .def_readonly("tau_t_ci", &ConfidenceSet::tau_t_ci)
        .def_readonly("diagnostics", &ConfidenceSet::diagnostics)
        .def("contains", &ConfidenceSet::contains)
        .def("length", &ConfidenceSet::length);

    py::class_<DmInference>(m, "DmInference")
        .def_readonly("estimate", &DmInference::theta_hat)
        .def_readonly("lower", &DmInference::lower)
        .def_readonly("upper", &DmInference::upper)
        .def_readonly("h", &DmInference::h)
        .def_readonly("sd", &DmInference::sd_u)
        .def_readonly("bias_bound", &DmInference::bias_bound_u);

    py::class_<RotResult>(m, "RotResult")
        .def_readonly("value", &RotResult::value)
        .def_readonly("order", &RotResult::order)
        .def_readonly("coef_plus", &RotResult::coef_plus)
        .def_readonly("coef_minus", &RotResult::coef_minus)
        .def_readonly("sup_location", &RotResult::sup_location)
        .def_readonly("r2_plus", &RotResult::r2_plus)
        .def_readonly("r2_minus", &RotResult::r2_minus);

    m.def(
        "confidence_set",
        [](std::vector<double> x, std::vector<double> y, std::vector<double> t, double b_y,
           double b_t, double alpha, double eta, int neighbors,
           std::optional<std::pair<double, double>> c_range, int grid,
           std::optional<double> fixed_h, const std::string& kernel) {
            Sample s = make_sample(std::move(x), std::move(y), std::move(t));
            AnalysisConfig cfg =
                make_config(b_y, b_t, alpha, eta, neighbors, c_range, grid, fixed_h, kernel);
            py::gil_scoped_release nogil;
            return compute_cs(s, cfg);
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("b_y"), py::arg("b_t"),
        py::arg("alpha") = 0.05, py::arg("eta") = 0.075, py::arg("neighbors") = 5,
        py::arg("c_range") = py::none(), py::arg("grid") = 100, py::arg("fixed_h") = py::none(),
        py::arg("kernel") = "triangular");

    m.def(
        "p_value",
        [](std::vector<double> x, std::vector<double> y, std::vector<double> t, double c,
           double b_y, double b_t, double alpha, std::optional<double> fixed_h) {
            Sample s = make_sample(std::move(x), std::move(y), std::move(t));
            AnalysisConfig cfg =
                make_config(b_y, b_t, alpha, 0.075, 5, std::nullopt, 100, fixed_h, "triangular");
            return ArProblem(s, cfg).p_hat(c);
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("c"), py::arg("b_y"), py::arg("b_t"),
        py::arg("alpha") = 0.05, py::arg("fixed_h") = py::none());

    m.def(
        "delta_method",
        [](std::vector<double> x, std::vector<double> y, std::vector<double> t, double b_y,
           double b_t, double alpha) {
            Sample s = make_sample(std::move(x), std::move(y), std::move(t));
            AnalysisConfig cfg =
                make_config(b_y, b_t, alpha, 0.075, 5, std::nullopt, 100, std::nullopt,
                            "triangular");
            return dm_ci_bias_aware(s, cfg);
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("b_y"), py::arg("b_t"),
        py::arg("alpha") = 0.05);

    m.def(
        "rkd_confidence_set",
        [](std::vector<double> x, std::vector<double> y, std::vector<double> t, double b_y,
           double b_t, int v, int p, double alpha, std::optional<double> fixed_h) {
            Sample s = make_sample(std::move(x), std::move(y), std::move(t));
            AnalysisConfig cfg =
                make_config(b_y, b_t, alpha, 0.075, 5, std::nullopt, 100, fixed_h, "triangular");
            RkdSpec spec{v, p, cfg.bounds};
            return fixed_h ? rkd_cs_fixed_h(s, cfg, spec, *fixed_h) : rkd_cs(s, cfg, spec);
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("b_y"), py::arg("b_t"),
        py::arg("v") = 1, py::arg("p") = 2, py::arg("alpha") = 0.05,
        py::arg("fixed_h") = py::none());

    m.def(
        "rot",
        [](std::vector<double> x, std::vector<double> dep, int order) {
            Sample s{std::move(x), dep, std::vector<double>(dep.size(), 0.0)};
            if (order == 4)
                return rot1(s, Dep::y);
            if (order == 2)
                return rot2(s, Dep::y);
            throw Error(ErrorKind::usage, "order must be 2 or 4");
        },
        py::arg("x"), py::arg("dep"), py::arg("order") = 4,
        "Rule-of-thumb curvature bound from per-side quartic (order=4) or quadratic fits.");

    m.def(
        "weights",
        [](std::vector<double> x, double h, const std::string& kernel, int p, int v) {
            Sample s{x, std::vector<double>(x.size(), 0.0), std::vector<double>(x.size(), 0.0)};
            FitSpec f;
            f.kernel = parse_kernel(kernel);
            f.p = p;
            f.v = v;
            f.bandwidth(h);
            return weights(s, f).w;
        },
        py::arg("x"), py::arg("h"), py::arg("kernel") = "triangular", py::arg("p") = 1,
        py::arg("v") = 0);

    m.def(
        "weight_ratio", [](const std::vector<double>& w) { return w_ratio(w); }, py::arg("w"));
    m.def("critical_value", &cv, py::arg("alpha"), py::arg("r"));
    m.def("folded_cdf", &folded_cdf, py::arg("x"), py::arg("r"));

    m.def(
        "simulate_sample",
        [](int row, std::uint64_t seed, std::uint64_t rep) {
            Sample s = draw_dgp(table1_preset(row), seed, rep);
            return py::make_tuple(s.x, s.y, s.t);
        },
        py::arg("row"), py::arg("seed"), py::arg("rep") = 0);

    m.def(
        "coverage",
        [](int row, const std::vector<std::string>& methods, std::size_t reps,
           std::uint64_t seed, int threads) {
            std::vector<Method> ms;
            for (const auto& name : methods)
                ms.push_back(parse_method(name));
            StudyOptions opt;
            opt.threads = threads;
            CoverageReport r;
            {
                py::gil_scoped_release nogil;
                r = coverage_study(table1_preset(row), ms, reps, {}, seed, opt);
            }
            py::dict out;
            for (const auto& s : r.methods)
                out[py::str(method_name(s.method))] = s.coverage;
            return out;
        },
        py::arg("row"), py::arg("methods"), py::arg("reps"), py::arg("seed") = 1,
        py::arg("threads") = 0);
}
