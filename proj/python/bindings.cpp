#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roughw/characteristics.hpp"
#include "roughw/io.hpp"
#include "roughw/scenarios.hpp"

namespace py = pybind11;
using namespace roughw;

namespace {

rde::VectorField make_field(std::size_t state_dim, std::size_t driver_dim,
                            std::function<Mat(const Vec&)> f,
                            std::function<std::vector<Mat>(const Vec&)> Df) {
    rde::VectorField field;
    field.state_dim = state_dim;
    field.driver_dim = driver_dim;
    field.f = std::move(f);
    field.Df = std::move(Df);
    if (!field.Df) return rde::with_fd_jacobian(std::move(field));
    return field;
}

}  // namespace

PYBIND11_MODULE(_roughw, m) {
    m.doc() = "rough-path verification toolkit";

    py::register_exception<precondition_error>(m, "PreconditionError");
    py::register_exception<divergence_error>(m, "DivergenceError");

    py::class_<RoughPath>(m, "RoughPath")
        .def(py::init([](const Vec& times, const Mat& values, const std::vector<Mat>& cum2,
                         double alpha) {
                 return RoughPath(TimeGrid(times), values, cum2, alpha);
             }),
             py::arg("times"), py::arg("values"), py::arg("cum2"), py::arg("alpha"))
        .def_property_readonly("dim", &RoughPath::dim)
        .def_property_readonly("n_steps", &RoughPath::n_steps)
        .def_property_readonly("alpha", &RoughPath::alpha)
        .def_property_readonly("times", [](const RoughPath& p) { return p.grid().times(); })
        .def_property_readonly("values", [](const RoughPath& p) { return p.values(); })
        .def_property_readonly("cum2", [](const RoughPath& p) { return p.cum2(); })
        .def("value", &RoughPath::value, py::arg("i"))
        .def("increment", &RoughPath::increment, py::arg("i"), py::arg("j"))
        .def("second_level", &RoughPath::second_level, py::arg("i"), py::arg("j"))
        .def("bracket", &RoughPath::bracket, py::arg("i"), py::arg("j"))
        .def("chen_residual", &RoughPath::chen_residual, py::arg("i"), py::arg("k"), py::arg("j"))
        .def("sup_norm", &RoughPath::sup_norm)
        .def("is_weak_geometric", &RoughPath::is_weak_geometric, py::arg("tol_scale") = 1e-10);

    m.def("driver_names", &scenarios::driver_names);
    m.def("make_driver", &scenarios::named_driver, py::arg("name"), py::arg("dim"), py::arg("n"),
          py::arg("seed"), py::arg("alpha"), py::arg("horizon") = 1.0);
    m.def("geometrize", &geometrize);
    m.def("restrict_stride", &restrict_stride, py::arg("path"), py::arg("stride"));
    m.def("subinterval", &subinterval, py::arg("path"), py::arg("i0"), py::arg("i1"));
    m.def("rough_distance", &rough_distance, py::arg("p"), py::arg("q"), py::arg("alpha"));
    m.def("save_path", &io::save_rough_path, py::arg("path"), py::arg("file"));
    m.def("load_path", &io::load_rough_path, py::arg("file"));

    py::class_<HoelderReport>(m, "HoelderReport")
        .def_readonly("alpha", &HoelderReport::alpha)
        .def_readonly("norm_x_alpha", &HoelderReport::norm_x_alpha)
        .def_readonly("norm_xx_2alpha", &HoelderReport::norm_xx_2alpha)
        .def_readonly("norm_x_sup", &HoelderReport::norm_x_sup)
        .def_readonly("bracket_2alpha", &HoelderReport::bracket_2alpha)
        .def_readonly("adjacent_only", &HoelderReport::adjacent_only);
    m.def("hoelder_norms", &hoelder_norms, py::arg("path"), py::arg("alpha"),
          py::arg("adjacent_only") = false);

    py::class_<ControlledPath>(m, "ControlledPath")
        .def(py::init<const RoughPath&, Mat, std::vector<Mat>>(), py::arg("driver"),
             py::arg("values"), py::arg("gubinelli"), py::keep_alive<1, 2>())
        .def_property_readonly("dim", &ControlledPath::dim)
        .def_property_readonly("n_steps", &ControlledPath::n_steps)
        .def_property_readonly("values", [](const ControlledPath& y) { return y.values(); })
        .def_property_readonly("gubinelli", [](const ControlledPath& y) { return y.gubinelli(); })
        .def("value", &ControlledPath::value, py::arg("i"))
        .def(
            "remainder",
            [](const ControlledPath& y, std::size_t i, std::size_t j) {
                return roughw::remainder(y, i, j);
            },
            py::arg("i"), py::arg("j"));

    py::class_<RowControlledPath>(m, "RowControlledPath")
        .def(py::init<const RoughPath&, Mat, std::vector<Mat>>(), py::arg("driver"),
             py::arg("values"), py::arg("gubinelli"), py::keep_alive<1, 2>())
        .def_property_readonly("n_steps", &RowControlledPath::n_steps)
        .def_property_readonly("values", [](const RowControlledPath& y) { return y.values(); })
        .def_property_readonly("gubinelli",
                               [](const RowControlledPath& y) { return y.gubinelli(); });

    m.def("canonical_lift", &canonical_lift, py::keep_alive<0, 1>());
    m.def("coordinate_lift", &coordinate_lift, py::arg("path"), py::arg("component"),
          py::keep_alive<0, 1>());

    py::class_<ControlledNormReport>(m, "ControlledNormReport")
        .def_readonly("alpha", &ControlledNormReport::alpha)
        .def_readonly("y0_abs", &ControlledNormReport::y0_abs)
        .def_readonly("dy0_abs", &ControlledNormReport::dy0_abs)
        .def_readonly("dy_alpha", &ControlledNormReport::dy_alpha)
        .def_readonly("remainder_2alpha", &ControlledNormReport::remainder_2alpha)
        .def_readonly("total", &ControlledNormReport::total);
    m.def("controlled_norm", &controlled_norm, py::arg("path"), py::arg("alpha"));

    py::class_<integrate::IntegralResult>(m, "IntegralResult")
        .def_readonly("path", &integrate::IntegralResult::path)
        .def_readonly("defects", &integrate::IntegralResult::defects);
    m.def("rough_integral", &integrate::rough_integral, py::arg("integrand"),
          py::arg("kahan") = false, py::keep_alive<0, 1>());
    m.def("controlled_integral", &integrate::controlled_integral, py::arg("y"), py::arg("z"),
          py::arg("kahan") = false, py::keep_alive<0, 1>(), py::keep_alive<0, 2>());
    m.def("young_bracket_integral", &integrate::young_bracket_integral, py::arg("coeff"),
          py::arg("path"));

    py::class_<integrate::ConversionCheck>(m, "ConversionCheck")
        .def_readonly("residual_max", &integrate::ConversionCheck::residual_max)
        .def_readonly("scale", &integrate::ConversionCheck::scale);
    m.def("ito_strato_check_path", &integrate::ito_strato_check_path);
    m.def("ito_strato_check_controlled", &integrate::ito_strato_check_controlled);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("study", &ConvergenceReport::study)
        .def_readonly("alpha", &ConvergenceReport::alpha)
        .def_readonly("mesh", &ConvergenceReport::mesh)
        .def_readonly("residual", &ConvergenceReport::residual)
        .def_readonly("scale", &ConvergenceReport::scale)
        .def_readonly("target_slope", &ConvergenceReport::target_slope)
        .def_readonly("slope_tol", &ConvergenceReport::slope_tol)
        .def_readonly("one_sided", &ConvergenceReport::one_sided)
        .def_readonly("slope", &ConvergenceReport::slope)
        .def_readonly("exact", &ConvergenceReport::exact)
        .def_readonly("passed", &ConvergenceReport::pass);
    m.def("defect_ladder", &integrate::defect_ladder, py::arg("coarse"), py::arg("fine"),
          py::arg("stride"), py::arg("alpha"), py::arg("levels"));

    py::class_<rde::VectorField>(m, "VectorField")
        .def_readonly("state_dim", &rde::VectorField::state_dim)
        .def_readonly("driver_dim", &rde::VectorField::driver_dim)
        .def_readonly("fd_jacobian", &rde::VectorField::fd_jacobian);
    m.def("zero_field", &rde::zero_field, py::arg("state_dim"), py::arg("driver_dim"));
    m.def("constant_field", &rde::constant_field, py::arg("c"));
    m.def("linear_field", &rde::linear_field, py::arg("rate"), py::arg("driver_dim"));
    m.def("make_field", &make_field, py::arg("state_dim"), py::arg("driver_dim"), py::arg("f"),
          py::arg("Df") = nullptr);
    m.def("validate_jacobian", &rde::validate_jacobian, py::arg("field"), py::arg("box"),
          py::arg("count"), py::arg("seed"));
    m.def("solve_rde", &rde::solve_rde, py::arg("field"), py::arg("y0"), py::arg("path"),
          py::keep_alive<0, 3>());

    py::class_<rde::FlowCompositionReport>(m, "FlowCompositionReport")
        .def_readonly("lhs", &rde::FlowCompositionReport::lhs)
        .def_readonly("rhs", &rde::FlowCompositionReport::rhs)
        .def_readonly("residual_max", &rde::FlowCompositionReport::residual_max)
        .def_readonly("residual_geometric_max", &rde::FlowCompositionReport::residual_geometric_max)
        .def_readonly("scale", &rde::FlowCompositionReport::scale);
    m.def("flow_composition_residual", &rde::flow_composition_residual, py::arg("g_field"),
          py::arg("f_field"), py::arg("path"), py::arg("x"), py::arg("x_step") = 2e-3);
    m.def("flow_composition_ladder", &rde::flow_composition_ladder, py::arg("g_field"),
          py::arg("f_field"), py::arg("path"), py::arg("x"), py::arg("levels"),
          py::arg("x_step") = 2e-3);

    py::class_<wentzell::WentzellReport>(m, "WentzellReport")
        .def_readonly("alpha", &wentzell::WentzellReport::alpha)
        .def_readonly("n", &wentzell::WentzellReport::n)
        .def_readonly("lhs", &wentzell::WentzellReport::lhs)
        .def_readonly("term_initial", &wentzell::WentzellReport::term_initial)
        .def_readonly("term_h", &wentzell::WentzellReport::term_h)
        .def_readonly("term_dg", &wentzell::WentzellReport::term_dg)
        .def_readonly("term_dh_bracket", &wentzell::WentzellReport::term_dh_bracket)
        .def_readonly("term_d2g_bracket", &wentzell::WentzellReport::term_d2g_bracket)
        .def_readonly("residual_max", &wentzell::WentzellReport::residual_max)
        .def_readonly("scale", &wentzell::WentzellReport::scale);

    m.def("wentzell_scenario_names", &scenarios::wentzell_scenario_names);
    m.def(
        "run_wentzell_scenario",
        [](const std::string& name, const RoughPath& p) {
            return scenarios::run_wentzell_scenario(scenarios::make_wentzell_scenario(name, p), p);
        },
        py::arg("name"), py::arg("path"));
    m.def(
        "wentzell_scenario_ladder",
        [](const std::string& name, const RoughPath& master, std::size_t levels) {
            auto out = scenarios::wentzell_scenario_ladder(name, master, levels);
            return std::make_pair(out.ladder, out.reports);
        },
        py::arg("name"), py::arg("master"), py::arg("levels"));

    py::class_<characteristics::TransportSlice>(m, "TransportSlice")
        .def_readonly("u", &characteristics::TransportSlice::u)
        .def_readonly("inversion_residual", &characteristics::TransportSlice::inversion_residual);

    py::class_<characteristics::TransportSolver>(m, "TransportSolver")
        .def(py::init([](const std::string& scenario, const RoughPath& p) {
                 return characteristics::TransportSolver(
                     characteristics::transport_scenario(scenario, p.dim()), p);
             }),
             py::arg("scenario"), py::arg("path"), py::keep_alive<1, 3>())
        .def("slice", &characteristics::TransportSolver::slice, py::arg("t_index"),
             py::arg("x_points"))
        .def("query", &characteristics::TransportSolver::query, py::arg("t_index"), py::arg("x"))
        .def_property_readonly("starts", &characteristics::TransportSolver::starts);

    py::class_<characteristics::PdeResidualReport>(m, "PdeResidualReport")
        .def_readonly("residual_max", &characteristics::PdeResidualReport::residual_max)
        .def_readonly("scale", &characteristics::PdeResidualReport::scale);
    m.def(
        "transport_pde_residual",
        [](const std::string& scenario, const RoughPath& p, const Vec& probes, double fd_step) {
            return characteristics::pde_residual(
                characteristics::transport_scenario(scenario, p.dim()), p, probes, fd_step);
        },
        py::arg("scenario"), py::arg("path"), py::arg("probes"), py::arg("fd_step") = 1e-2);
    m.def(
        "transport_pde_ladder",
        [](const std::string& scenario, const RoughPath& p, const Vec& probes, std::size_t levels,
           double fd_step) {
            return characteristics::pde_residual_ladder(
                characteristics::transport_scenario(scenario, p.dim()), p, probes, levels, fd_step);
        },
        py::arg("scenario"), py::arg("path"), py::arg("probes"), py::arg("levels"),
        py::arg("fd_step") = 1e-2);
}
