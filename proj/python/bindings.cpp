#include <adol/charfn.hpp>
#include <adol/do_process.hpp>
#include <adol/error.hpp>
#include <adol/model.hpp>
#include <adol/montecarlo.hpp>
#include <adol/pricing.hpp>

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace adol;

PYBIND11_MODULE(_core, m) {
    m.doc() = "ADOL characteristic-function pricer";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<DoConstants>(m, "DoConstants")
        .def_readonly("h", &DoConstants::h)
        .def_readonly("alpha_h", &DoConstants::alpha_h)
        .def_readonly("c_h", &DoConstants::c_h)
        .def_readonly("b_h", &DoConstants::b_h)
        .def_readonly("d_h_sq", &DoConstants::d_h_sq)
        .def_readonly("psi_scale", &DoConstants::psi_scale);
    m.def("do_constants", &do_constants, py::arg("h"));
    m.def("psi_h", &psi_h, py::arg("t"), py::arg("constants"));
    m.def("cov_m", &cov_m, py::arg("s"), py::arg("t"), py::arg("constants"));
    m.def("nu_t", &nu_t, py::arg("t"), py::arg("constants"));

    py::class_<AdolModel>(m, "AdolModel")
        .def(py::init<>())
        .def_static("table1", &AdolModel::table1)
        .def("validate", &AdolModel::validate)
        .def("constants", &AdolModel::constants)
        .def_readwrite("s0", &AdolModel::s0)
        .def_readwrite("sigma0", &AdolModel::sigma0)
        .def_readwrite("v0", &AdolModel::v0)
        .def_readwrite("r", &AdolModel::r)
        .def_readwrite("q", &AdolModel::q)
        .def_readwrite("mu", &AdolModel::mu)
        .def_readwrite("kappa", &AdolModel::kappa)
        .def_readwrite("theta", &AdolModel::theta)
        .def_readwrite("xi", &AdolModel::xi)
        .def_readwrite("rho", &AdolModel::rho)
        .def_readwrite("lambda_", &AdolModel::lambda)
        .def_readwrite("h", &AdolModel::h)
        .def_readwrite("m_rho", &AdolModel::m_rho)
        .def_readwrite("m_pi", &AdolModel::m_pi)
        .def_readwrite("eps", &AdolModel::eps)
        .def_readwrite("t_mat", &AdolModel::t_mat);

    py::class_<SmallParamReport>(m, "SmallParamReport")
        .def_readonly("f_ht", &SmallParamReport::f_ht)
        .def_readonly("xi", &SmallParamReport::xi)
        .def_readonly("margin", &SmallParamReport::margin)
        .def_readonly("admissible", &SmallParamReport::admissible);
    m.def("small_param_bound", &small_param_bound, py::arg("h"), py::arg("t"));
    m.def("small_param_check", &small_param_check, py::arg("model"), py::arg("margin") = 0.25);

    py::enum_<CfMode>(m, "CfMode").value("closed_form", CfMode::closed_form).value("affine_ode", CfMode::affine_ode);
    py::enum_<JMethod>(m, "JMethod")
        .value("quadrature", JMethod::quadrature)
        .value("quadratic_at_varsigma", JMethod::quadratic_at_varsigma)
        .value("quadratic_at_stationary", JMethod::quadratic_at_stationary);

    py::class_<CorrectionConfig>(m, "CorrectionConfig")
        .def(py::init<>())
        .def("validate", &CorrectionConfig::validate)
        .def_readwrite("mode", &CorrectionConfig::mode)
        .def_readwrite("order", &CorrectionConfig::order)
        .def_readwrite("sigma_step", &CorrectionConfig::sigma_step)
        .def_readwrite("v_step", &CorrectionConfig::v_step)
        .def_readwrite("j_method", &CorrectionConfig::j_method)
        .def_readwrite("time_panels", &CorrectionConfig::time_panels)
        .def_readwrite("hermite_nodes", &CorrectionConfig::hermite_nodes);

    m.def("cf_zero", &cf_zero, py::arg("u"), py::arg("model"), py::arg("mode") = CfMode::affine_ode);
    m.def("cf_total", &cf_total, py::arg("u"), py::arg("model"), py::arg("cfg") = CorrectionConfig{});
    m.def("correction", &correction, py::arg("order"), py::arg("u"), py::arg("model"),
          py::arg("cfg") = CorrectionConfig{});

    py::class_<CfEngine>(m, "CfEngine")
        .def(py::init<const AdolModel&, const CorrectionConfig&>(), py::arg("model"), py::arg("cfg"))
        .def("total", &CfEngine::total, py::arg("u"), py::call_guard<py::gil_scoped_release>())
        .def("correction", &CfEngine::correction, py::arg("order"), py::arg("u"),
             py::call_guard<py::gil_scoped_release>())
        .def("z", &CfEngine::z, py::arg("order"), py::arg("u"), py::arg("t"), py::arg("sigma"), py::arg("v"));

    py::class_<GreenPieces>(m, "GreenPieces")
        .def(py::init<const AdolModel&>(), py::arg("model"))
        .def("alpha1", &GreenPieces::alpha1)
        .def("tau", &GreenPieces::tau)
        .def("tau_closed_form", &GreenPieces::tau_closed_form)
        .def("tau_closed_form_verbatim", &GreenPieces::tau_closed_form_verbatim)
        .def("t_of_tau", &GreenPieces::t_of_tau);

    py::class_<JExpansion>(m, "JExpansion")
        .def_readonly("center", &JExpansion::center)
        .def_readonly("k", &JExpansion::k)
        .def_readonly("a0", &JExpansion::a0)
        .def_readonly("a1", &JExpansion::a1)
        .def_readonly("a2", &JExpansion::a2);
    py::class_<JResult>(m, "JResult")
        .def_readonly("value", &JResult::value)
        .def_readonly("expansion", &JResult::expansion)
        .def_readonly("error", &JResult::error);
    m.def(
        "j_integral",
        [](double varsigma, double omega, double chi, const GreenPieces& g, JMethod method) {
            return j_integral(varsigma, omega, chi, g, method);
        },
        py::arg("varsigma"), py::arg("omega"), py::arg("chi"), py::arg("green"),
        py::arg("method") = JMethod::quadrature);

    py::class_<FourierPricingSpec>(m, "FourierPricingSpec")
        .def(py::init<>())
        .def_readwrite("damping", &FourierPricingSpec::damping)
        .def_readwrite("u_max", &FourierPricingSpec::u_max)
        .def_readwrite("n_points", &FourierPricingSpec::n_points);
    m.def("bs_price", &bs_price, py::arg("spot"), py::arg("strike"), py::arg("r"), py::arg("q"),
          py::arg("total_variance"), py::arg("is_call"), py::arg("t") = 0.0);
    m.def("bs_cf", &bs_cf, py::arg("u"), py::arg("r"), py::arg("q"), py::arg("t"), py::arg("total_variance"));
    m.def("implied_vol", &implied_vol, py::arg("price"), py::arg("spot"), py::arg("strike"), py::arg("r"),
          py::arg("q"), py::arg("t"), py::arg("is_call"));
    m.def("fourier_price", &fourier_price, py::arg("cf"), py::arg("spot"), py::arg("strike"), py::arg("r"),
          py::arg("q"), py::arg("t"), py::arg("spec") = FourierPricingSpec{}, py::arg("is_call") = true);
    m.def(
        "model_price",
        [](const AdolModel& model, const CorrectionConfig& cfg, double strike, bool is_call,
           const FourierPricingSpec& spec) {
            const CfEngine e(model, cfg);
            return fourier_price([&](Complex u) { return e.total(u); }, model.s0, strike, model.r, model.q,
                                 model.t_mat, spec, is_call);
        },
        py::arg("model"), py::arg("cfg"), py::arg("strike"), py::arg("is_call") = true,
        py::arg("spec") = FourierPricingSpec{}, py::call_guard<py::gil_scoped_release>());

    py::class_<McSpec>(m, "McSpec")
        .def(py::init<>())
        .def_readwrite("n_paths", &McSpec::n_paths)
        .def_readwrite("n_steps", &McSpec::n_steps)
        .def_readwrite("seed", &McSpec::seed)
        .def_readwrite("t_start", &McSpec::t_start)
        .def_readwrite("antithetic", &McSpec::antithetic)
        .def_readwrite("threads", &McSpec::threads);
    py::class_<PathStats>(m, "PathStats")
        .def_readonly("estimate", &PathStats::estimate)
        .def_readonly("std_error", &PathStats::std_error)
        .def_readonly("n_effective", &PathStats::n_effective);
    m.def("mc_price", &mc_price, py::arg("model"), py::arg("spec"), py::arg("strike"), py::arg("is_call") = true,
          py::call_guard<py::gil_scoped_release>());
    m.def("mc_discounted_spot", &mc_discounted_spot, py::arg("model"), py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());
    m.def("mc_quadratic_variation", &mc_quadratic_variation, py::arg("model"), py::arg("spec"),
          py::arg("observation_times"), py::call_guard<py::gil_scoped_release>());

    py::class_<VarSwapSpec>(m, "VarSwapSpec")
        .def(py::init<>())
        .def_readwrite("observation_times", &VarSwapSpec::observation_times)
        .def_readwrite("u_step", &VarSwapSpec::u_step)
        .def_readwrite("mc_states", &VarSwapSpec::mc_states)
        .def_readwrite("mc_steps", &VarSwapSpec::mc_steps)
        .def_readwrite("seed", &VarSwapSpec::seed);
    py::class_<VarSwapResult>(m, "VarSwapResult")
        .def_readonly("strike", &VarSwapResult::strike)
        .def_readonly("std_error", &VarSwapResult::std_error)
        .def_readonly("imag_residue", &VarSwapResult::imag_residue)
        .def_readonly("richardson_ratio", &VarSwapResult::richardson_ratio)
        .def_readonly("strike_coarse", &VarSwapResult::strike_coarse);
    m.def("varswap_strike", &varswap_strike, py::arg("model"), py::arg("spec"),
          py::arg("cfg") = CorrectionConfig{}, py::call_guard<py::gil_scoped_release>());
}
