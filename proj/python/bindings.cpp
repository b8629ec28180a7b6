#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "heis/carleman.hpp"
#include "heis/heisenberg.hpp"
#include "heis/ingham.hpp"
#include "heis/laguerre.hpp"

namespace py = pybind11;
using namespace heis;

namespace {

std::vector<double> panel_breaks(double r_max, int panels) {
    std::vector<double> breaks(panels + 1);
    for (int i = 0; i <= panels; ++i) breaks[i] = r_max * i / panels;
    return breaks;
}

}  // namespace

PYBIND11_MODULE(_heis, m) {
    m.doc() = "Laguerre functions, spectral tables, the Ingham construction and Carleman ladders on H^n";
    m.attr("__version__") = "1.0.0";

    py::register_exception<std::invalid_argument>(m, "InvalidArgument", PyExc_ValueError);

    // Laguerre
    m.def("laguerre_poly", [](int k, double delta, double t) { return laguerre_poly({k, delta}, t); },
          py::arg("k"), py::arg("delta"), py::arg("t"));
    m.def("normalized_laguerre", [](int k, double delta, double t) { return normalized_laguerre({k, delta}, t); },
          py::arg("k"), py::arg("delta"), py::arg("t"));
    m.def("normalized_laguerre_sequence", &normalized_laguerre_sequence, py::arg("delta"), py::arg("t"),
          py::arg("k_max"));
    m.def("psi", [](int k, double delta, double r) { return psi({k, delta}, r); }, py::arg("k"), py::arg("delta"),
          py::arg("r"));
    m.def("psi_norm_sq", [](int k, double delta) { return psi_norm_sq({k, delta}); }, py::arg("k"), py::arg("delta"));
    m.def("phi_radial", &phi_radial, py::arg("k"), py::arg("n"), py::arg("lam"), py::arg("r"));

    py::class_<OrthonormalityReport>(m, "OrthonormalityReport")
        .def_readonly("delta", &OrthonormalityReport::delta)
        .def_readonly("k_max", &OrthonormalityReport::k_max)
        .def_readonly("gram", &OrthonormalityReport::gram)
        .def_readonly("max_off_diagonal", &OrthonormalityReport::max_off_diagonal)
        .def_readonly("max_diagonal_error", &OrthonormalityReport::max_diagonal_error);
    m.def("laguerre_orthonormality", &laguerre_orthonormality, py::arg("delta"), py::arg("k_max"));

    // Heisenberg group
    m.def("multiplicity", &multiplicity, py::arg("k"), py::arg("n"));
    m.def("sphere_area", &sphere_area, py::arg("n"));
    py::class_<HeisPoint>(m, "HeisPoint")
        .def(py::init<std::vector<std::complex<double>>, double>(), py::arg("z"), py::arg("t"))
        .def_readwrite("z", &HeisPoint::z)
        .def_readwrite("t", &HeisPoint::t)
        .def("__mul__", &group_multiply)
        .def("inverse", &group_inverse)
        .def("norm", [](const HeisPoint& p) { return koranyi_norm(p); });

    py::class_<WeylPlancherelReport>(m, "WeylPlancherelReport")
        .def_readonly("spatial", &WeylPlancherelReport::spatial)
        .def_readonly("spectral", &WeylPlancherelReport::spectral)
        .def_readonly("relative", &WeylPlancherelReport::relative);
    m.def(
        "weyl_plancherel",
        [](const std::function<double(double)>& g, double r_max, double lam, int k_max, int n) {
            auto grid = make_panel_grid(panel_breaks(r_max, 8), 64);
            return weyl_plancherel_check(sample_profile(grid, g), lam, k_max, n);
        },
        py::arg("g"), py::arg("r_max"), py::arg("lam"), py::arg("k_max"), py::arg("n"),
        "Plancherel check for a radial function g(r) on C^n with the lambda-twisted basis.");

    // Ingham
    py::enum_<IntegralClass>(m, "IntegralClass")
        .value("convergent", IntegralClass::convergent)
        .value("divergent", IntegralClass::divergent)
        .value("unknown", IntegralClass::unknown);
    py::class_<ThetaFunction>(m, "Theta")
        .def(py::init([](std::string label, std::function<double(double)> f) {
                 return ThetaFunction{std::move(label), std::move(f), IntegralClass::unknown};
             }),
             py::arg("label"), py::arg("f"))
        .def_readonly("label", &ThetaFunction::label)
        .def_readonly("integral_class", &ThetaFunction::integral_class)
        .def("__call__", &ThetaFunction::operator());
    m.def("theta_preset", &theta_preset, py::arg("name"));

    py::class_<ThetaClassification>(m, "ThetaClassification")
        .def_readonly("integral", &ThetaClassification::integral)
        .def_readonly("tail_estimate", &ThetaClassification::tail_estimate)
        .def_readonly("log_exponent", &ThetaClassification::log_exponent)
        .def_readonly("numeric_class", &ThetaClassification::numeric_class)
        .def_readonly("reported_class", &ThetaClassification::reported_class)
        .def_readonly("confidence", &ThetaClassification::confidence)
        .def_readonly("monotone", &ThetaClassification::monotone);
    m.def("classify_theta", &classify_theta, py::arg("theta"), py::arg("T_max") = 1e6);

    py::class_<InghamParams>(m, "InghamParams")
        .def_readonly("n", &InghamParams::n)
        .def_readonly("rho", &InghamParams::rho)
        .def_readonly("tau", &InghamParams::tau)
        .def_readonly("a", &InghamParams::a)
        .def_readonly("c", &InghamParams::c)
        .def_readonly("c_n", &InghamParams::c_n)
        .def_readonly("J_max", &InghamParams::J_max)
        .def("support_radius_bound", &InghamParams::support_radius_bound, py::arg("N"));
    m.def("choose_sequences", &choose_sequences, py::arg("theta"), py::arg("J_max"), py::arg("c_n"),
          py::arg("n") = 1);
    m.def("fj_coefficients", &fj_coefficients, py::arg("rho"), py::arg("lam"), py::arg("k_max"), py::arg("n"));
    m.def("gj_fourier", &gj_fourier, py::arg("tau"), py::arg("lam"));

    py::class_<DecayVerdict>(m, "DecayVerdict")
        .def_readonly("C", &DecayVerdict::C)
        .def_readonly("C_refined", &DecayVerdict::C_refined)
        .def_readonly("relative_change", &DecayVerdict::relative_change)
        .def_readonly("passed", &DecayVerdict::pass);
    m.def(
        "gn_log_modulus",
        [](const InghamParams& p, const ThetaFunction& theta, const std::vector<double>& lambdas, int k_max) {
            return build_GN_spectral(p, theta, lambdas, k_max).log_modulus;
        },
        py::arg("params"), py::arg("theta"), py::arg("lambdas"), py::arg("k_max"),
        "log |R_k(lambda, G_N)| laid out lambda-major, k fastest.");
    m.def(
        "gn_decay_verdict",
        [](const InghamParams& p, const ThetaFunction& theta, const std::vector<double>& lambdas, int k_max) {
            const auto base = verify_decay(build_GN_spectral(p, theta, lambdas, k_max), theta);
            const auto refined = verify_decay(build_GN_spectral(p, theta, lambdas, 2 * k_max), theta);
            return decay_verdict(base, refined);
        },
        py::arg("params"), py::arg("theta"), py::arg("lambdas"), py::arg("k_max"));

    // Carleman
    py::enum_<CarlemanClass>(m, "CarlemanClass")
        .value("divergent", CarlemanClass::divergent)
        .value("convergent", CarlemanClass::convergent)
        .value("inconclusive", CarlemanClass::inconclusive);
    py::class_<SobolevLadder>(m, "SobolevLadder")
        .def_readonly("lam", &SobolevLadder::lambda)
        .def_readonly("m_values", &SobolevLadder::m_values)
        .def_readonly("log_norms", &SobolevLadder::log_norms)
        .def_readonly("roots", &SobolevLadder::roots)
        .def_readonly("tail_dominated", &SobolevLadder::tail_dominated)
        .def("__len__", &SobolevLadder::size);
    py::class_<CarlemanVerdict>(m, "CarlemanVerdict")
        .def_readonly("partial_sums", &CarlemanVerdict::partial_sums)
        .def_readonly("growth_exponent", &CarlemanVerdict::growth_exponent)
        .def_readonly("classification", &CarlemanVerdict::classification)
        .def_readonly("reason", &CarlemanVerdict::reason);
    m.def("sobolev_norms_log", &sobolev_norms_log, py::arg("n"), py::arg("lam"), py::arg("log_modulus"),
          py::arg("M"));
    m.def("laguerre_sobolev_norms", &laguerre_sobolev_norms, py::arg("coefficients"), py::arg("delta"),
          py::arg("M"));
    m.def("carleman_sum", &carleman_sum, py::arg("ladder"));
    m.def(
        "synthetic_log_coefficients",
        [](const std::string& profile, int n, double lam, int k_max, double param) {
            return synthetic_log_coefficients(synthetic_profile(profile), n, lam, k_max, param);
        },
        py::arg("profile"), py::arg("n"), py::arg("lam"), py::arg("k_max"), py::arg("param") = 0.0);
    m.def("theta_decay_log_coefficients", &theta_decay_log_coefficients, py::arg("theta"), py::arg("n"),
          py::arg("lam"), py::arg("k_max"));
    m.def("heat_root_oracle", &heat_root_oracle, py::arg("m"));
    m.def("poisson_root_oracle", &poisson_root_oracle, py::arg("m"));
}
