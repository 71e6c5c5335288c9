#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loewner_lab/errors.hpp"
#include "loewner_lab/estimators.hpp"
#include "loewner_lab/formulas.hpp"
#include "loewner_lab/growth.hpp"
#include "loewner_lab/lattice.hpp"
#include "loewner_lab/loewner.hpp"
#include "loewner_lab/sle.hpp"
#include "loewner_lab/version.hpp"

namespace py = pybind11;
using namespace loewner_lab;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::array_t<int> sites_array(const std::vector<Site>& s) {
    py::array_t<int> a({static_cast<py::ssize_t>(s.size()), py::ssize_t{2}});
    auto m = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < s.size(); ++i) {
        m(i, 0) = s[i].x;
        m(i, 1) = s[i].y;
    }
    return a;
}

Geometry make_geometry(const std::string& name, double scale) {
    if (name == "chordal") return Geometry::chordal();
    if (name == "radial") return Geometry::radial(scale);
    if (name == "dipolar") return Geometry::dipolar(scale);
    throw InvalidArgument("unknown geometry '" + name + "'");
}

SleParams params(double kappa, double T, double dt, std::uint64_t seed, const std::string& geometry, double scale,
                 double rho) {
    SleParams p;
    p.kappa = kappa;
    p.T = T;
    p.dt = dt;
    p.seed = seed;
    p.rho = rho;
    p.geometry = make_geometry(geometry, geometry == "radial" && scale == 1.0 ? 2.0 : scale);
    return p;
}

NavigatorVariant variant(const std::string& v) {
    if (v == "harmonic") return NavigatorVariant::harmonic;
    if (v == "anti") return NavigatorVariant::anti;
    if (v == "percolation") return NavigatorVariant::percolation_nav;
    if (v == "boundary-harmonic") return NavigatorVariant::boundary_harmonic;
    throw InvalidArgument("unknown navigator variant '" + v + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<StepFailure>(m, "StepFailure", base.ptr());
    py::register_exception<Swallowed>(m, "Swallowed", base.ptr());
    py::register_exception<CuspReached>(m, "CuspReached", base.ptr());
    py::register_exception<DerivativeUnderflow>(m, "DerivativeUnderflow", base.ptr());
    py::register_exception<DivergentSeries>(m, "DivergentSeries", base.ptr());
    py::register_exception<DegenerateFit>(m, "DegenerateFit", base.ptr());
    py::register_exception<Undecided>(m, "Undecided", base.ptr());

    // ---- Loewner evolution
    py::class_<DrivingPath>(m, "DrivingPath")
        .def(py::init([](std::vector<double> t, std::vector<double> v, const std::string& g, double scale) {
                 return DrivingPath(std::move(t), std::move(v), make_geometry(g, scale));
             }),
             py::arg("times"), py::arg("values"), py::arg("geometry") = "chordal", py::arg("scale") = 1.0)
        .def_property_readonly("times", [](const DrivingPath& d) { return to_array(d.times()); })
        .def_property_readonly("values", [](const DrivingPath& d) { return to_array(d.values()); })
        .def_property_readonly("geometry", [](const DrivingPath& d) { return geometry_name(d.geometry().kind); })
        .def_property_readonly("final_time", &DrivingPath::final_time)
        .def("__len__", [](const DrivingPath& d) { return d.times().size(); });

    m.def(
        "trace",
        [](const DrivingPath& d) {
            const TraceSample s = trace(d);
            return py::make_tuple(to_array(s.times), to_array(s.points));
        },
        py::arg("driving"), "Trace points at every grid time: (times, points).");
    m.def(
        "forward_map",
        [](const DrivingPath& d, cplx z, double T) {
            const SwallowResult r = forward_map(d, z, T);
            return py::make_tuple(r.value, r.swallowed, r.tau);
        },
        py::arg("driving"), py::arg("z"), py::arg("T"), "(g_T(z), swallowed, tau)");
    m.def("conformal_radius", [](const DrivingPath& d, cplx z, double T) { return conformal_radius(d, z, T); },
          py::arg("driving"), py::arg("z"), py::arg("T"));
    m.def("slit_step", &chordal_slit_step, py::arg("z"), py::arg("xi"), py::arg("dt"));

    // ---- SLE sampling
    m.def(
        "sample_sle",
        [](double kappa, double T, double dt, std::uint64_t seed, const std::string& geometry, double scale,
           double rho) {
            const SleParams p = params(kappa, T, dt, seed, geometry, scale, rho);
            if (rho != 0.0) return sample_sle_kr(p);
            switch (p.geometry.kind) {
                case GeometryKind::radial: return sample_radial(p);
                case GeometryKind::dipolar: return sample_dipolar(p);
                default: return sample_chordal(p);
            }
        },
        py::arg("kappa"), py::arg("T") = 1.0, py::arg("dt") = 1e-3, py::arg("seed") = 0, py::arg("geometry") = "chordal",
        py::arg("scale") = 1.0, py::arg("rho") = 0.0);
    m.def(
        "adaptive_trace",
        [](double kappa, double T, double dt, std::uint64_t seed, double max_gap) {
            const AdaptiveTrace a = adaptive_chordal_trace(params(kappa, T, dt, seed, "chordal", 1.0, 0.0), max_gap);
            return py::make_tuple(to_array(a.trace.times), to_array(a.trace.points));
        },
        py::arg("kappa"), py::arg("T") = 1.0, py::arg("dt") = 1e-3, py::arg("seed") = 0, py::arg("max_gap") = 0.01);
    m.def("sle_kr_drift", &sle_kr_drift, py::arg("kappa"), py::arg("rho"));

    // ---- closed forms
    py::class_<CftData>(m, "CftData")
        .def_readonly("c", &CftData::c)
        .def_readonly("h12", &CftData::h12)
        .def_readonly("h13", &CftData::h13)
        .def_readonly("h0_half", &CftData::h0_half)
        .def_readonly("d_kappa", &CftData::d_kappa)
        .def_readonly("h_plus", &CftData::h_plus)
        .def_readonly("h_minus", &CftData::h_minus);
    m.def("cft_data", &cft_data, py::arg("kappa"), py::arg("rho") = 0.0);
    m.def("central_charge", &central_charge, py::arg("kappa"));
    m.def("hitting_prob", &hitting_prob, py::arg("x"), py::arg("X"), py::arg("kappa"));
    m.def("cardy_halfplane", &cardy_halfplane, py::arg("a"), py::arg("b"), py::arg("kappa"));
    m.def("cardy_rectangle", &cardy_rectangle, py::arg("r"));
    m.def("cardy_triangle", &cardy_triangle, py::arg("x"));
    m.def("elliptic_k", &elliptic_k, py::arg("m"));
    m.def("dipolar_left_prob", &dipolar_left_prob, py::arg("z"), py::arg("kappa"));
    m.def("dipolar_right_prob", &dipolar_right_prob, py::arg("z"), py::arg("kappa"));
    m.def("dipolar_in_prob", &dipolar_in_prob, py::arg("z"), py::arg("kappa"));
    m.def("dipolar_exit_density", &dipolar_exit_density, py::arg("x"), py::arg("kappa"));
    m.def("multifractal_tau", &multifractal_tau, py::arg("n"), py::arg("kappa"));
    m.def("multifractal_f", &multifractal_f, py::arg("alpha"), py::arg("kappa"));
    m.def("restriction_prob", &restriction_prob_semidisc, py::arg("x"), py::arg("r"));
    m.def(
        "arch_prob_I",
        [](double x, double kappa, double p_I, double p_II) { return arch_prob_I(x, kappa, p_I, p_II); },
        py::arg("x"), py::arg("kappa"), py::arg("p_I") = 1.0, py::arg("p_II") = 1.0);
    m.def(
        "loop_measure_total",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> A, double alpha, double lambda, int n_max) {
            if (A.ndim() != 2 || A.shape(0) != A.shape(1)) throw InvalidArgument("loop_measure_total: need a square matrix");
            WeightMatrix w{static_cast<int>(A.shape(0)), std::vector<double>(A.data(), A.data() + A.size())};
            const LoopSeries s = loop_measure_total(w, alpha, lambda, n_max);
            return py::make_tuple(s.value, s.remainder_bound);
        },
        py::arg("A"), py::arg("alpha"), py::arg("lambda_") = 1.0, py::arg("n_max") = 200, "(value, truncation bound)");

    // ---- lattice models
    m.def("loop_erase", [](const std::string& s) {
        const auto e = loop_erase(std::vector<char>(s.begin(), s.end()));
        return std::string(e.begin(), e.end());
    });
    m.def(
        "percolation_interface",
        [](int cols, int rows, std::uint64_t seed) {
            return to_array(percolation_interface(HexDomain::rectangle(cols, rows), seed).vertices);
        },
        py::arg("cols"), py::arg("rows"), py::arg("seed") = 0);
    m.def(
        "navigator_interface",
        [](int cols, int rows, std::uint64_t seed, const std::string& v) {
            return to_array(navigator_interface(HexDomain::rectangle(cols, rows), seed, variant(v)).vertices);
        },
        py::arg("cols"), py::arg("rows"), py::arg("seed") = 0, py::arg("variant") = "harmonic");
    m.def(
        "lerw_halfplane", [](int n, std::uint64_t seed) { return sites_array(lerw_halfplane(n, seed).sites); },
        py::arg("n"), py::arg("seed") = 0);
    m.def(
        "saw_pivot_chain",
        [](int n, std::size_t burn_in, std::size_t measurements, std::size_t stride, std::uint64_t seed) {
            Rng r(seed);
            const SawStats s = saw_pivot_chain(n, burn_in, measurements, stride, r);
            return py::make_tuple(s.mean_r2, s.acceptance);
        },
        py::arg("n"), py::arg("burn_in") = 10000, py::arg("measurements") = 1000, py::arg("stride") = 10,
        py::arg("seed") = 0, "(mean squared end-to-end distance, acceptance)");

    // ---- growth
    m.def(
        "lg_zn_evolve",
        [](int n, double Rc, double t, double R0) {
            const ZnState s = lg_zn_evolve(n, Rc, t, R0);
            return py::make_tuple(s.R, s.beta);
        },
        py::arg("n"), py::arg("Rc"), py::arg("t"), py::arg("R0") = 0.0, "(R, beta)");
    m.def("lg_zn_cusp_time", &lg_zn_cusp_time, py::arg("n"), py::arg("Rc"), py::arg("R0") = 0.0);
    m.def(
        "lg_evolve",
        [](std::vector<cplx> coeffs, double dt, int steps) {
            LgPolyState s;
            s.coeffs = std::move(coeffs);
            for (int k = 0; k < steps; ++k) s = lg_general_step(s, dt);
            return py::make_tuple(s.t, s.coeffs, lg_area(s));
        },
        py::arg("coeffs"), py::arg("dt"), py::arg("steps") = 1, "(t, coefficients, area) after the steps");
    m.def(
        "hl_cluster",
        [](std::size_t n, double alpha, double lambda0, std::uint64_t seed, std::size_t boundary_points) {
            HlCluster c;
            c.alpha = alpha;
            c.lambda0 = lambda0;
            c = hl_grow(c, n, seed);
            return py::make_tuple(c.log_capacity, to_array(hl_boundary(c, boundary_points)));
        },
        py::arg("n"), py::arg("alpha") = 2.0, py::arg("lambda0") = 0.1, py::arg("seed") = 0,
        py::arg("boundary_points") = 1000, "(log capacity, boundary points)");
    m.def(
        "dla", [](std::size_t n, std::uint64_t seed) { return sites_array(lattice_dla(n, seed).sites); }, py::arg("n"),
        py::arg("seed") = 0);

    // ---- estimators
    m.def(
        "fit_dimension",
        [](const std::vector<std::pair<double, double>>& samples) {
            const FitReport f = fit_dimension(samples);
            return py::make_tuple(f.exponent, f.std_error, f.r_squared);
        },
        py::arg("samples"), "(exponent, std error, r^2) from (size, statistic) pairs");
    m.def(
        "trace_dimension",
        [](const std::vector<std::vector<cplx>>& traces, const std::vector<double>& eps) {
            const FitReport f = trace_dimension(traces, eps);
            return py::make_tuple(f.exponent, f.std_error);
        },
        py::arg("traces"), py::arg("eps"));
    m.def(
        "hitting_estimate",
        [](double kappa, double x, double X, std::uint64_t paths, std::uint64_t seed) {
            const McEstimate e =
                mc_probability([&](Rng& r) { return hitting_event(kappa, x, X, r); }, paths, seed);
            return py::make_tuple(e.p_hat, e.ci_low, e.ci_high);
        },
        py::arg("kappa"), py::arg("x"), py::arg("X"), py::arg("paths") = 1000, py::arg("seed") = 0,
        "Fraction of paths that touch [x, X], with a 95% Wilson interval.");
    m.def(
        "dipolar_outcomes",
        [](double kappa, const std::vector<cplx>& zs, std::uint64_t paths, std::uint64_t seed) {
            py::list out;
            for (const DipolarCounts& c : dipolar_outcome_map(kappa, zs, paths, seed))
                out.append(py::dict(py::arg("left") = c.left, py::arg("right") = c.right, py::arg("inside") = c.inside,
                                    py::arg("undecided") = c.undecided));
            return out;
        },
        py::arg("kappa"), py::arg("zs"), py::arg("paths") = 100, py::arg("seed") = 0);
}
