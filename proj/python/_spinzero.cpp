#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spinzero/field_io.hpp"
#include "spinzero/green.hpp"
#include "spinzero/perturb.hpp"
#include "spinzero/radial_calculus.hpp"
#include "spinzero/special_fn.hpp"
#include "spinzero/zeroset.hpp"

namespace py = pybind11;
using namespace spinzero;

namespace {

SolverOptions solver(double tol, int block_size, int max_iterations) {
    SolverOptions o;
    o.tolerance = tol;
    o.block_size = block_size;
    o.max_iterations = max_iterations;
    return o;
}

RealGrid factor_or_zero(const GeometryPtr& g, const std::optional<RealGrid>& f) {
    return f ? *f : RealGrid::Zero(static_cast<Eigen::Index>(g->num_points()));
}

BesselOrder order_of(double nu) {
    if (nu == 0.0) return BesselOrder::zero();
    if (nu == 0.5) return BesselOrder::half();
    throw std::invalid_argument("Bessel order must be 0 or 0.5");
}

py::dict to_dict(const IdentityCase& c) {
    py::dict d;
    d["n"] = c.n;
    d["grade"] = to_string(c.grade);
    d["generator"] = c.generator;
    d["round_trip"] = c.round_trip;
    d["zero_remainder"] = c.zero_remainder;
    d["in_stated_spaces"] = c.in_stated_spaces;
    d["ok"] = c.ok();
    return d;
}

}  // namespace

PYBIND11_MODULE(_spinzero, m) {
    m.doc() = "Dirac spectra, Green kernels and eigenspinor zero sets on flat tori";
    py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);
    py::register_exception<TrackingError>(m, "TrackingError", PyExc_RuntimeError);
    m.attr("default_master_seed") = default_master_seed;

    // clifford
    m.def(
        "gamma_matrices",
        [](int n) {
            const auto F = SpinorFiber::make(n);
            std::vector<SpinorMatrix> g;
            for (int i = 0; i < n; ++i) g.push_back(F.gamma(i));
            return g;
        },
        py::arg("n"), "Clifford generators gamma_1..gamma_n (gamma_j = i sigma_j).");
    m.def(
        "j_structure", [](const Spinor& phi, int n) { return SpinorFiber::make(n).quaternionic(phi); }, py::arg("phi"),
        py::arg("n") = 3, "Quaternionic structure J(phi) = C conj(phi).");

    // special functions and Green kernels
    m.def(
        "bessel_j", [](double nu, double z) { return bessel_j(order_of(nu), z); }, py::arg("nu"), py::arg("z"));
    m.def(
        "bessel_y", [](double nu, double z) { return bessel_y(order_of(nu), z); }, py::arg("nu"), py::arg("z"));
    m.def("f_lambda", &f_lambda, py::arg("n"), py::arg("lam"), py::arg("r"));
    m.def("ode_residual", &ode_residual, py::arg("n"), py::arg("lam"), py::arg("r"));
    m.def(
        "green_eval",
        [](int n, double lam, std::vector<double> x, const Spinor& gamma) { return GreenKernel(n, lam).eval(x, gamma); },
        py::arg("n"), py::arg("lam"), py::arg("x"), py::arg("gamma"));
    m.def(
        "green_remainder",
        [](int n, double lam, std::vector<double> x, const Spinor& gamma) {
            return GreenKernel(n, lam).expansion_remainder(x, gamma);
        },
        py::arg("n"), py::arg("lam"), py::arg("x"), py::arg("gamma"));
    m.def(
        "gaussian_identity_residual",
        [](int n, double lam, double a, const Spinor& sigma0, const Spinor& sigma1, const Spinor& gamma, double tol) {
            const auto psi = TestSpinor::gaussian(a, Eigen::VectorXd::Zero(n), sigma0, sigma1);
            return verify_distributional_identity(GreenKernel(n, lam), psi, gamma, tol).residual;
        },
        py::arg("n"), py::arg("lam"), py::arg("a"), py::arg("sigma0"), py::arg("sigma1"), py::arg("gamma"),
        py::arg("tol") = 1e-7, "Residual of the distributional identity for a centred Gaussian test spinor.");

    // exact calculus and formulas
    m.def(
        "verify_preimage_identities",
        [](int n, int max_m) {
            py::list out;
            for (const auto& c : verify_preimage_identities(n, max_m)) out.append(to_dict(c));
            return out;
        },
        py::arg("n"), py::arg("max_m"));
    m.def("poincare_hopf_budget", &poincare_hopf_budget, py::arg("genus"));
    m.def(
        "_a_hat", [](int k, int d) { return a_hat_complete_intersection(k, d).str(); }, py::arg("k"), py::arg("d"));

    // torus geometry
    py::class_<TorusSpinGeometry, std::shared_ptr<TorusSpinGeometry>>(m, "Geometry")
        .def_static(
            "make",
            [](const Eigen::MatrixXd& lattice, std::vector<double> delta, std::vector<int> grid) {
                return std::const_pointer_cast<TorusSpinGeometry>(TorusSpinGeometry::make(lattice, delta, grid));
            },
            py::arg("lattice"), py::arg("delta"), py::arg("grid"))
        .def_static(
            "unit",
            [](int n, std::vector<double> delta, std::vector<int> grid) {
                return std::const_pointer_cast<TorusSpinGeometry>(TorusSpinGeometry::unit(n, delta, grid));
            },
            py::arg("n"), py::arg("delta"), py::arg("grid"))
        .def_property_readonly("dim", &TorusSpinGeometry::dim)
        .def_property_readonly("lattice", &TorusSpinGeometry::lattice)
        .def_property_readonly("delta", &TorusSpinGeometry::delta)
        .def_property_readonly("grid", &TorusSpinGeometry::grid)
        .def_property_readonly("num_points", &TorusSpinGeometry::num_points)
        .def_property_readonly("volume", &TorusSpinGeometry::volume)
        .def("flat_kernel_dim", &TorusSpinGeometry::flat_kernel_dim)
        .def("flat_spectrum_distance", &TorusSpinGeometry::flat_spectrum_distance, py::arg("lam"))
        .def("fractional", &TorusSpinGeometry::fractional, py::arg("p"))
        .def(
            "ravel", [](const TorusSpinGeometry& g, std::vector<int> idx) { return g.ravel(idx); }, py::arg("idx"));

    py::class_<SpinorField>(m, "SpinorField")
        .def(py::init([](std::shared_ptr<TorusSpinGeometry> g, Eigen::VectorXcd values) {
                 return SpinorField(std::move(g), std::move(values));
             }),
             py::arg("geometry"), py::arg("values"))
        .def_property_readonly("geometry",
                               [](const SpinorField& s) { return std::const_pointer_cast<TorusSpinGeometry>(s.geometry()); })
        .def_property_readonly("values", py::overload_cast<>(&SpinorField::values, py::const_),
                               "Interleaved samples: point-major, two components per point.")
        .def("modulus", &SpinorField::modulus)
        .def("norm", [](const SpinorField& s) { return l2_norm(s); });

    m.def(
        "plane_wave",
        [](std::shared_ptr<TorusSpinGeometry> g, std::vector<int> b, const Spinor& sigma) {
            return plane_wave(g, b, sigma);
        },
        py::arg("geometry"), py::arg("b"), py::arg("sigma"));
    m.def(
        "band_limited_field",
        [](std::shared_ptr<TorusSpinGeometry> g, int bandwidth, std::uint64_t seed) {
            return band_limited_field(g, bandwidth, seed);
        },
        py::arg("geometry"), py::arg("bandwidth"), py::arg("seed"));
    m.def("dirac_flat", &dirac_flat, py::arg("psi"));
    m.def(
        "dirac_conformal",
        [](const RealGrid& f, double t, const SpinorField& psi) {
            return dirac_conformal(ConformalFamily(psi.geometry(), f, t), psi);
        },
        py::arg("f"), py::arg("t"), py::arg("psi"));
    m.def("neg_laplacian", &neg_laplacian, py::arg("psi"));
    m.def("apply_j", &apply_j, py::arg("psi"));
    m.def("l2_inner", &l2_inner, py::arg("psi"), py::arg("phi"));
    m.def(
        "random_trig_bump",
        [](std::shared_ptr<TorusSpinGeometry> g, int bandwidth, double t, std::uint64_t seed, std::uint64_t trial) {
            auto rng = trial_rng(seed, trial);
            return random_trig_bump(g, bandwidth, t, rng);
        },
        py::arg("geometry"), py::arg("bandwidth") = bump_bandwidth, py::arg("t") = 1.0,
        py::arg("seed") = default_master_seed, py::arg("trial") = 0);
    m.def(
        "write_field", [](const SpinorField& psi, const std::string& path) { write_field(psi, path); }, py::arg("psi"),
        py::arg("path"));
    m.def(
        "read_field", [](const std::string& path) { return read_field(path); }, py::arg("path"));

    // spectra
    py::class_<EigenPair>(m, "EigenPair")
        .def_readonly("lam", &EigenPair::lambda)
        .def_readonly("psi", &EigenPair::psi)
        .def_readonly("residual", &EigenPair::residual)
        .def_readonly("cluster", &EigenPair::cluster);

    py::class_<SpectrumReport>(m, "SpectrumReport")
        .def_readonly("m", &SpectrumReport::m)
        .def_readonly("kernel_dim", &SpectrumReport::kernel_dim)
        .def_readonly("pairs", &SpectrumReport::pairs)
        .def_property_readonly("eigenvalues",
                               [](const SpectrumReport& r) {
                                   std::vector<double> v;
                                   for (const auto& e : r.enumeration) v.push_back(e.lambda);
                                   return v;
                               })
        .def_property_readonly("enumeration",
                               [](const SpectrumReport& r) {
                                   py::list out;
                                   for (const auto& e : r.enumeration) {
                                       const auto& c = r.cluster_of(e);
                                       py::dict d;
                                       d["index"] = e.index;
                                       d["lam"] = e.lambda;
                                       d["dimC"] = c.dim;
                                       d["simplicity"] = to_string(c.simplicity);
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def(
            "eigenspace",
            [](const SpectrumReport& r, int index) {
                std::vector<EigenPair> v;
                for (const auto* p : r.eigenspace(index)) v.push_back(*p);
                return v;
            },
            py::arg("index"))
        .def("max_residual", &SpectrumReport::max_residual)
        .def("json_lines", [](const SpectrumReport& r) {
            std::ostringstream s;
            write_json_lines(s, r, nlohmann::json::object());
            return s.str();
        });

    m.def(
        "eigensolve",
        [](std::shared_ptr<TorusSpinGeometry> g, int m_, std::optional<RealGrid> f, double t, double tol, int block_size,
           int max_iterations) {
            return eigensolve(ConformalFamily(g, factor_or_zero(g, f), t), m_, solver(tol, block_size, max_iterations));
        },
        py::arg("geometry"), py::arg("m"), py::arg("f") = py::none(), py::arg("t") = 0.0, py::arg("tol") = 1e-8,
        py::arg("block_size") = 16, py::arg("max_iterations") = 400,
        "Eigenvalues lambda_{-m}..lambda_m of the operator of g_t = (1 + t f) g.",
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "kernel_dim",
        [](std::shared_ptr<TorusSpinGeometry> g, std::optional<RealGrid> f, double t) {
            return kernel_dim(ConformalFamily(g, factor_or_zero(g, f), t));
        },
        py::arg("geometry"), py::arg("f") = py::none(), py::arg("t") = 0.0);

    // perturbation
    m.def("eigenvalue_derivative", &eigenvalue_derivative, py::arg("f"), py::arg("pair"));
    m.def(
        "fd_derivative",
        [](std::shared_ptr<TorusSpinGeometry> g, const RealGrid& f, int index, double h) {
            return fd_derivative(g, f, index, h);
        },
        py::arg("geometry"), py::arg("f"), py::arg("index"), py::arg("h") = 1e-3,
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "fd_branch_derivatives",
        [](std::shared_ptr<TorusSpinGeometry> g, const RealGrid& f, int index, double h) {
            std::vector<std::tuple<double, double, int, double>> out;
            for (const auto& b : fd_branch_derivatives(g, f, index, h)) out.emplace_back(b.analytic, b.fd, b.dim, b.overlap);
            return out;
        },
        py::arg("geometry"), py::arg("f"), py::arg("index"), py::arg("h") = 1e-3,
        "List of (analytic, fd, dimC, overlap) per branch.");
    m.def(
        "split_experiment",
        [](std::shared_ptr<TorusSpinGeometry> g, const RealGrid& f, int index, std::vector<double> t_grid) {
            const auto rep = split_experiment(g, f, index, t_grid);
            py::dict d;
            d["split_t"] = rep.split_t ? py::cast(*rep.split_t) : py::none();
            d["final_all_simple"] = rep.final_all_simple;
            d["final_min_gap"] = rep.final_min_gap;
            d["positions"] = rep.positions;
            std::ostringstream s;
            write_split_csv(s, rep);
            d["csv"] = s.str();
            return d;
        },
        py::arg("geometry"), py::arg("f"), py::arg("index"), py::arg("t_grid"));

    // zero sets
    m.def(
        "min_modulus",
        [](const SpinorField& psi) {
            const auto mm = min_modulus(psi);
            return py::make_tuple(mm.value, mm.grid_value, mm.grid_index, mm.fractional);
        },
        py::arg("psi"), "(refined value, grid value, grid index, fractional location).");
    m.def(
        "_zero_report",
        [](const SpinorField& psi, std::optional<double> threshold) {
            const double thr = threshold ? *threshold : default_zero_threshold(psi);
            return to_json(zero_report(psi, thr), thr).dump();
        },
        py::arg("psi"), py::arg("threshold") = py::none());
    m.def(
        "eigenspinor_with_zero",
        [](const std::vector<EigenPair>& space, std::size_t p) {
            std::vector<const EigenPair*> ptrs;
            for (const auto& e : space) ptrs.push_back(&e);
            return eigenspinor_with_zero(ptrs, p);
        },
        py::arg("eigenspace"), py::arg("p"));
    m.def(
        "_genericity_trial",
        [](std::shared_ptr<TorusSpinGeometry> g, int m_, int K, std::uint64_t seed, double t0) {
            return to_json(genericity_trial(g, m_, K, seed, t0)).dump();
        },
        py::arg("geometry"), py::arg("m"), py::arg("K"), py::arg("seed") = default_master_seed, py::arg("t0") = 0.1,
        py::call_guard<py::gil_scoped_release>());
}
