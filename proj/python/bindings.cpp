#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <vector>

#include "bnls/error.hpp"
#include "bnls/evolution.hpp"
#include "bnls/functionals.hpp"
#include "bnls/groundstate.hpp"
#include "bnls/instability.hpp"
#include "bnls/io/report.hpp"
#include "bnls/io/snapshot.hpp"

namespace py = pybind11;
using namespace bnls;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

Field to_field(const CArray& a, double half_width)
{
    const int dim = static_cast<int>(a.ndim());
    if (dim < 1 || dim > 3) throw StructuralError("field must have 1 to 3 axes");
    const auto m = a.shape(0);
    for (int d = 1; d < dim; ++d) {
        if (a.shape(d) != m) throw StructuralError("field axes must have equal length");
    }
    auto g = Grid::create(dim, static_cast<int>(m), half_width);
    std::vector<cplx> v(a.data(), a.data() + a.size());
    return Field(g, std::move(v));
}

CArray to_array(const Field& f)
{
    std::vector<py::ssize_t> shape(f.grid().dim(), f.grid().points_per_axis());
    CArray out(shape);
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

py::dict report_dict(const FunctionalReport& r)
{
    py::dict d;
    d["mass"] = r.mass;
    d["grad_norm_sq"] = r.grad_norm_sq;
    d["lap_norm_sq"] = r.lap_norm_sq;
    d["potential"] = r.potential;
    d["action"] = r.action;
    d["energy0"] = r.energy0;
    d["nehari"] = r.nehari;
    d["pohozaev"] = r.pohozaev;
    d["virial"] = r.virial;
    return d;
}

}  // namespace

PYBIND11_MODULE(_bnls, m)
{
    m.doc() = "Biharmonic NLS core";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<StructuralError>(m, "StructuralError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<PoisonedStateError>(m, "PoisonedStateError", base);
    py::register_exception<PreconditionError>(m, "PreconditionError", base);
    py::register_exception<RegimeError>(m, "RegimeError", base);
    py::register_exception<DegenerateFixedPointError>(m, "DegenerateFixedPointError", base);
    py::register_exception<ValidationError>(m, "ValidationError", base);
    py::register_exception<FormatError>(m, "FormatError", base);
    py::register_exception<IoError>(m, "IoError", base);

    py::class_<PhysicalParams>(m, "Params")
        .def(py::init([](double gamma, double mu, double omega, double sigma, int dim) {
                 PhysicalParams p{gamma, mu, omega, sigma, dim};
                 p.validate();
                 return p;
             }),
             py::arg("gamma") = 1.0, py::arg("mu") = 1.0, py::arg("omega") = 1.0, py::arg("sigma") = 2.0,
             py::arg("dim") = 2)
        .def_readwrite("gamma", &PhysicalParams::gamma)
        .def_readwrite("mu", &PhysicalParams::mu)
        .def_readwrite("omega", &PhysicalParams::omega)
        .def_readwrite("sigma", &PhysicalParams::sigma)
        .def_readwrite("dim", &PhysicalParams::dim)
        .def("describe", &PhysicalParams::describe)
        .def("__repr__", [](const PhysicalParams& p) {
            return "Params(gamma=" + std::to_string(p.gamma) + ", mu=" + std::to_string(p.mu) +
                   ", omega=" + std::to_string(p.omega) + ", sigma=" + std::to_string(p.sigma) +
                   ", dim=" + std::to_string(p.dim) + ")";
        });

    m.def(
        "functionals",
        [](const CArray& u, double half_width, const PhysicalParams& p) {
            return report_dict(evaluate_all(to_field(u, half_width), p));
        },
        py::arg("u"), py::arg("half_width"), py::arg("params"), "Norms and functionals of u.");

    m.def(
        "ground_state",
        [](const PhysicalParams& p, int points, double half_width, double residual_tol, int max_iters) {
            SolverConfig sc;
            sc.grid = Grid::create(p.dim, points, half_width);
            sc.residual_tol = residual_tol;
            sc.max_iters = max_iters;
            std::optional<GroundStateResult> solved;
            {
                py::gil_scoped_release release;
                solved.emplace(solve(p, sc));
            }
            const GroundStateResult& r = *solved;
            py::dict info;
            info["converged"] = r.converged;
            info["residual"] = r.residual;
            info["iterations"] = r.iterations;
            info["report"] = report_dict(r.report);
            info["identity_defects"] = py::dict(py::arg("nehari") = r.identity_defects.nehari,
                                                py::arg("pohozaev") = r.identity_defects.pohozaev,
                                                py::arg("virial") = r.identity_defects.virial);
            return py::make_tuple(to_array(r.profile), info);
        },
        py::arg("params"), py::arg("points") = 128, py::arg("half_width") = 16.0, py::arg("residual_tol") = 1e-10,
        py::arg("max_iters") = 2000, "Ground-state profile and solver diagnostics.");

    m.def(
        "evolve",
        [](const CArray& u, double half_width, const PhysicalParams& p, double dt, double t_end, int sample_every,
           double blowup_threshold, bool adapt) {
            const Field f = to_field(u, half_width);
            EvolveConfig ec;
            ec.dt = dt;
            ec.t_end = t_end;
            ec.sample_every = sample_every;
            ec.blowup_threshold = blowup_threshold;
            ec.adapt = adapt;
            TrajectoryOutcome out;
            {
                py::gil_scoped_release release;
                out = evolve(f, p, ec);
            }
            const auto n = static_cast<py::ssize_t>(out.samples.size());
            py::array_t<double> t(n), mass(n), action(n), lap(n), q(n);
            for (py::ssize_t i = 0; i < n; ++i) {
                const auto& s = out.samples[i];
                t.mutable_at(i) = s.t;
                mass.mutable_at(i) = s.report.mass;
                action.mutable_at(i) = s.report.action;
                lap.mutable_at(i) = s.lap_norm;
                q.mutable_at(i) = s.report.virial;
            }
            py::dict d;
            d["verdict"] = to_string(out.verdict);
            d["reason"] = out.reason;
            d["t_final"] = out.t_final;
            d["mass_defect"] = out.conservation_defects.mass_rel;
            d["energy_defect"] = out.conservation_defects.energy_rel;
            d["t"] = t;
            d["mass"] = mass;
            d["action"] = action;
            d["lap_norm"] = lap;
            d["virial"] = q;
            d["final"] = out.final_state ? py::object(to_array(*out.final_state)) : py::none();
            return d;
        },
        py::arg("u"), py::arg("half_width"), py::arg("params"), py::arg("dt") = 1e-3, py::arg("t_end") = 1.0,
        py::arg("sample_every") = 10, py::arg("blowup_threshold") = 1e3, py::arg("adapt") = true,
        "Strang split-step evolution with diagnostics.");

    m.def("presets", &preset_names);

    m.def(
        "_instability_json",
        [](const std::string& name, std::optional<int> points, std::optional<double> half_width,
           std::optional<double> t_end, std::optional<double> lambda) {
            auto cfg = preset(name);
            if (points || half_width) {
                cfg.solver.grid = Grid::create(cfg.params.dim, points.value_or(cfg.solver.grid->points_per_axis()),
                                               half_width.value_or(cfg.solver.grid->half_width()));
            }
            if (t_end) cfg.evolve.t_end = *t_end;
            if (lambda) cfg.lambda = *lambda;
            std::string s;
            {
                py::gil_scoped_release release;
                s = io::to_json(run_instability(cfg, name)).dump();
            }
            return s;
        },
        py::arg("preset"), py::arg("points"), py::arg("half_width"), py::arg("t_end"), py::arg("lam"));

    m.def(
        "read_snapshot",
        [](const std::filesystem::path& path) {
            const auto s = io::read_snapshot_with_params(path);
            return py::make_tuple(to_array(s.field), s.field.grid().half_width(), s.params);
        },
        py::arg("path"), "Returns (field, half_width, params).");

    m.def(
        "write_snapshot",
        [](const std::filesystem::path& path, const CArray& u, double half_width, const PhysicalParams& p) {
            io::write_snapshot(to_field(u, half_width), p, path);
        },
        py::arg("path"), py::arg("u"), py::arg("half_width"), py::arg("params"));
}
