// Python module nlse_nonlocal._core. Fields cross the boundary as C-ordered numpy
// arrays whose shape is the grid's point count per axis.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlse/dynamics.hpp"
#include "nlse/groundstate.hpp"
#include "nlse/harness.hpp"
#include "nlse/reference.hpp"

namespace py = pybind11;
using namespace nlse;

namespace {

std::vector<py::ssize_t> shape_of(const UniformGrid& g) { return {g.n.begin(), g.n.begin() + g.dim}; }

template <class T, class Vec>
py::array_t<T> to_numpy(const UniformGrid& g, const Vec& v) {
  py::array_t<T> a(shape_of(g));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

template <class T>
std::vector<T, FftAllocator<T>> from_numpy(const UniformGrid& g, const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  if (static_cast<std::size_t>(a.size()) != g.size() || a.ndim() != g.dim)
    throw std::invalid_argument("array shape does not match the grid");
  for (int d = 0; d < g.dim; ++d)
    if (a.shape(d) != g.n[d]) throw std::invalid_argument("array shape does not match the grid");
  return {a.data(), a.data() + a.size()};
}

KernelSpec kernel_of(const std::string& name, std::optional<double> epsilon) {
  return make_kernel(parse_kernel_family(name), epsilon);
}

// "nufft" and None select the family's default NUFFT path.
PotentialMethod method_of(const std::optional<std::string>& m, KernelFamily f) {
  if (!m || *m == "nufft") return default_method(f);
  return parse_potential_method(*m);
}

ExternalPotential trap_of(const std::vector<double>& gamma) {
  std::array<double, 3> g{1.0, 1.0, 1.0};
  if (gamma.size() > 3) throw std::invalid_argument("gamma has at most three entries");
  std::copy(gamma.begin(), gamma.end(), g.begin());
  return harmonic_trap(g);
}

py::dict energies(const EnergyReport& r) {
  py::dict d;
  d["E_g"] = r.e_total;
  d["mu_g"] = r.mu;
  d["E_kin"] = r.e_kin;
  d["E_pot"] = r.e_pot;
  d["E_int"] = r.e_int;
  d["I_h"] = r.virial_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlocal NLSE solvers: potentials, ground states, dynamics, accuracy tables";
  m.attr("__version__") = library_version();

  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<UniformGrid>(m, "Grid")
      .def(py::init([](const std::vector<double>& L, const std::vector<int>& n) {
             if (L.size() != n.size()) throw std::invalid_argument("L and n differ in length");
             return make_grid(static_cast<int>(L.size()), L, n);
           }),
           py::arg("L"), py::arg("n"), "Grid on [-L_a, L_a) with n_a points per axis")
      .def_readonly("dim", &UniformGrid::dim)
      .def_property_readonly("L", [](const UniformGrid& g) { return std::vector<double>(g.L.begin(), g.L.begin() + g.dim); })
      .def_property_readonly("n", [](const UniformGrid& g) { return std::vector<int>(g.n.begin(), g.n.begin() + g.dim); })
      .def_property_readonly("h", [](const UniformGrid& g) { return std::vector<double>(g.h.begin(), g.h.begin() + g.dim); })
      .def_property_readonly("size", &UniformGrid::size)
      .def("coords", [](const UniformGrid& g, int axis) {
        if (axis < 0 || axis >= g.dim) throw std::invalid_argument("axis out of range");
        std::vector<double> x(g.n[axis]);
        for (int j = 0; j < g.n[axis]; ++j) x[j] = g.x(axis, j);
        return py::array_t<double>(x.size(), x.data());
      }, py::arg("axis"))
      .def("__repr__", [](const UniformGrid& g) {
        std::string s = "Grid(dim=" + std::to_string(g.dim) + ", n=[";
        for (int a = 0; a < g.dim; ++a) s += (a ? ", " : "") + std::to_string(g.n[a]);
        return s + "])";
      });

  m.def("gaussian_density", [](const UniformGrid& g, double sigma, double gamma) {
        return to_numpy<double>(g, gaussian_density({sigma, gamma, g.dim}, g).values);
      }, py::arg("grid"), py::arg("sigma") = 1.0, py::arg("gamma") = 1.0,
      "exp(-|x|^2/sigma^2) with the last axis scaled by gamma");

  m.def("exact_potential", [](const std::string& kernel, const UniformGrid& g, double sigma, double gamma) {
        return to_numpy<double>(g, exact_potential(parse_kernel_family(kernel), {sigma, gamma, g.dim}, g).values);
      }, py::arg("kernel"), py::arg("grid"), py::arg("sigma") = 1.0, py::arg("gamma") = 1.0);

  m.def("solve_potential",
        [](const std::string& kernel, const UniformGrid& g, py::array_t<double, py::array::c_style | py::array::forcecast> rho,
           std::optional<std::string> method, double tol, std::optional<double> epsilon) {
          const KernelSpec k = kernel_of(kernel, epsilon);
          RealField r(g, FieldKind::Density, from_numpy<double>(g, rho));
          SolverOptions o;
          o.tol = tol;
          RealField u;
          {
            py::gil_scoped_release release;
            u = solve_potential(k, r, method_of(method, k.family), o);
          }
          return to_numpy<double>(g, u.values);
        },
        py::arg("kernel"), py::arg("grid"), py::arg("rho"), py::arg("method") = py::none(), py::arg("tol") = 1e-12,
        py::arg("epsilon") = py::none(), "u = U * rho on the grid");

  m.def("error_eh", [](py::array_t<double> exact, py::array_t<double> numeric) {
        if (exact.size() != numeric.size()) throw std::invalid_argument("arrays differ in size");
        RVec a(exact.data(), exact.data() + exact.size()), b(numeric.data(), numeric.data() + numeric.size());
        return error_eh(a, b);
      }, py::arg("exact"), py::arg("numeric"), "max|exact - numeric| / max|exact|");

  m.def("ground_state",
        [](const std::string& kernel, const UniformGrid& g, double beta, std::vector<double> gamma, double tau,
           double eps0, std::optional<std::string> method, int coarse_levels, int max_steps, std::optional<double> epsilon) {
          GfdnConfig c;
          c.kernel = kernel_of(kernel, epsilon);
          c.grid = g;
          c.V = trap_of(gamma);
          c.beta = beta;
          c.tau = tau;
          c.eps0 = eps0;
          c.method = method_of(method, c.kernel.family);
          c.coarse_levels = coarse_levels;
          c.max_steps = max_steps;
          GroundStateResult r;
          {
            py::gil_scoped_release release;
            r = compute_ground_state(c);
          }
          py::dict d = energies(r.report);
          d["phi"] = to_numpy<double>(g, r.phi_g.values);
          d["potential"] = to_numpy<double>(g, r.potential.values);
          d["steps"] = r.steps;
          d["residuals"] = r.residual_history;
          return d;
        },
        py::arg("kernel"), py::arg("grid"), py::arg("beta"), py::arg("gamma") = std::vector<double>{1.0, 1.0, 1.0},
        py::arg("tau") = 1e-2, py::arg("eps0") = 1e-10, py::arg("method") = py::none(), py::arg("coarse_levels") = 0,
        py::arg("max_steps") = 200000, py::arg("epsilon") = py::none(), "Ground state in a harmonic trap by the normalized gradient flow");

  m.def("evolve",
        [](const std::string& kernel, const UniformGrid& g, std::optional<py::array_t<cplx, py::array::c_style | py::array::forcecast>> psi0,
           double beta, double tau, double t_end, int order, std::optional<std::string> method, std::vector<double> gamma,
           int trace_every, std::vector<double> snapshots, std::optional<double> epsilon) {
          DynamicsConfig c;
          c.kernel = kernel_of(kernel, epsilon);
          c.grid = g;
          c.V = trap_of(gamma);
          c.beta = beta;
          c.tau = tau;
          c.t_end = t_end;
          c.scheme = SplittingScheme::of_order(order);
          c.method = method_of(method, c.kernel.family);
          c.trace_every = trace_every;
          c.snapshot_times = snapshots;
          const ComplexField init =
              psi0 ? ComplexField(g, FieldKind::Wavefunction, from_numpy<cplx>(g, *psi0)) : gaussian_wavepacket(g);
          DynamicsResult r;
          {
            py::gil_scoped_release release;
            r = evolve(init, c);
          }
          py::dict d;
          d["psi"] = to_numpy<cplx>(g, r.psi.values);
          d["potential"] = to_numpy<double>(g, r.potential.values);
          d["steps"] = r.steps;
          std::vector<double> t, mass, e;
          for (const auto& s : r.trace.samples) {
            t.push_back(s.t);
            mass.push_back(s.mass);
            e.push_back(s.e_total);
          }
          d["t"] = t;
          d["mass"] = mass;
          d["energy"] = e;
          py::list snaps;
          for (const auto& s : r.snapshots) snaps.append(py::make_tuple(s.t, to_numpy<double>(g, s.density.values)));
          d["snapshots"] = snaps;
          return d;
        },
        py::arg("kernel"), py::arg("grid"), py::arg("psi0") = py::none(), py::arg("beta") = 0.0, py::arg("tau") = 1e-3,
        py::arg("t_end") = 0.0, py::arg("order") = 4, py::arg("method") = py::none(),
        py::arg("gamma") = std::vector<double>{1.0, 1.0, 1.0}, py::arg("trace_every") = 0,
        py::arg("snapshots") = std::vector<double>{}, py::arg("epsilon") = py::none(),
        "Time-splitting dynamics; psi0 defaults to exp(-|x|^2/2)");

  m.def("table_ids", &table_ids);
  m.def("table_title", &table_title, py::arg("id"));
  m.def("reproduce_table", [](int id, bool full, double tol) {
        TableOptions o;
        o.full = full;
        o.tol = tol;
        TableResult t;
        {
          py::gil_scoped_release release;
          t = reproduce_table(id, o);
        }
        py::list rows;
        for (const auto& c : t.cells) {
          py::dict r;
          r["block"] = c.block;
          r["row"] = c.row;
          r["column"] = c.column;
          r["value"] = c.value;
          r["target"] = c.target ? py::cast(*c.target) : py::none();
          r["method"] = c.method;
          r["kernel"] = c.kernel;
          r["L"] = c.L;
          r["h"] = c.h;
          r["N"] = c.N;
          r["tau"] = c.tau;
          r["reference"] = c.reference;
          r["status"] = c.status;
          r["seconds"] = c.seconds;
          rows.append(r);
        }
        return rows;
      }, py::arg("id"), py::arg("full") = false, py::arg("tol") = 1e-12, "Table cells as a list of dicts");
}
