#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "finjj/charge_hamiltonian.hpp"
#include "finjj/core_model.hpp"
#include "finjj/eigensolve.hpp"
#include "finjj/errors.hpp"
#include "finjj/observables.hpp"
#include "finjj/perturbation.hpp"
#include "finjj/sweep_table.hpp"
#include "finjj/wick.hpp"

namespace py = pybind11;
using namespace finjj;

namespace {

py::dict table_to_dict(const SweepTable& t) {
  py::dict columns;
  for (const auto& [name, values] : t.columns) columns[py::str(name)] = values;
  py::dict out;
  out["grid_name"] = t.grid_name;
  out["grid"] = t.grid;
  out["columns"] = columns;
  out["meta"] = py::module_::import("json").attr("loads")(t.meta.dump());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Josephson junction between finite superconducting islands";

  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const CapacityError& e) {
      PyErr_SetString(PyExc_MemoryError, e.what());
    } catch (const ConvergenceError& e) {
      convergence(e.what());
    }
  });

  py::class_<CircuitParams>(m, "CircuitParams")
      .def(py::init([](double e_j, double e_c, double n_g, std::int64_t pairs_total) {
             CircuitParams p{e_j, e_c, n_g, pairs_total};
             validate(p);
             return p;
           }),
           py::arg("e_j"), py::arg("e_c") = 1.0, py::arg("n_g") = 0.0, py::arg("pairs_total") = 2)
      .def_readwrite("e_j", &CircuitParams::e_j)
      .def_readwrite("e_c", &CircuitParams::e_c)
      .def_readwrite("n_g", &CircuitParams::n_g)
      .def_readwrite("pairs_total", &CircuitParams::pairs_total)
      .def_property_readonly("n_half", &CircuitParams::n_half)
      .def_property_readonly("dim", &CircuitParams::dim)
      .def("with_n_g", &CircuitParams::with_n_g, py::arg("n_g"))
      .def("__repr__", [](const CircuitParams& p) {
        return "CircuitParams(e_j=" + std::to_string(p.e_j) + ", e_c=" + std::to_string(p.e_c) +
               ", n_g=" + std::to_string(p.n_g) + ", pairs_total=" + std::to_string(p.pairs_total) + ")";
      });

  py::class_<BoseHubbardParams>(m, "BoseHubbardParams")
      .def(py::init<double, double, double, std::int64_t>(), py::arg("lam"), py::arg("mu"), py::arg("nu"),
           py::arg("pairs_total"))
      .def_readwrite("lam", &BoseHubbardParams::lambda)
      .def_readwrite("mu", &BoseHubbardParams::mu)
      .def_readwrite("nu", &BoseHubbardParams::nu)
      .def_readwrite("pairs_total", &BoseHubbardParams::pairs_total);
  m.def("map_bose_hubbard", &map_bose_hubbard, py::arg("bh"));
  m.def("map_to_bose_hubbard", &map_to_bose_hubbard, py::arg("params"));

  py::class_<WindowPolicy>(m, "WindowPolicy")
      .def_static("full", &WindowPolicy::full)
      .def_static("fixed", &WindowPolicy::fixed, py::arg("half_width"))
      .def_static("adaptive", &WindowPolicy::adaptive, py::arg("rtol") = 1e-9)
      .def_readwrite("half_width", &WindowPolicy::half_width)
      .def_readwrite("w_max", &WindowPolicy::w_max)
      .def_readwrite("rtol", &WindowPolicy::rtol)
      .def_readwrite("eig_tol", &WindowPolicy::eig_tol)
      .def_property_readonly("mode", [](const WindowPolicy& p) { return to_string(p.mode); });

  m.def(
      "hamiltonian",
      [](const CircuitParams& p) {
        const TridiagonalStorage s = build(p).materialize();
        return py::make_tuple(s.diagonal, s.off_diagonal);
      },
      py::arg("params"), "Diagonal and off-diagonal of the charge-basis Hamiltonian.");

  m.def(
      "eigenvalues",
      [](const CircuitParams& p, std::int64_t levels, const WindowPolicy& policy) {
        return solve_windowed(p, policy, levels, false).spectrum.values();
      },
      py::arg("params"), py::arg("levels") = 3, py::arg("policy") = WindowPolicy{},
      "Lowest band energies, ascending.");

  m.def(
      "dense_eigenvalues", [](const CircuitParams& p) { return dense_all(build(p), false).values(); },
      py::arg("params"), "Full spectrum from the dense reference solver.");

  m.def(
      "ground_state",
      [](const CircuitParams& p, double tol) {
        const EigenPair gs = ground_state(build(p), tol > 0.0 ? tol : default_eig_tol(p));
        return py::make_tuple(gs.value, *gs.vector);
      },
      py::arg("params"), py::arg("tol") = 0.0, "Ground energy and vector over the full charge basis.");

  m.def(
      "qubit_frequency",
      [](const CircuitParams& p, const WindowPolicy& policy) { return qubit_frequency(p, policy).value; },
      py::arg("params"), py::arg("policy") = WindowPolicy{});
  m.def(
      "expected_imbalance",
      [](const CircuitParams& p, const WindowPolicy& policy) { return expected_imbalance(p, policy).value; },
      py::arg("params"), py::arg("policy") = WindowPolicy{});
  m.def(
      "charge_susceptibility",
      [](const CircuitParams& p, const WindowPolicy& policy) {
        const Susceptibility x = charge_susceptibility(p, policy);
        py::dict out;
        out["value"] = x.value;
        out["error_estimate"] = x.error_estimate;
        out["hellmann_feynman_residual"] = x.hellmann_feynman_residual;
        out["imbalance"] = x.imbalance;
        return out;
      },
      py::arg("params"), py::arg("policy") = WindowPolicy{});

  m.def(
      "band_sweep",
      [](const CircuitParams& base, const std::vector<double>& grid, std::int64_t levels, bool imbalance,
         bool susceptibility, bool frequency, unsigned threads, const WindowPolicy& policy) {
        const SweepRequest req{levels, imbalance, susceptibility, frequency, threads};
        return table_to_dict(band_sweep(base, grid, req, policy));
      },
      py::arg("base"), py::arg("grid"), py::arg("levels") = 3, py::arg("imbalance") = false,
      py::arg("susceptibility") = false, py::arg("frequency") = false, py::arg("threads") = 0,
      py::arg("policy") = WindowPolicy{});

  py::class_<Curvature>(m, "Curvature")
      .def_readonly("value", &Curvature::value)
      .def_readonly("richardson", &Curvature::richardson)
      .def_readonly("disagreement", &Curvature::disagreement)
      .def_readonly("analytic", &Curvature::analytic)
      .def_readonly("step", &Curvature::step)
      .def_readonly("warnings", &Curvature::warnings)
      .def_property_readonly("ratio", &Curvature::ratio);
  m.def("dispersion_curvature", &dispersion_curvature, py::arg("params"), py::arg("policy") = WindowPolicy{},
        py::arg("step") = default_curvature_step);
  m.def("susceptibility_curvature", &susceptibility_curvature, py::arg("params"),
        py::arg("policy") = WindowPolicy{}, py::arg("step") = default_curvature_step);

  // Closed forms return (value, warnings).
  const auto analytic = [&m](const char* name, AnalyticValue (*f)(const CircuitParams&)) {
    m.def(
        name,
        [f](const CircuitParams& p) {
          const AnalyticValue v = f(p);
          return py::make_tuple(v.value, v.warnings);
        },
        py::arg("params"));
  };
  analytic("cpb_gap", &cpb_gap);
  analytic("cpb_susceptibility", &cpb_susceptibility);
  analytic("transmon_frequency", &transmon_frequency);
  analytic("transmon_susceptibility", &transmon_susceptibility);
  m.def("is_degeneracy_point", &is_degeneracy_point, py::arg("params"));

  py::class_<wick::BogoliubovCoeffs>(m, "BogoliubovCoeffs")
      .def(py::init<double, double, double, double>(), py::arg("u_plus") = 1.0, py::arg("u_minus") = 0.0,
           py::arg("u_0") = 0.0, py::arg("epsilon") = 0.0)
      .def_readwrite("u_plus", &wick::BogoliubovCoeffs::u_plus)
      .def_readwrite("u_minus", &wick::BogoliubovCoeffs::u_minus)
      .def_readwrite("u_0", &wick::BogoliubovCoeffs::u_0)
      .def_readwrite("epsilon", &wick::BogoliubovCoeffs::epsilon);
  m.def("bogoliubov", &bogoliubov, py::arg("params"));
  m.def(
      "transmon_first_order",
      [](const CircuitParams& p) {
        const FirstOrderTransmon f = transmon_first_order_numeric(p);
        py::dict out;
        out["freq"] = f.freq;
        out["imbalance"] = f.imbalance;
        out["coeffs"] = f.coeffs;
        out["warnings"] = f.warnings;
        return out;
      },
      py::arg("params"));

  py::class_<MaterialProps>(m, "MaterialProps")
      .def_readonly("name", &MaterialProps::name)
      .def_readonly("gap", &MaterialProps::gap)
      .def_readonly("fermi_energy", &MaterialProps::fermi_energy)
      .def_readonly("electron_density", &MaterialProps::electron_density)
      .def_readonly("london_depth", &MaterialProps::london_depth);
  m.def("aluminum", &aluminum);
  m.def("load_materials", [](const std::string& path) { return load_materials(path); }, py::arg("path"));
  m.def("cooper_pair_density", &cooper_pair_density, py::arg("material"));
  m.def(
      "validity",
      [](const MaterialProps& mat, double n_half, double n_g, double gate_mv) {
        const ValidityReport r = validity_report(mat, n_half, n_g, capacitance_per_pair_volt(gate_mv * 1e-3));
        py::dict out;
        out["n_min"] = r.n_min;
        out["n_s"] = r.n_s;
        out["island_volume"] = *r.island_volume;
        out["gate_voltage"] = *r.gate_voltage;
        return out;
      },
      py::arg("material"), py::arg("n_half") = 2.5e8, py::arg("n_g") = 1e6, py::arg("gate_mv") = 1.0);

  py::module_ w = m.def_submodule("wick", "Normal ordering of single-mode ladder polynomials");
  py::class_<wick::OperatorPoly>(w, "OperatorPoly")
      .def(py::init<>())
      .def_static("scalar", &wick::OperatorPoly::scalar, py::arg("c"))
      .def_static("lower", &wick::OperatorPoly::lower)
      .def_static("raise_", &wick::OperatorPoly::raise)
      .def_property_readonly("degree", &wick::OperatorPoly::degree)
      .def("__len__", &wick::OperatorPoly::size)
      .def("adjoint", &wick::OperatorPoly::adjoint)
      .def("terms",
           [](const wick::OperatorPoly& p) {
             py::list out;
             for (const auto& [word, c] : p.terms()) {
               std::string s;
               for (wick::Ladder l : word.symbols) s += l == wick::Ladder::raise ? '+' : '-';
               out.append(py::make_tuple(s, c));
             }
             return out;
           },
           "(word, coefficient) pairs; a word spells raise as '+' and lower as '-'.")
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self * wick::Complex())
      .def(wick::Complex() * py::self)
      .def(-py::self)
      .def(py::self == py::self)
      .def("__pow__", [](const wick::OperatorPoly& p, int e) { return wick::power(p, e); })
      .def("__str__", [](const wick::OperatorPoly& p) { return wick::to_string(p); });
  w.def("position", &wick::position);
  w.def("momentum", &wick::momentum);
  w.def("number", &wick::number);
  w.def("normal_order", [](const wick::OperatorPoly& p) { return wick::normal_order(p); }, py::arg("p"));
  w.def("vacuum_expectation", [](const wick::OperatorPoly& p) { return wick::vacuum_expectation(p); },
        py::arg("p"));
  w.def("substitute_affine", [](const wick::OperatorPoly& p, const wick::BogoliubovCoeffs& c) {
    return wick::substitute_affine(p, c);
  }, py::arg("p"), py::arg("coeffs"));
  w.def("fock_oracle", &wick::fock_oracle, py::arg("p"), py::arg("dim"));
  w.def(
      "random_polynomial",
      [](std::uint64_t seed, int max_degree, int max_terms, double max_abs) {
        std::mt19937_64 rng(seed);
        return wick::random_polynomial(rng, {max_degree, max_terms, max_abs});
      },
      py::arg("seed"), py::arg("max_degree") = 6, py::arg("max_terms") = 6, py::arg("max_abs") = 1.0);
}
