#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tgq/observables.hpp"
#include "tgq/oracle.hpp"
#include "tgq/quench_dynamics.hpp"
#include "tgq/special_functions.hpp"

namespace py = pybind11;
using tgq::Complex;

namespace {

tgq::SummationControl make_control(std::size_t max_terms, double abs_tol,
                                   std::size_t stall_window) {
  tgq::SummationControl ctrl;
  ctrl.max_terms = max_terms;
  ctrl.abs_tol = abs_tol;
  ctrl.stall_window = stall_window;
  return ctrl;
}

tgq::QuenchDirection parse_direction(const std::string& direction) {
  if (direction == "forward") return tgq::QuenchDirection::forward;
  if (direction == "reverse") return tgq::QuenchDirection::reverse;
  throw std::invalid_argument("direction must be 'forward' or 'reverse'");
}

py::dict evolved_sdm(const std::string& direction, double t, double grid_L, int grid_N) {
  const bool forward = parse_direction(direction) == tgq::QuenchDirection::forward;
  const tgq::GridSpec grid{grid_L, grid_N};
  const tgq::RelativeFn rel =
      forward ? tgq::RelativeFn([t](double z) { return tgq::psi0_closed(z, t); })
              : tgq::RelativeFn([t](double z) { return tgq::phi0_closed(z, t); });
  const auto xi = tgq::lab_frame_state(
      rel, t, grid, forward ? tgq::TailModel::forward_quench : tgq::TailModel::reverse_quench);
  const auto rho = tgq::sdm_build(xi, grid);
  const auto dec = tgq::natural_orbitals(rho);

  const auto zv = grid.coords();
  py::array_t<double> z(static_cast<py::ssize_t>(zv.size()));
  std::copy(zv.begin(), zv.end(), z.mutable_data());
  py::array_t<Complex> values({grid.points, grid.points});
  for (int i = 0; i < grid.points; ++i)
    for (int j = 0; j < grid.points; ++j)
      values.mutable_at(i, j) = rho.values(i, j);
  py::array_t<double> populations(static_cast<py::ssize_t>(dec.populations.size()));
  std::copy(dec.populations.begin(), dec.populations.end(), populations.mutable_data());

  py::dict out;
  out["z"] = std::move(z);
  out["rho"] = std::move(values);
  out["populations"] = std::move(populations);
  out["trace_estimate"] = rho.trace_estimate;
  out["tail_estimate"] = rho.tail_estimate;
  return out;
}

py::dict evolved_momentum(const std::string& direction, double t, double grid_L, int grid_N,
                          double k_max, int points) {
  const bool forward = parse_direction(direction) == tgq::QuenchDirection::forward;
  const tgq::GridSpec grid{grid_L, grid_N};
  const tgq::RelativeFn rel =
      forward ? tgq::RelativeFn([t](double z) { return tgq::psi0_closed(z, t); })
              : tgq::RelativeFn([t](double z) { return tgq::phi0_closed(z, t); });
  const auto xi = tgq::lab_frame_state(
      rel, t, grid, forward ? tgq::TailModel::forward_quench : tgq::TailModel::reverse_quench);
  const auto nk = tgq::momentum_distribution(tgq::natural_orbitals(tgq::sdm_build(xi, grid)),
                                             k_max, points);
  py::array_t<double> k(static_cast<py::ssize_t>(nk.k.size()));
  std::copy(nk.k.begin(), nk.k.end(), k.mutable_data());
  py::array_t<double> n(static_cast<py::ssize_t>(nk.values.size()));
  std::copy(nk.values.begin(), nk.values.end(), n.mutable_data());
  py::dict out;
  out["k"] = std::move(k);
  out["n"] = std::move(n);
  out["normalization_estimate"] = nk.normalization_estimate;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact dynamics of two trapped bosons after interaction quenches between "
            "the noninteracting and Tonks-Girardeau regimes";

  m.def("psi", py::vectorize([](int n, double z) { return tgq::psi_eval(n, z); }),
        py::arg("n"), py::arg("z"), "harmonic oscillator eigenfunction psi_n(z)");
  m.def("phi", py::vectorize([](int n, double z) { return tgq::phi_eval(n, z); }),
        py::arg("n"), py::arg("z"), "Tonks-Girardeau eigenfunction phi_n(z)");
  m.def("psi_energy", &tgq::psi_energy, py::arg("n"));
  m.def("phi_energy", &tgq::phi_energy, py::arg("n"));

  m.def("overlap_cmn", py::vectorize(&tgq::overlap_cmn), py::arg("m"), py::arg("n"),
        "overlap coefficient <phi_2n|psi_2m>");
  m.def("double_factorial", &tgq::double_factorial, py::arg("n"));
  m.def("hermite", py::vectorize(&tgq::hermite), py::arg("n"), py::arg("x"));
  m.def("erf", [](Complex w) { return tgq::erf_complex(w); }, py::arg("w"),
        "error function of a complex argument");
  m.def("mehler_kernel", &tgq::mehler_kernel, py::arg("x"), py::arg("y"), py::arg("u"));
  m.def(
      "hyp3f2",
      [](std::array<double, 3> a, std::array<double, 2> b, Complex x, std::size_t max_terms,
         double abs_tol, std::size_t stall_window) {
        const auto r = tgq::hyp3f2_series(a, b, x, make_control(max_terms, abs_tol, stall_window));
        return py::make_tuple(r.value, r.stats.terms, r.stats.achieved_tol);
      },
      py::arg("a"), py::arg("b"), py::arg("x"), py::arg("max_terms") = 2000000,
      py::arg("abs_tol") = 1e-10, py::arg("stall_window") = 6,
      "3F2 series value with (terms, achieved_tol)");

  m.def("psi0_closed", py::vectorize([](double z, double t) { return tgq::psi0_closed(z, t); }),
        py::arg("z"), py::arg("t"), "closed-form evolved ground state, quench 0 -> inf");
  m.def("phi0_closed", py::vectorize([](double z, double t) { return tgq::phi0_closed(z, t); }),
        py::arg("z"), py::arg("t"), "closed-form evolved ground state, quench inf -> 0");
  m.def(
      "psi_series",
      [](int m, double z, double t) { return tgq::psi_m_series(m, z, t).value; },
      py::arg("m"), py::arg("z"), py::arg("t"));
  m.def(
      "phi_series",
      [](int m, double z, double t) { return tgq::phi_m_series(m, z, t).value; },
      py::arg("m"), py::arg("z"), py::arg("t"));

  m.def(
      "loschmidt_forward",
      [](int m, double t) {
        const auto r = tgq::loschmidt_forward(m, t);
        return py::make_tuple(r.overlap, r.magnitude, r.echo);
      },
      py::arg("m"), py::arg("t"), "(L, |L|, |L|^2) for the 0 -> inf quench");
  m.def(
      "loschmidt_reverse",
      [](int m, double t) {
        const auto r = tgq::loschmidt_reverse(m, t);
        return py::make_tuple(r.overlap, r.magnitude, r.echo);
      },
      py::arg("m"), py::arg("t"), "(L, |L|, |L|^2) for the inf -> 0 quench");
  m.def(
      "double_quench_overlap",
      [](const std::string& direction, int m, double t1, double t) {
        tgq::QuenchScenario sc;
        sc.direction = parse_direction(direction);
        sc.initial_index = m;
        sc.second_quench_time = t1;
        return tgq::double_quench_overlap(sc, t);
      },
      py::arg("direction"), py::arg("m"), py::arg("t1"), py::arg("t"));
  m.def(
      "verify_derivative_relation",
      [](int m, double z, double t, double h) {
        return tgq::verify_derivative_relation(m, z, t, h);
      },
      py::arg("m"), py::arg("z"), py::arg("t"), py::arg("h"));

  py::class_<tgq::SummationControl>(m, "SummationControl")
      .def(py::init<>())
      .def_readwrite("max_terms", &tgq::SummationControl::max_terms)
      .def_readwrite("abs_tol", &tgq::SummationControl::abs_tol)
      .def_readwrite("stall_window", &tgq::SummationControl::stall_window);

  m.def("evolved_sdm", &evolved_sdm, py::arg("direction"), py::arg("t"),
        py::arg("grid_L") = 12.0, py::arg("grid_N") = 512,
        "dict with z, rho, populations, trace_estimate, tail_estimate");
  m.def("evolved_momentum", &evolved_momentum, py::arg("direction"), py::arg("t"),
        py::arg("grid_L") = 12.0, py::arg("grid_N") = 512, py::arg("k_max") = 12.0,
        py::arg("points") = 1024, "dict with k, n, normalization_estimate");

  m.def(
      "reference_momentum",
      [](const std::string& name, double grid_L, int grid_N, double k_max, int points) {
        const auto nk = tgq::reference_momentum(name, tgq::GridSpec{grid_L, grid_N}, k_max, points);
        py::array_t<double> k(static_cast<py::ssize_t>(nk.k.size()));
        std::copy(nk.k.begin(), nk.k.end(), k.mutable_data());
        py::array_t<double> n(static_cast<py::ssize_t>(nk.values.size()));
        std::copy(nk.values.begin(), nk.values.end(), n.mutable_data());
        return py::make_tuple(k, n);
      },
      py::arg("name"), py::arg("grid_L") = 12.0, py::arg("grid_N") = 512, py::arg("k_max") = 12.0,
      py::arg("points") = 1024);

  m.def(
      "truncated_propagate",
      [](const std::string& initial_basis, int index, const std::string& final_basis, int n_states,
         double t, py::array_t<double> z) {
        const auto to_basis = [](const std::string& s) {
          if (s == "noninteracting") return tgq::Basis::noninteracting;
          if (s == "tonks_girardeau") return tgq::Basis::tonks_girardeau;
          throw std::invalid_argument("basis must be noninteracting or tonks_girardeau");
        };
        const auto prop = tgq::truncated_propagate({to_basis(initial_basis), index},
                                                   to_basis(final_basis), n_states, t);
        std::vector<double> zv(z.data(), z.data() + z.size());
        const auto vals = prop.evaluate_many(zv);
        py::array_t<Complex> out(static_cast<py::ssize_t>(vals.size()));
        std::copy(vals.begin(), vals.end(), out.mutable_data());
        return py::make_tuple(out, prop.unitarity_defect);
      },
      py::arg("initial_basis"), py::arg("index"), py::arg("final_basis"), py::arg("n_states"),
      py::arg("t"), py::arg("z"), "truncated-eigenbasis oracle propagation on a grid");
}
