#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ringform/analysis.hpp"
#include "ringform/errors.hpp"
#include "ringform/experiment.hpp"
#include "ringform/linearization.hpp"

namespace py = pybind11;
using namespace ringform;

namespace {

using StateArray = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

SystemState to_state(const StateArray& a) {
  std::vector<Vec3> vs;
  vs.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) vs.emplace_back(a.row(i).transpose());
  for (const auto& v : vs) {
    if (!v.allFinite() || v.norm() < 1e-12) throw DomainError("agent vectors must be finite and nonzero");
  }
  return SystemState::from_vectors(vs);
}

StateArray to_array(const SystemState& s) {
  StateArray a(static_cast<Eigen::Index>(s.size()), 3);
  for (std::size_t i = 0; i < s.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = s[i].vec().transpose();
  return a;
}

ControlLaw parse_law(const std::string& name) {
  if (name == "repulsive") return ControlLaw::Repulsive;
  if (name == "consensus") return ControlLaw::Consensus;
  throw ConfigError("law must be 'repulsive' or 'consensus'");
}

InitConstraint parse_constraint(const std::string& name) {
  if (name == "none") return InitConstraint::None;
  if (name == "omega_e") return InitConstraint::InOmegaE;
  if (name == "omega_o") return InitConstraint::InOmegaO;
  if (name == "hemisphere") return InitConstraint::Hemisphere;
  throw ConfigError("constraint must be one of none, omega_e, omega_o, hemisphere");
}

SearchOptions search(std::size_t resolution, std::size_t angle_resolution) {
  SearchOptions o;
  o.resolution = resolution;
  o.angle_resolution = angle_resolution;
  return o;
}

py::dict spectrum_dict(const SpectrumReport& r) {
  py::dict d;
  d["matrix"] = r.matrix_name;
  d["eigenvalues"] = r.eigenvalues;
  d["n_zero"] = r.n_zero;
  d["n_negative"] = r.n_negative;
  d["n_positive"] = r.n_positive;
  d["verdict"] = to_string(r.verdict);
  return d;
}

py::object json_to_py(const app::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

app::Json py_to_json(const py::dict& d) {
  const std::string text = py::module_::import("json").attr("dumps")(d).cast<std::string>();
  return app::Json::parse(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reduced-attitude ring formations on the sphere";

  auto base = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SamplingError>(m, "SamplingError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  (void)base;

  m.def("random_state",
        [](std::size_t n, std::uint64_t seed, const std::string& constraint) {
          return to_array(random_state(n, seed, parse_constraint(constraint)));
        },
        py::arg("n"), py::arg("seed") = 1, py::arg("constraint") = "none",
        "Random unit vectors, shape (n, 3), optionally conditioned on a region.");

  m.def("from_angles",
        [](const std::vector<std::pair<double, double>>& psi_phi) {
          std::vector<SphereAngles> a;
          for (const auto& [psi, phi] : psi_phi) a.push_back({psi, phi});
          return to_array(SystemState::from_angles(a));
        },
        py::arg("psi_phi"));
  m.def("to_angles", [](const StateArray& s) {
    std::vector<std::pair<double, double>> out;
    for (const auto& a : to_state(s).angles()) out.emplace_back(a.psi, a.phi);
    return out;
  });

  m.def("control_omega",
        [](const StateArray& s, bool directed, const std::string& law) {
          const auto w = control_omega(to_state(s), RingGraph(s.rows(), directed), parse_law(law));
          StateArray out(s.rows(), 3);
          for (std::size_t i = 0; i < w.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = w[i].transpose();
          return out;
        },
        py::arg("state"), py::arg("directed") = false, py::arg("law") = "repulsive");

  m.def("min_edge_distance", [](const StateArray& s) { return min_edge_distance(to_state(s)); });
  m.def("lyapunov_v", [](const StateArray& s) { return lyapunov_v(to_state(s)); });
  m.def("dini_derivative",
        [](const StateArray& s, bool directed, double active_tol, const std::string& law) {
          return dini_derivative(to_state(s), RingGraph(s.rows(), directed), active_tol, parse_law(law));
        },
        py::arg("state"), py::arg("directed") = false, py::arg("active_tol") = 1e-9,
        py::arg("law") = "repulsive");

  m.def("antipodal_distance",
        [](const StateArray& s, std::size_t res, std::size_t ares) {
          return antipodal_distance(to_state(s), search(res, ares));
        },
        py::arg("state"), py::arg("resolution") = 4096, py::arg("angle_resolution") = 512);
  m.def("cyclic_distance",
        [](const StateArray& s, std::size_t res, std::size_t ares) {
          return cyclic_distance(to_state(s), search(res, ares));
        },
        py::arg("state"), py::arg("resolution") = 4096, py::arg("angle_resolution") = 512);

  m.def("classify_formation",
        [](const StateArray& s, bool directed, std::vector<double> omega_norms, double tol) {
          const auto c = classify_formation(to_state(s), RingGraph(s.rows(), directed), omega_norms, tol);
          return py::make_tuple(to_string(c.kind), c.residual);
        },
        py::arg("state"), py::arg("directed"), py::arg("omega_norms"), py::arg("tol") = 1e-3,
        "Returns (kind, residual).");

  m.def("check_bounds",
        [](const StateArray& s) {
          py::list out;
          for (const auto& r : check_bounds(to_state(s))) {
            py::dict d;
            d["name"] = r.name;
            d["applicable"] = r.applicable;
            d["lhs"] = r.lhs;
            d["rhs"] = r.rhs;
            d["slack"] = r.slack;
            d["holds"] = r.holds;
            d["nu"] = r.nu ? py::cast(*r.nu) : py::none();
            out.append(d);
          }
          return out;
        },
        py::arg("state"));

  m.def("jacobian_psi", [](const StateArray& s) {
    return jacobian_psi(to_state(s), RingGraph(s.rows(), false));
  });
  m.def("jacobian_phi", [](const StateArray& s) {
    return jacobian_phi(to_state(s), RingGraph(s.rows(), false));
  });
  m.def("symmetric_eigenvalues", [](const Matrix& a) { return symmetric_eigenvalues(a); });
  m.def("circulant_eigenvalues", &circulant_eigenvalues, py::arg("alpha"), py::arg("n"));
  m.def("equispaced_circle",
        [](std::size_t n, double alpha) {
          return to_array(make_equispaced_circle(n, alpha, Vec3::UnitZ(), Vec3::UnitX()));
        },
        py::arg("n"), py::arg("alpha"), "n agents on the equator, consecutive ones alpha apart.");

  m.def("classify_equilibrium",
        [](const StateArray& s, double zero_tol) {
          const auto r = classify_equilibrium(to_state(s), RingGraph(s.rows(), false), zero_tol);
          py::dict d;
          d["psi"] = spectrum_dict(r.psi);
          d["phi"] = spectrum_dict(r.phi);
          d["n_zero"] = r.n_zero;
          d["n_negative"] = r.n_negative;
          d["n_positive"] = r.n_positive;
          d["verdict"] = to_string(r.verdict);
          d["residual"] = r.residual;
          d["circle_axis"] = std::vector<double>{r.circle_axis.x(), r.circle_axis.y(), r.circle_axis.z()};
          return d;
        },
        py::arg("state"), py::arg("zero_tol") = 1e-8);

  m.def("simulate",
        [](const py::dict& config) {
          const auto spec = std::get<app::SimulateSpec>(app::parse_spec(app::Verb::Simulate, py_to_json(config)));
          Trajectory tr;
          {
            py::gil_scoped_release release;
            tr = simulate(spec.sim);
          }
          const auto n = static_cast<py::ssize_t>(spec.sim.n);
          const auto k = static_cast<py::ssize_t>(tr.size());
          py::array_t<double> states({k, n, py::ssize_t{3}});
          py::array_t<double> omega({k, n});
          auto sv = states.mutable_unchecked<3>();
          auto ov = omega.mutable_unchecked<2>();
          for (py::ssize_t t = 0; t < k; ++t) {
            for (py::ssize_t i = 0; i < n; ++i) {
              const auto& g = tr.states[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)].vec();
              for (py::ssize_t c = 0; c < 3; ++c) sv(t, i, c) = g(c);
              ov(t, i) = tr.omega_norms[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
            }
          }
          py::dict d;
          d["times"] = tr.times;
          d["states"] = states;
          d["W"] = tr.W;
          d["V"] = tr.V;
          d["omega_norms"] = omega;
          d["stop_reason"] = to_string(tr.stop_reason);
          d["steps"] = tr.steps;
          d["max_norm_drift"] = tr.max_norm_drift;
          const auto cls = classify_formation(tr.states.back(), RingGraph(spec.sim.n, spec.sim.directed),
                                              tr.omega_norms.back(), spec.classify_tol);
          d["formation"] = to_string(cls.kind);
          d["formation_residual"] = cls.residual;
          return d;
        },
        py::arg("config"),
        "Runs one simulation. `config` takes the same keys as the simulate config file.");

  m.def("run_experiment",
        [](const std::string& verb, const py::dict& config, const std::string& out_dir,
           std::optional<std::uint64_t> seed) {
          const auto spec = app::parse_spec(app::parse_verb(verb), py_to_json(config), seed);
          app::Json summary;
          {
            py::gil_scoped_release release;
            summary = app::run(spec, out_dir, nullptr);
          }
          return json_to_py(summary);
        },
        py::arg("verb"), py::arg("config"), py::arg("out_dir"), py::arg("seed") = py::none(),
        "Same as the command-line tool: writes outputs into out_dir, returns the summary.");
}
