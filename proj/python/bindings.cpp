#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resavg/cli.hpp"
#include "resavg/diffusion.hpp"
#include "resavg/error.hpp"
#include "resavg/experiments.hpp"
#include "resavg/io.hpp"

namespace py = pybind11;
using namespace resavg;

namespace {

py::object to_python(const Json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

Json from_python(const py::object& obj) {
  return Json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::dict trajectory_dict(const Trajectory& t) {
  CMat states(t.size(), t.size() ? t.states.front().size() : 0);
  RMat acts(states.rows(), states.cols());
  for (std::size_t j = 0; j < t.size(); ++j) {
    states.row(j) = t.states[j].transpose();
    acts.row(j) = t.actions[j].transpose();
  }
  py::dict d;
  d["tau"] = t.tau;
  d["states"] = states;
  d["actions"] = acts;
  d["system"] = t.meta.system;
  d["scheme"] = t.meta.scheme;
  d["epsilon"] = t.meta.epsilon;
  d["seed"] = t.meta.seed;
  d["steps"] = t.meta.steps;
  d["step"] = t.meta.step;
  d["disparity"] = t.disparity ? py::cast(*t.disparity) : py::none();
  return d;
}

TorusGeometry make_geometry(int dim, std::vector<double> lengths, int grid) {
  TorusGeometry g;
  g.dim = dim;
  if (lengths.empty()) lengths.assign(dim, kTwoPi);
  if (static_cast<int>(lengths.size()) != dim) throw ConfigError("lengths must have one entry per axis");
  for (int i = 0; i < dim; ++i) g.lengths[i] = lengths[i];
  g.grid = grid;
  g.validate();
  return g;
}

}  // namespace

PYBIND11_MODULE(_resavg, m) {
  m.doc() = "Resonant averaging of weakly nonlinear CGL equations on tori";
  m.attr("__version__") = RESAVG_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  py::class_<SpectralFrame, std::shared_ptr<SpectralFrame>>(m, "SpectralFrame")
      .def_property_readonly("modes", &SpectralFrame::modes)
      .def_property_readonly("cutoff", &SpectralFrame::cutoff)
      .def_property_readonly("plane_waves", &SpectralFrame::plane_waves)
      .def_property_readonly("lambda_", &SpectralFrame::lambda)
      .def_property_readonly("psi", &SpectralFrame::psi)
      .def_property_readonly("lambda_max", &SpectralFrame::lambda_max)
      .def("to_json", [](const SpectralFrame& f) { return to_python(frame_to_json(f)); })
      .def("__repr__", [](const SpectralFrame& f) {
        std::ostringstream s;
        s << "<SpectralFrame modes=" << f.modes() << " cutoff=" << f.cutoff() << ">";
        return s.str();
      });

  m.def(
      "build_frame",
      [](int modes, int dim, std::vector<double> lengths, int grid, std::optional<int> cutoff,
         const py::object& potential) {
        const TorusGeometry g = make_geometry(dim, std::move(lengths), grid);
        Potential v;
        if (!potential.is_none()) v = potential_from_json(from_python(potential));
        return std::make_shared<SpectralFrame>(build_frame(g, v, modes, cutoff));
      },
      py::arg("modes"), py::arg("dim") = 1, py::arg("lengths") = std::vector<double>{}, py::arg("grid") = 32,
      py::arg("cutoff") = py::none(), py::arg("potential") = py::none(),
      "Lowest `modes` eigenpairs of -Laplacian + V; potential is a list of {m, re, im}.");
  m.def("frame_hash", [](const SpectralFrame& f) { return frame_hash(f); });

  py::class_<NonlinearitySpec>(m, "NonlinearitySpec")
      .def_static("cubic", &NonlinearitySpec::cubic_focusing_nls, py::arg("mu") = 0.0)
      .def_static("diagonal", &NonlinearitySpec::diagonal_field, py::arg("gamma"), py::arg("mu") = 0.0)
      .def_static("smoothed", &NonlinearitySpec::smoothed, py::arg("gamma_r"), py::arg("gamma_i"), py::arg("p"),
                  py::arg("q"), py::arg("mu"))
      .def_readwrite("mu", &NonlinearitySpec::mu)
      .def_property_readonly("kind", [](const NonlinearitySpec& s) { return to_string(s.kind); })
      .def_property_readonly("degree", &NonlinearitySpec::degree);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](double horizon, double step, double theta_osc, const std::string& scheme, int samples,
                       int record_stride, double s_star) {
             SolverConfig c;
             c.horizon = horizon;
             c.step = step;
             c.theta_osc = theta_osc;
             c.scheme = scheme_from_string(scheme);
             c.samples = samples;
             c.record_stride = record_stride;
             c.s_star = s_star;
             c.validate();
             return c;
           }),
           py::arg("horizon") = 1.0, py::arg("step") = 1e-3, py::arg("theta_osc") = 0.2,
           py::arg("scheme") = "lawson4", py::arg("samples") = 0, py::arg("record_stride") = 1,
           py::arg("s_star") = 2.0)
      .def_readwrite("horizon", &SolverConfig::horizon)
      .def_readwrite("step", &SolverConfig::step)
      .def_readwrite("samples", &SolverConfig::samples);

  m.def("sobolev_norm", py::overload_cast<const CVec&, double, const RVec&>(&sobolev_norm), py::arg("v"),
        py::arg("s"), py::arg("lambda_"));
  m.def("actions", &actions);
  m.def("action_distance", &action_distance, py::arg("I"), py::arg("J"), py::arg("s"), py::arg("lambda_"));
  m.def("smoothed_power", &smoothed_power);

  m.def("eval_P", &eval_P, py::arg("v"), py::arg("spec"), py::arg("frame"));
  m.def("eval_Y", &eval_Y, py::arg("a"), py::arg("t"), py::arg("spec"), py::arg("frame"));
  m.def("effective_drift_analytic", &effective_drift_analytic, py::arg("v"), py::arg("spec"), py::arg("frame"),
        py::arg("eta") = kDefaultEtaRes);
  m.def(
      "effective_drift_numerical",
      [](const CVec& v, const NonlinearitySpec& spec, const SpectralFrame& frame, std::optional<double> t_avg,
         std::optional<int> n_quad, double s1) {
        const double t = t_avg.value_or(default_averaging_window(frame, spec));
        const int n = n_quad.value_or(default_quadrature_nodes(frame, spec, t));
        const NumericalDrift d = effective_drift_numerical(v, spec, frame, t, n, s1);
        return py::make_tuple(d.drift, d.residual ? py::cast(*d.residual) : py::none());
      },
      py::arg("v"), py::arg("spec"), py::arg("frame"), py::arg("t_avg") = py::none(), py::arg("n_quad") = py::none(),
      py::arg("s1") = 1.0, "Returns (drift, residual against the analytic route or None).");
  m.def(
      "resonance_table",
      [](const SpectralFrame& frame, std::vector<int> pattern, double eta) {
        return to_python(resonance_table_to_json(build_resonance_table(frame, std::move(pattern), eta)));
      },
      py::arg("frame"), py::arg("pattern") = std::vector<int>{1, -1, 1}, py::arg("eta") = kDefaultEtaRes);
  m.def(
      "build_diffusion",
      [](const SpectralFrame& frame, const RVec& b, double eta) {
        const DiffusionSpec d = build_diffusion(frame, b, eigenvalue_clusters(frame.lambda(), eta));
        return py::make_tuple(d.A, d.B);
      },
      py::arg("frame"), py::arg("amplitudes"), py::arg("eta") = kDefaultEtaRes, "Returns (A, B).");

  m.def(
      "integrate_full",
      [](const CVec& v0, double epsilon, const SolverConfig& cfg, const NonlinearitySpec& spec,
         std::shared_ptr<SpectralFrame> frame, bool disparity) {
        const PerturbationField field(frame, spec);
        std::optional<EffectiveField> drift;
        if (disparity) drift.emplace(EffectiveField::analytic(frame, spec));
        return trajectory_dict(integrate_full(v0, epsilon, cfg, field, drift ? &*drift : nullptr));
      },
      py::arg("v0"), py::arg("epsilon"), py::arg("cfg"), py::arg("spec"), py::arg("frame"),
      py::arg("disparity") = false);
  m.def(
      "integrate_effective",
      [](const CVec& v0, const SolverConfig& cfg, const NonlinearitySpec& spec, std::shared_ptr<SpectralFrame> frame) {
        return trajectory_dict(integrate_effective(v0, cfg, EffectiveField::analytic(frame, spec)));
      },
      py::arg("v0"), py::arg("cfg"), py::arg("spec"), py::arg("frame"));
  m.def(
      "integrate_full_stochastic",
      [](const CVec& v0, double epsilon, const SolverConfig& cfg, const NonlinearitySpec& spec,
         std::shared_ptr<SpectralFrame> frame, const RVec& amplitudes, std::uint64_t seed) {
        const PerturbationField field(frame, spec);
        return trajectory_dict(integrate_full_stochastic(v0, epsilon, cfg, field, NoiseModel{amplitudes, seed}));
      },
      py::arg("v0"), py::arg("epsilon"), py::arg("cfg"), py::arg("spec"), py::arg("frame"), py::arg("amplitudes"),
      py::arg("seed"));
  m.def(
      "integrate_effective_stochastic",
      [](const CVec& v0, const SolverConfig& cfg, const NonlinearitySpec& spec, std::shared_ptr<SpectralFrame> frame,
         const RVec& amplitudes, std::uint64_t seed) {
        const DiffusionSpec d = build_diffusion(*frame, amplitudes, eigenvalue_clusters(frame->lambda(), kDefaultEtaRes));
        return trajectory_dict(
            integrate_effective_stochastic(v0, cfg, EffectiveField::analytic(frame, spec), d, seed));
      },
      py::arg("v0"), py::arg("cfg"), py::arg("spec"), py::arg("frame"), py::arg("amplitudes"), py::arg("seed"));

  m.def(
      "run_study",
      [](const py::object& config) {
        RunConfig cfg = parse_config(from_python(config));
        const StudyReport report = [&] {
          py::gil_scoped_release release;
          return run_study(cfg);
        }();
        return to_python(report.to_json());
      },
      py::arg("config"), "Runs the study described by a configuration dict and returns the report.");
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
