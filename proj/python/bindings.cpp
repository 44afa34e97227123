#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stsdelay/baselines.hpp"
#include "stsdelay/harness.hpp"
#include "stsdelay/time_expectation.hpp"

namespace py = pybind11;
using namespace stsdelay;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Delay times through a narrowed waveguide: STS, phase-time and Buttiker-Landauer models";

  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  auto numeric = py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", numeric.ptr());
  (void)domain;

  m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;

  py::class_<QuadratureSpec>(m, "QuadratureSpec")
      .def(py::init<>())
      .def_readwrite("rel_tol", &QuadratureSpec::rel_tol)
      .def_readwrite("abs_tol", &QuadratureSpec::abs_tol)
      .def_readwrite("max_subdivisions", &QuadratureSpec::max_subdivisions)
      .def_readwrite("tail_fraction", &QuadratureSpec::tail_fraction)
      .def_readwrite("truncation_multiplier", &QuadratureSpec::truncation_multiplier)
      .def_readwrite("reality_tol", &QuadratureSpec::reality_tol);

  py::class_<GuideGeometry>(m, "GuideGeometry")
      .def(py::init<>())
      .def(py::init([](double b, double b_prime, double a, double a_prime, double length) {
             GuideGeometry g;
             g.b = b;
             g.b_prime = b_prime;
             g.a = a;
             g.a_prime = a_prime;
             g.length = length;
             return g;
           }),
           py::arg("b") = 0.02286, py::arg("b_prime") = 0.0158, py::arg("a") = 0.01016, py::arg("a_prime") = 0.0079,
           py::arg("length") = 0.15)
      .def_readwrite("b", &GuideGeometry::b)
      .def_readwrite("b_prime", &GuideGeometry::b_prime)
      .def_readwrite("a", &GuideGeometry::a)
      .def_readwrite("a_prime", &GuideGeometry::a_prime)
      .def_readwrite("length", &GuideGeometry::length)
      .def_readwrite("c", &GuideGeometry::c)
      .def("validate", &GuideGeometry::validate);

  py::class_<Cutoffs>(m, "Cutoffs")
      .def_readonly("nu_in", &Cutoffs::nu_in)
      .def_readonly("nu_out", &Cutoffs::nu_out)
      .def_readonly("c", &Cutoffs::c);
  m.def("cutoff_frequencies", &cutoff_frequencies, py::arg("geometry"));

  py::class_<OpticalTime>(m, "OpticalTime")
      .def_readonly("delay", &OpticalTime::delay)
      .def_readonly("raw_expected_time", &OpticalTime::raw_expected_time)
      .def_readonly("lineshape_time", &OpticalTime::lineshape_time)
      .def_readonly("imaginary_residue", &OpticalTime::imaginary_residue)
      .def_readonly("relative_residue", &OpticalTime::relative_residue)
      .def_readonly("denominator", &OpticalTime::denominator)
      .def_readonly("nu_max", &OpticalTime::nu_max);

  m.def(
      "optical_expected_time",
      [](double nu_mu, double lambda, const GuideGeometry& g, double ell, const QuadratureSpec& quad) {
        return optical_expected_time(SourceSpec{nu_mu, lambda, ell}, g, quad);
      },
      py::arg("nu_mu"), py::arg("lambda_"), py::arg("geometry"), py::arg("ell") = 0.0,
      py::arg("quad") = QuadratureSpec{}, "Line-averaged STS delay through the narrowing, SI units.");
  m.def("phase_time", &phase_time, py::arg("nu"), py::arg("geometry"));
  m.def("buttiker_landauer_time", &buttiker_landauer_time, py::arg("nu"), py::arg("geometry"));
  m.def(
      "group_velocity", [](double nu, const GuideGeometry& g) { return velocities(nu, cutoff_frequencies(g)).group; },
      py::arg("nu"), py::arg("geometry"));
  m.def(
      "phase_velocity", [](double nu, const GuideGeometry& g) { return velocities(nu, cutoff_frequencies(g)).phase; },
      py::arg("nu"), py::arg("geometry"));

  m.def("transmission_coefficient", &transmission_coefficient, py::arg("k"), py::arg("k1"), py::arg("length"));
  m.def(
      "transfer_matrix_transmission",
      [](double energy, double height, double length) {
        return transfer_matrix_transmission(energy, BarrierSpec{height, length, {}});
      },
      py::arg("energy"), py::arg("height"), py::arg("length"));
  m.def(
      "gaussian_expected_time",
      [](double k0, double sigma, double x, double t0) {
        return expected_time_closed(MomentumSpectrum::gaussian(k0, sigma).time_shifted(t0), x).value;
      },
      py::arg("k0"), py::arg("sigma"), py::arg("x"), py::arg("t0") = 0.0,
      "Mean detection time of a Gaussian packet in natural units.");

  py::enum_<Model>(m, "Model").value("sts", Model::sts).value("pt", Model::pt).value("bl", Model::bl);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("name", &ExperimentConfig::name)
      .def_readwrite("geometry", &ExperimentConfig::geometry)
      .def_readwrite("lambda_", &ExperimentConfig::lambda)
      .def_readwrite("ell", &ExperimentConfig::ell)
      .def_property(
          "sweep", [](const ExperimentConfig& c) { return py::make_tuple(c.sweep.start, c.sweep.stop, c.sweep.step); },
          [](ExperimentConfig& c, std::tuple<double, double, double> s) {
            c.sweep = {std::get<0>(s), std::get<1>(s), std::get<2>(s)};
          })
      .def_readwrite("models", &ExperimentConfig::models)
      .def_readwrite("quad", &ExperimentConfig::quad)
      .def_readwrite("baseline_averaging", &ExperimentConfig::baseline_averaging)
      .def_readwrite("baseline_subtraction", &ExperimentConfig::baseline_subtraction)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def("validate", &ExperimentConfig::validate);

  m.def("preset", &preset, py::arg("name"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("model_delay", &model_delay, py::arg("config"), py::arg("model"), py::arg("nu"));

  m.def(
      "residues",
      [](const std::vector<std::pair<double, double>>& points, const std::map<std::string, std::vector<double>>& fits) {
        DataSet data{"python", {}};
        for (const auto& [nu, y] : points) data.points.push_back({nu, y});
        std::vector<DelayCurve> curves;
        for (const auto& [name, values] : fits) {
          DelayCurve c{parse_models(name).at(0), {}};
          for (std::size_t i = 0; i < values.size(); ++i) {
            c.points.push_back({i < points.size() ? points[i].first : 0.0, values[i], PointStatus::ok, {}});
          }
          curves.push_back(std::move(c));
        }
        const auto rep = residues(data, curves);
        py::dict out;
        for (const auto& r : rep.models) out[model_name(r.model)] = py::make_tuple(r.delta_raw, r.delta_normalized);
        return out;
      },
      py::arg("points"), py::arg("fits"),
      "Residues of model values (seconds) against (nu, delay) points; returns {model: (delta_raw_ns, delta)}.");

  m.def(
      "run_scenario",
      [](const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& data, unsigned workers) {
        std::optional<DataFile> file;
        if (data) file = load_dataset(*data);
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(cfg, file, workers);
        }
        py::dict out;
        out["nu_in"] = r.cutoffs.nu_in;
        out["nu_out"] = r.cutoffs.nu_out;
        py::dict curves;
        for (const auto& c : r.curves) {
          py::list nus;
          py::list values;
          for (const auto& p : c.points) {
            nus.append(p.nu);
            values.append(p.status == PointStatus::infinite ? INFINITY
                          : p.status == PointStatus::failed ? NAN
                                                             : p.value);
          }
          curves[model_name(c.model)] = py::make_tuple(nus, values);
        }
        out["curves"] = curves;
        out["curves_csv"] = render_curves_csv(r);
        out["figure_svg"] = render_figure_svg(r, cfg);
        if (!r.reports.empty()) out["residues_csv"] = render_residues_csv(r);
        return out;
      },
      py::arg("config"), py::arg("data") = py::none(), py::arg("workers") = 0u);
}
