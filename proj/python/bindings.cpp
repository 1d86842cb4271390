// Python bindings: configuration as {key: value} settings, arrays as NumPy.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <string>
#include <vector>

#include "symtop/error.hpp"
#include "symtop/experiments.hpp"
#include "symtop/io.hpp"
#include "symtop/thermal.hpp"
#include "symtop/version.hpp"

namespace py = pybind11;
using namespace symtop;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
    if (a.ndim() != 1) throw DomainError("expected a one-dimensional array");
    return {a.data(), static_cast<std::size_t>(a.shape(0))};
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

std::string as_text(const py::handle& v) {
    if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
    if (py::isinstance<py::float_>(v)) return io::format_number(v.cast<double>());
    return py::str(v).cast<std::string>();
}

SimulationConfig make_config(const py::dict& settings) {
    SimulationConfig c;
    for (const auto& [k, v] : settings) io::apply_setting(c, k.cast<std::string>(), as_text(v));
    c.validate();
    return c;
}

py::dict trace_dict(const OrientationTrace& t, const Signal& fid) {
    py::dict d;
    d["time_ps"] = to_array(t.time_ps);
    d["cos_theta"] = to_array(t.cos_theta);
    d["dcos_dt_per_ps"] = to_array(t.dcos_dt_per_ps);
    d["fid_kV_per_cm"] = to_array(fid.values);
    const auto& g = t.diagnostics;
    d["diagnostics"] = py::dict(py::arg("max_norm_drift") = g.max_norm_drift, py::arg("members") = g.members,
                                py::arg("blocks") = g.blocks, py::arg("steps") = g.steps,
                                py::arg("step_fs") = g.step_fs);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "THz-driven orientation and free-induction decay of symmetric-top molecules";
    m.attr("__version__") = std::string(kVersion);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
    py::register_exception<StepSizeError>(m, "StepSizeError", PyExc_RuntimeError);
    py::register_exception<DegenerateFitError>(m, "DegenerateFitError", PyExc_RuntimeError);

    m.def("config_keys", &io::config_keys);
    m.def("config_text", [](const py::dict& s) { return io::config_text(make_config(s)); }, py::arg("settings") = py::dict());
    m.def("parse_config", [](const std::string& text) { return io::config_text(io::parse_config(text)); },
          "Validates config text and returns it with every key filled in.");

    m.def("energy", [](int J, int K, const py::dict& s) { return energy(make_config(s).molecule.constants, J, K); },
          py::arg("J"), py::arg("K"), py::arg("settings") = py::dict(), "Rotational energy in cm^-1.");
    m.def("cos_theta_coupling", &cos_theta_coupling, py::arg("J"), py::arg("K"), py::arg("M"));
    m.def("cos_theta_diagonal", &cos_theta_diagonal, py::arg("J"), py::arg("K"), py::arg("M"));
    m.def("partition_function",
          [](const py::dict& s) {
              const auto c = make_config(s);
              return partition_function(c.molecule, c.ensemble);
          },
          py::arg("settings") = py::dict());
    m.def("echo_spacing", [](const py::dict& s) { return echo_spacing(make_config(s).molecule); },
          py::arg("settings") = py::dict(), "Echo period 1/(2 c B) in ps.");

    m.def("pulse_field",
          [](const Array& t, const py::dict& s) {
              const auto c = make_config(s);
              std::vector<double> out;
              for (double x : view(t)) out.push_back(field_at(c.pulse, x));
              return to_array(out);
          },
          py::arg("time_ps"), py::arg("settings") = py::dict(), "Incident field in kV/cm.");

    m.def("simulate",
          [](const py::dict& s, unsigned threads) {
              auto c = make_config(s);
              c.propagation.threads = threads;
              SimulationResult r;
              {
                  py::gil_scoped_release release;
                  r = run_simulation(c);
              }
              return trace_dict(r.trace, r.fid);
          },
          py::arg("settings") = py::dict(), py::arg("threads") = 0);

    m.def("scan",
          [](const std::string& parameter, const Array& values, const py::dict& s, bool derivative, unsigned threads) {
              auto c = make_config(s);
              c.propagation.threads = threads;
              ScanOptions opt;
              opt.use_derivative = derivative;
              const std::vector<double> v(view(values).begin(), view(values).end());
              std::string json;
              {
                  py::gil_scoped_release release;
                  if (parameter == "amplitude") {
                      json = io::scan_json(scan_amplitude(c, v, opt), "");
                  } else if (parameter == "tau") {
                      json = io::scan_json(scan_tau(c, v, opt), "");
                  } else {
                      throw ConfigError("scan parameter must be 'amplitude' or 'tau'");
                  }
              }
              return json;
          },
          py::arg("parameter"), py::arg("values"), py::arg("settings") = py::dict(), py::arg("derivative") = false,
          py::arg("threads") = 0, "Scan result as JSON text.");

    m.def("detect_revivals",
          [](const Array& t, const Array& v, double period, int n, double origin, double floor) {
              py::list out;
              for (const auto& r : detect_revivals(view(t), view(v), period, n, origin, floor)) {
                  out.append(py::dict(py::arg("index") = r.index, py::arg("found") = r.found,
                                      py::arg("time_ps") = r.time_ps, py::arg("magnitude") = r.magnitude));
              }
              return out;
          },
          py::arg("time_ps"), py::arg("values"), py::arg("period_ps"), py::arg("n"), py::arg("origin_ps") = 0.0,
          py::arg("noise_floor") = 0.0);

    m.def("fit_trace",
          [](const Array& mt, const Array& mv, const Array& dt, const Array& dv, bool shift, double max_shift) {
              Signal model{{view(mt).begin(), view(mt).end()}, {view(mv).begin(), view(mv).end()}};
              Signal data{{view(dt).begin(), view(dt).end()}, {view(dv).begin(), view(dv).end()}};
              FitOptions opt;
              opt.time_shift = shift;
              opt.max_shift_ps = max_shift;
              const FitResult r = fit_trace(model, data, opt);
              return py::dict(py::arg("scale") = r.scale, py::arg("offset") = r.offset,
                              py::arg("residual_rms") = r.residual_rms, py::arg("time_shift_ps") = r.time_shift_ps,
                              py::arg("samples") = r.samples);
          },
          py::arg("model_time_ps"), py::arg("model"), py::arg("data_time_ps"), py::arg("data"),
          py::arg("time_shift") = false, py::arg("max_shift_ps") = 2.0);

    m.def("spectral_derivative_check",
          [](const Array& t, const Array& c, const Array& d) {
              OrientationTrace tr;
              tr.time_ps.assign(view(t).begin(), view(t).end());
              tr.cos_theta.assign(view(c).begin(), view(c).end());
              tr.dcos_dt_per_ps.assign(view(d).begin(), view(d).end());
              const auto r = spectral_derivative_check(tr);
              return py::dict(py::arg("max_deviation") = r.max_deviation, py::arg("samples") = r.samples,
                              py::arg("dt_ps") = r.dt_ps, py::arg("endpoint_ratio") = r.endpoint_ratio);
          },
          py::arg("time_ps"), py::arg("cos_theta"), py::arg("dcos_dt_per_ps"));
}
