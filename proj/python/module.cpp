#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ghostlab/config.hpp"
#include "ghostlab/io.hpp"
#include "ghostlab/oracles.hpp"
#include "ghostlab/optics.hpp"
#include "ghostlab/scenarios.hpp"

namespace py = pybind11;
using namespace ghostlab;

namespace {

FieldGrid field_from_array(const py::array_t<Complex>& a, double pitch_x,
                           double pitch_y) {
  auto buf = a.request();
  FieldGrid f;
  if (buf.ndim == 1) {
    f = FieldGrid(int(buf.shape[0]), pitch_x);
  } else if (buf.ndim == 2) {
    f = FieldGrid(int(buf.shape[1]), int(buf.shape[0]), pitch_x, pitch_y);
  } else {
    throw std::invalid_argument("expected a 1D or 2D array");
  }
  auto r = a.unchecked();
  if (buf.ndim == 1)
    for (py::ssize_t i = 0; i < buf.shape[0]; ++i) f.values[std::size_t(i)] = r(i);
  else
    for (py::ssize_t y = 0; y < buf.shape[0]; ++y)
      for (py::ssize_t x = 0; x < buf.shape[1]; ++x)
        f.at(int(x), int(y)) = r(y, x);
  return f;
}

py::array_t<Complex> array_from_field(const FieldGrid& f) {
  if (f.dim() == 1) {
    py::array_t<Complex> out(f.nx());
    auto w = out.mutable_unchecked();
    for (int i = 0; i < f.nx(); ++i) w(i) = f.at(i);
    return out;
  }
  py::array_t<Complex> out({f.ny(), f.nx()});
  auto w = out.mutable_unchecked();
  for (int y = 0; y < f.ny(); ++y)
    for (int x = 0; x < f.nx(); ++x) w(y, x) = f.at(x, y);
  return out;
}

py::array_t<double> array_from_map(const IntensityGrid& g) {
  py::array_t<double> out({g.ny(), g.nx()});
  auto w = out.mutable_unchecked();
  for (int y = 0; y < g.ny(); ++y)
    for (int x = 0; x < g.nx(); ++x) w(y, x) = g.at(x, y);
  return out;
}

py::dict report_to_dict(const ScenarioReport& rep) {
  py::dict d;
  d["scenario"] = rep.scenario;
  d["seed"] = rep.seed;
  d["frames"] = rep.frames;
  d["all_pass"] = rep.all_pass();
  py::list metrics;
  for (const auto& m : rep.metrics) {
    py::dict e;
    e["name"] = m.name;
    e["value"] = m.value;
    e["checked"] = m.checked;
    if (m.checked) {
      e["tolerance"] = m.tolerance;
      e["pass"] = m.pass;
    }
    if (!m.note.empty()) e["note"] = m.note;
    metrics.append(e);
  }
  d["metrics"] = metrics;
  py::dict profiles;
  for (const auto& p : rep.profiles) {
    profiles[py::str(p.name)] =
        py::make_tuple(py::array_t<double>(py::ssize_t(p.x.size()), p.x.data()),
                       py::array_t<double>(py::ssize_t(p.y.size()), p.y.data()));
  }
  d["profiles"] = profiles;
  py::dict maps;
  for (const auto& m : rep.maps) maps[py::str(m.name)] = array_from_map(m.map);
  d["maps"] = maps;
  d["summary_json"] = summary_json(rep);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "pseudo-thermal ghost imaging/diffraction simulator";
  mod.attr("__version__") = kVersion;

  mod.def(
      "run_scenario",
      [](const std::string& config_text, py::object seed, py::object frames,
         py::object workers, py::object out_dir) {
        ExperimentConfig cfg = parse_config(config_text);
        if (!seed.is_none()) cfg.seed = seed.cast<std::uint64_t>();
        if (!frames.is_none()) cfg.frames = frames.cast<std::uint64_t>();
        if (!workers.is_none()) cfg.workers = workers.cast<int>();
        ScenarioReport rep = run_scenario(cfg);
        if (!out_dir.is_none()) write_outputs(rep, out_dir.cast<std::string>());
        return report_to_dict(rep);
      },
      py::arg("config_text"), py::arg("seed") = py::none(),
      py::arg("frames") = py::none(), py::arg("workers") = py::none(),
      py::arg("out_dir") = py::none(),
      "Parse a config, run its scenario and return metrics/profiles/maps.");

  mod.def(
      "validate_config",
      [](const std::string& text) {
        ExperimentConfig cfg = parse_config(text);
        py::dict d;
        for (const auto& [k, v] : cfg.echo()) d[py::str(k)] = v;
        return d;
      },
      py::arg("config_text"), "Parse a config and return its canonical echo.");

  mod.def("hash_seed", &hash_seed, py::arg("master_seed"), py::arg("counter"));
  mod.def("envelope_std_for_coherence_length", &envelope_std_for_coherence_length,
          py::arg("n"), py::arg("pitch"), py::arg("coherence_length"));

  mod.def(
      "dft_centered",
      [](const py::array_t<Complex>& a) {
        return array_from_field(dft_centered(field_from_array(a, 1.0, 1.0)));
      },
      py::arg("field"), "Centered unitary DFT (1D or 2D).");
  mod.def(
      "idft_centered",
      [](const py::array_t<Complex>& a) {
        return array_from_field(idft_centered(field_from_array(a, 1.0, 1.0)));
      },
      py::arg("field"));

  mod.def(
      "draw_thermal_field",
      [](int nx, int ny, double pitch, double envelope_std,
         double mean_intensity, std::uint64_t frame_seed) {
        SourceConfig c;
        c.nx = nx;
        c.ny = ny;
        c.pitch_x = pitch;
        c.pitch_y = ny > 1 ? pitch : 0.0;
        c.envelope_std = envelope_std;
        c.mean_intensity = mean_intensity;
        return array_from_field(draw_thermal_field(c, frame_seed));
      },
      py::arg("nx"), py::arg("ny"), py::arg("pitch"), py::arg("envelope_std"),
      py::arg("mean_intensity"), py::arg("frame_seed"),
      "One pseudo-thermal near-field speckle realization.");

  mod.def(
      "double_slit_mask",
      [](int nx, double pitch, double aperture, double needle) {
        TransmissionMask m = double_slit_mask(nx, 1, pitch, 1.0, aperture, needle);
        std::vector<double> v(m.values.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = m.values.values[i].real();
        return py::array_t<double>(py::ssize_t(v.size()), v.data());
      },
      py::arg("nx"), py::arg("pitch"), py::arg("aperture_width"),
      py::arg("needle_width"));

  mod.def(
      "fraunhofer_pattern",
      [](const py::array_t<double>& mask, double pitch, double wavelength,
         double focal) {
        auto r = mask.unchecked<1>();
        TransmissionMask m;
        m.values = FieldGrid(int(r.shape(0)), pitch);
        for (py::ssize_t i = 0; i < r.shape(0); ++i)
          m.values.values[std::size_t(i)] = Complex(r(i), 0.0);
        OracleProfile p = fraunhofer_pattern(m, wavelength, focal);
        return py::make_tuple(
            py::array_t<double>(py::ssize_t(p.axis.positions.size()),
                                p.axis.positions.data()),
            py::array_t<double>(py::ssize_t(p.values.size()), p.values.data()));
      },
      py::arg("mask"), py::arg("pitch"), py::arg("wavelength"), py::arg("focal"),
      "Coherent focal-plane intensity of a 1D mask, unit peak.");

  mod.def(
      "fit_gaussian_peak",
      [](const py::array_t<double>& x, const py::array_t<double>& y) {
        auto rx = x.unchecked<1>();
        auto ry = y.unchecked<1>();
        Profile p;
        for (py::ssize_t i = 0; i < rx.shape(0); ++i) {
          p.x.push_back(rx(i));
          p.y.push_back(ry(i));
        }
        PeakFit f = fit_gaussian_peak(p);
        py::dict d;
        d["has_peak"] = f.has_peak;
        d["baseline"] = f.baseline;
        d["amplitude"] = f.amplitude;
        d["sigma"] = f.sigma;
        d["coherence_length"] = f.coherence_length();
        return d;
      },
      py::arg("x"), py::arg("y"));

  mod.def(
      "fringe_period",
      [](const py::array_t<double>& x, const py::array_t<double>& y) {
        auto rx = x.unchecked<1>();
        auto ry = y.unchecked<1>();
        Profile p;
        for (py::ssize_t i = 0; i < rx.shape(0); ++i) {
          p.x.push_back(rx(i));
          p.y.push_back(ry(i));
        }
        return fringe_period(p);
      },
      py::arg("x"), py::arg("y"));
}
