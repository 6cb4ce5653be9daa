#include "ghostlab/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ghostlab {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("config: " + msg);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "malformed number '" + v + "'");
    return d;
  } catch (const std::invalid_argument&) {
    fail(line, "malformed number '" + v + "'");
  } catch (const std::out_of_range&) {
    fail(line, "number out of range '" + v + "'");
  }
}

/// Number with optional um/mm/m suffix, normalized to meters.
double parse_length(const std::string& v, int line) {
  double scale = 1.0;
  std::string num = v;
  auto ends_with = [&](const char* suf) {
    std::size_t n = std::string(suf).size();
    return v.size() > n && v.compare(v.size() - n, n, suf) == 0;
  };
  if (ends_with("um")) {
    scale = 1e-6;
    num = trim(v.substr(0, v.size() - 2));
  } else if (ends_with("mm")) {
    scale = 1e-3;
    num = trim(v.substr(0, v.size() - 2));
  } else if (ends_with("m")) {
    scale = 1.0;
    num = trim(v.substr(0, v.size() - 1));
  } else if (!v.empty() && std::isalpha(static_cast<unsigned char>(v.back()))) {
    fail(line, "bad unit in '" + v + "' (expected um, mm or m)");
  }
  return scale * parse_double(num, line);
}

std::int64_t parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) fail(line, "malformed integer '" + v + "'");
    return i;
  } catch (const std::invalid_argument&) {
    fail(line, "malformed integer '" + v + "'");
  } catch (const std::out_of_range&) {
    fail(line, "integer out of range '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line) {
  std::int64_t i = parse_int(v, line);
  if (i < 0) fail(line, "value must be non-negative: '" + v + "'");
  return std::uint64_t(i);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::characterization: return "characterization";
    case Scenario::ghost_diffraction: return "ghost_diffraction";
    case Scenario::ghost_image: return "ghost_image";
    case Scenario::coherence_sweep: return "coherence_sweep";
    case Scenario::visibility_sweep: return "visibility_sweep";
  }
  return "?";
}

std::string object_name(ObjectKind k) {
  switch (k) {
    case ObjectKind::none: return "none";
    case ObjectKind::double_slit: return "double_slit";
    case ObjectKind::bitmap: return "bitmap";
    case ObjectKind::phase_grating: return "phase_grating";
  }
  return "?";
}

double ExperimentConfig::envelope_std_effective() const {
  if (envelope_std > 0.0) return envelope_std;
  return envelope_std_for_coherence_length(sites, pitch, coherence_near);
}

double ExperimentConfig::diaphragm_effective() const {
  if (diaphragm > 0.0) return diaphragm;
  return wavelength * focal / coherence_far;
}

double ExperimentConfig::coherence_near_effective() const {
  if (coherence_near > 0.0) return coherence_near;
  // inverse of envelope_std_for_coherence_length (Gaussian envelope)
  return sites * pitch * pitch /
         (std::numbers::pi * std::numbers::sqrt2 * envelope_std);
}

SourceConfig ExperimentConfig::source_config() const {
  SourceConfig s;
  s.nx = sites;
  s.ny = sites_y_effective();
  s.pitch_x = pitch;
  s.pitch_y = dim == 2 ? pitch_y_effective() : 0.0;
  s.envelope_std = envelope_std_effective();
  s.envelope = envelope;
  s.mean_intensity = mean_intensity;
  return s;
}

SplitterSpec ExperimentConfig::splitter() const {
  return SplitterSpec::from_intensities(splitter_t2, splitter_r2);
}

TransmissionMask ExperimentConfig::make_object() const {
  const int ny = sites_y_effective();
  const double py = dim == 2 ? pitch_y_effective() : 1.0;
  switch (object) {
    case ObjectKind::none:
      return identity_mask(sites, ny, pitch, py);
    case ObjectKind::double_slit:
      return double_slit_mask(sites, ny, pitch, py, slit_width, needle_width,
                              slit_height);
    case ObjectKind::bitmap: {
      std::ifstream f(bitmap_path, std::ios::binary);
      if (!f) fail("cannot open bitmap '" + bitmap_path + "'");
      std::ostringstream ss;
      ss << f.rdbuf();
      return bitmap_mask(sites, ny, pitch, py, ss.str(), bitmap_width);
    }
    case ObjectKind::phase_grating:
      return phase_grating_mask(sites, ny, pitch, py, grating_period);
  }
  fail("unreachable object kind");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("scenario", scenario_name(scenario));
  e.emplace_back("dim", std::to_string(dim));
  e.emplace_back("sites", std::to_string(sites));
  if (dim == 2) e.emplace_back("sites_y", std::to_string(sites_y_effective()));
  e.emplace_back("pitch", fmt(pitch));
  if (dim == 2) e.emplace_back("pitch_y", fmt(pitch_y_effective()));
  e.emplace_back("wavelength", fmt(wavelength));
  e.emplace_back("focal", fmt(focal));
  e.emplace_back("magnification", fmt(magnification));
  e.emplace_back("mean_intensity", fmt(mean_intensity));
  e.emplace_back("envelope",
                 envelope == EnvelopeKind::gaussian ? "gaussian" : "flattop");
  e.emplace_back("envelope_std", fmt(envelope_std_effective()));
  e.emplace_back("diaphragm", fmt(diaphragm_effective()));
  e.emplace_back("splitter_t2", fmt(splitter_t2));
  e.emplace_back("splitter_r2", fmt(splitter_r2));
  e.emplace_back("object", object_name(object));
  if (object == ObjectKind::double_slit) {
    e.emplace_back("slit_width", fmt(slit_width));
    e.emplace_back("needle_width", fmt(needle_width));
    if (dim == 2) e.emplace_back("slit_height", fmt(slit_height));
  } else if (object == ObjectKind::bitmap) {
    e.emplace_back("bitmap_path", bitmap_path);
    e.emplace_back("bitmap_width", fmt(bitmap_width));
  } else if (object == ObjectKind::phase_grating) {
    e.emplace_back("grating_period", fmt(grating_period));
  }
  e.emplace_back("frames", std::to_string(frames));
  e.emplace_back("seed", std::to_string(seed));
  if (fixed_pixel_x >= 0) {
    std::string v = std::to_string(fixed_pixel_x);
    if (dim == 2) v += "," + std::to_string(fixed_pixel_y);
    e.emplace_back("fixed_pixel", v);
  } else {
    e.emplace_back("fixed_pixel", "auto");
  }
  if (!sweep_values.empty()) {
    std::string v;
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
      if (i) v += ",";
      v += fmt(sweep_values[i]);
    }
    e.emplace_back("sweep_values", v);
    if (dim == 2 && scenario == Scenario::visibility_sweep)
      e.emplace_back("sweep_schedule", sweep_schedule == SweepSchedule::area
                                           ? "area"
                                           : "width_only");
  }
  return e;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::map<std::string, int> key_line;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (val.empty()) fail(lineno, "empty value for key '" + key + "'");
    seen.insert(key);
    key_line[key] = lineno;

    if (key == "scenario") {
      if (val == "characterization") c.scenario = Scenario::characterization;
      else if (val == "ghost_diffraction") c.scenario = Scenario::ghost_diffraction;
      else if (val == "ghost_image") c.scenario = Scenario::ghost_image;
      else if (val == "coherence_sweep") c.scenario = Scenario::coherence_sweep;
      else if (val == "visibility_sweep") c.scenario = Scenario::visibility_sweep;
      else fail(lineno, "unknown scenario '" + val + "'");
    } else if (key == "dim") {
      c.dim = int(parse_int(val, lineno));
      if (c.dim != 1 && c.dim != 2) fail(lineno, "dim must be 1 or 2");
    } else if (key == "sites") {
      c.sites = int(parse_int(val, lineno));
    } else if (key == "sites_y") {
      c.sites_y = int(parse_int(val, lineno));
    } else if (key == "pitch") {
      c.pitch = parse_length(val, lineno);
    } else if (key == "pitch_y") {
      c.pitch_y = parse_length(val, lineno);
    } else if (key == "wavelength") {
      c.wavelength = parse_length(val, lineno);
    } else if (key == "focal") {
      c.focal = parse_length(val, lineno);
    } else if (key == "magnification") {
      c.magnification = parse_double(val, lineno);
    } else if (key == "mean_intensity") {
      c.mean_intensity = parse_double(val, lineno);
    } else if (key == "envelope") {
      if (val == "gaussian") c.envelope = EnvelopeKind::gaussian;
      else if (val == "flattop") c.envelope = EnvelopeKind::flattop;
      else fail(lineno, "envelope must be gaussian or flattop");
    } else if (key == "envelope_std") {
      c.envelope_std = parse_length(val, lineno);
    } else if (key == "coherence_near") {
      c.coherence_near = parse_length(val, lineno);
    } else if (key == "diaphragm") {
      c.diaphragm = parse_length(val, lineno);
    } else if (key == "coherence_far") {
      c.coherence_far = parse_length(val, lineno);
    } else if (key == "splitter_t2") {
      c.splitter_t2 = parse_double(val, lineno);
    } else if (key == "splitter_r2") {
      c.splitter_r2 = parse_double(val, lineno);
    } else if (key == "object") {
      if (val == "none") c.object = ObjectKind::none;
      else if (val == "double_slit") c.object = ObjectKind::double_slit;
      else if (val == "bitmap") c.object = ObjectKind::bitmap;
      else if (val == "phase_grating") c.object = ObjectKind::phase_grating;
      else fail(lineno, "unknown object '" + val + "'");
    } else if (key == "slit_width") {
      c.slit_width = parse_length(val, lineno);
    } else if (key == "needle_width") {
      c.needle_width = parse_length(val, lineno);
    } else if (key == "slit_height") {
      c.slit_height = parse_length(val, lineno);
    } else if (key == "bitmap_path") {
      c.bitmap_path = val;
    } else if (key == "bitmap_width") {
      c.bitmap_width = parse_length(val, lineno);
    } else if (key == "grating_period") {
      c.grating_period = parse_length(val, lineno);
    } else if (key == "frames") {
      c.frames = parse_u64(val, lineno);
    } else if (key == "seed") {
      c.seed = parse_u64(val, lineno);
    } else if (key == "workers") {
      c.workers = int(parse_int(val, lineno));
      if (c.workers < 1) fail(lineno, "workers must be >= 1");
    } else if (key == "out_dir") {
      c.out_dir = val;
    } else if (key == "fixed_pixel") {
      if (val == "auto") {
        c.fixed_pixel_x = c.fixed_pixel_y = -1;
      } else {
        std::size_t comma = val.find(',');
        if (comma == std::string::npos) {
          c.fixed_pixel_x = int(parse_int(val, lineno));
          c.fixed_pixel_y = 0;
        } else {
          c.fixed_pixel_x = int(parse_int(trim(val.substr(0, comma)), lineno));
          c.fixed_pixel_y = int(parse_int(trim(val.substr(comma + 1)), lineno));
        }
        if (c.fixed_pixel_x < 0 || c.fixed_pixel_y < 0)
          fail(lineno, "fixed_pixel indices must be non-negative");
      }
    } else if (key == "sweep_values") {
      c.sweep_values.clear();
      std::string rest = val;
      while (!rest.empty()) {
        std::size_t comma = rest.find(',');
        std::string tok = trim(comma == std::string::npos ? rest : rest.substr(0, comma));
        rest = comma == std::string::npos ? "" : trim(rest.substr(comma + 1));
        if (tok.empty()) fail(lineno, "empty entry in sweep_values");
        c.sweep_values.push_back(parse_length(tok, lineno));
      }
      if (c.sweep_values.empty()) fail(lineno, "sweep_values is empty");
    } else if (key == "sweep_schedule") {
      if (val == "width_only") c.sweep_schedule = SweepSchedule::width_only;
      else if (val == "area") c.sweep_schedule = SweepSchedule::area;
      else fail(lineno, "sweep_schedule must be width_only or area");
    } else {
      fail(lineno, "unknown key '" + key + "'");
    }
  }

  auto require = [&](const char* key) {
    if (!seen.count(key))
      fail(std::string("missing required key '") + key + "'");
  };
  auto line_of = [&](const char* key) { return key_line[key]; };

  require("scenario");
  require("wavelength");
  require("focal");
  require("frames");
  if (c.frames < 1) fail(line_of("frames"), "frames must be >= 1");

  if (!(c.wavelength > 0.0)) fail(line_of("wavelength"), "wavelength must be > 0");
  if (!(c.focal > 0.0)) fail(line_of("focal"), "focal must be > 0");
  if (!(c.pitch > 0.0)) fail(line_of("pitch"), "pitch must be > 0");
  if (seen.count("pitch_y") && !(c.pitch_y > 0.0))
    fail(line_of("pitch_y"), "pitch_y must be > 0");
  if (c.sites < 2 || c.sites % 2 != 0)
    fail(line_of("sites"), "sites must be even and >= 2");
  if (seen.count("sites_y") && (c.sites_y < 2 || c.sites_y % 2 != 0))
    fail(line_of("sites_y"), "sites_y must be even and >= 2");
  if (!(c.magnification > 0.0))
    fail(line_of("magnification"), "magnification must be > 0");
  if (!(c.mean_intensity > 0.0))
    fail(line_of("mean_intensity"), "mean_intensity must be > 0");

  bool has_env = seen.count("envelope_std"), has_cn = seen.count("coherence_near");
  if (has_env == has_cn)
    fail("exactly one of 'envelope_std' and 'coherence_near' is required");
  if (has_env && !(c.envelope_std > 0.0))
    fail(line_of("envelope_std"), "envelope_std must be > 0");
  if (has_cn && !(c.coherence_near > 0.0))
    fail(line_of("coherence_near"), "coherence_near must be > 0");

  bool has_d = seen.count("diaphragm"), has_cf = seen.count("coherence_far");
  if (has_d == has_cf)
    fail("exactly one of 'diaphragm' and 'coherence_far' is required");
  if (has_d && !(c.diaphragm > 0.0))
    fail(line_of("diaphragm"), "diaphragm must be > 0");
  if (has_cf && !(c.coherence_far > 0.0))
    fail(line_of("coherence_far"), "coherence_far must be > 0");

  if (!(c.splitter_t2 > 0.0) || !(c.splitter_r2 > 0.0))
    fail("splitter intensities must be > 0");
  if (c.splitter_t2 + c.splitter_r2 > 1.0 + 1e-12)
    fail("splitter_t2 + splitter_r2 must not exceed 1");

  if (c.object == ObjectKind::double_slit) {
    if (!(c.slit_width > 0.0) || !(c.needle_width > 0.0) ||
        c.needle_width >= c.slit_width)
      fail("double slit requires 0 < needle_width < slit_width");
  } else if (c.object == ObjectKind::bitmap) {
    if (c.bitmap_path.empty()) fail("object bitmap requires 'bitmap_path'");
    if (!(c.bitmap_width > 0.0)) fail("object bitmap requires 'bitmap_width' > 0");
  } else if (c.object == ObjectKind::phase_grating) {
    if (!(c.grating_period > 0.0))
      fail("object phase_grating requires 'grating_period' > 0");
  }

  if ((c.scenario == Scenario::coherence_sweep ||
       c.scenario == Scenario::visibility_sweep)) {
    if (c.sweep_values.empty())
      fail("sweep scenarios require 'sweep_values'");
    for (double v : c.sweep_values)
      if (!(v > 0.0)) fail(line_of("sweep_values"), "sweep_values must be > 0");
    if (c.object == ObjectKind::none)
      fail("sweep scenarios require an object");
  }
  if (c.fixed_pixel_x >= c.sites ||
      (c.dim == 2 && c.fixed_pixel_y >= c.sites_y_effective()))
    fail(line_of("fixed_pixel"), "fixed_pixel outside the grid");

  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ghostlab
