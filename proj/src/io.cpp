#include "ghostlab/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ghostlab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

}  // namespace

void write_csv_profile(const std::string& path, const std::vector<double>& x,
                       const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("profile columns differ in length");
  std::ofstream f = open_out(path);
  f << "position_m,value\n";
  char buf[96];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x[i], y[i]);
    f << buf;
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_pgm16(const std::string& path, const IntensityGrid& map) {
  const auto [mn_it, mx_it] =
      std::minmax_element(map.values.begin(), map.values.end());
  const double mn = map.values.empty() ? 0.0 : *mn_it;
  const double mx = map.values.empty() ? 0.0 : *mx_it;
  const double scale = mx > mn ? 65535.0 / (mx - mn) : 0.0;

  std::ofstream f = open_out(path);
  f << "P5\n" << map.nx() << " " << map.ny() << "\n65535\n";
  std::vector<unsigned char> row(std::size_t(map.nx()) * 2);
  for (int iy = 0; iy < map.ny(); ++iy) {
    for (int ix = 0; ix < map.nx(); ++ix) {
      double v = (map.at(ix, iy) - mn) * scale;
      auto s = static_cast<unsigned>(std::clamp(v, 0.0, 65535.0) + 0.5);
      if (s > 65535) s = 65535;
      row[std::size_t(ix) * 2] = static_cast<unsigned char>(s >> 8);
      row[std::size_t(ix) * 2 + 1] = static_cast<unsigned char>(s & 0xff);
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");

  nlohmann::ordered_json side;
  side["min"] = mn;
  side["max"] = mx;
  side["nx"] = map.nx();
  side["ny"] = map.ny();
  side["pitch_x_m"] = map.pitch_x();
  side["pitch_y_m"] = map.pitch_y();
  std::ofstream sf = open_out(path + ".json");
  sf << side.dump(2) << "\n";
}

std::string summary_json(const ScenarioReport& report) {
  nlohmann::ordered_json j;
  j["scenario"] = report.scenario;
  j["version"] = kVersion;
  j["seed"] = report.seed;
  j["frames"] = report.frames;
  j["all_pass"] = report.all_pass();

  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : report.config_echo) cfg[k] = v;
  j["config"] = std::move(cfg);

  nlohmann::ordered_json metrics = nlohmann::ordered_json::array();
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& m : report.metrics) {
    nlohmann::ordered_json e;
    e["name"] = m.name;
    e["value"] = m.value;
    if (m.checked) {
      e["tolerance"] = m.tolerance;
      e["pass"] = m.pass;
      if (!m.pass) failures.push_back(m.name);
    }
    if (!m.note.empty()) e["note"] = m.note;
    metrics.push_back(std::move(e));
  }
  j["metrics"] = std::move(metrics);
  j["failures"] = std::move(failures);
  return j.dump(2) + "\n";
}

std::vector<std::string> write_outputs(const ScenarioReport& report,
                                       const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;

  for (const auto& p : report.profiles) {
    std::string path = (fs::path(dir) / ("profile_" + p.name + ".csv")).string();
    write_csv_profile(path, p.x, p.y);
    written.push_back(path);
  }
  for (const auto& m : report.maps) {
    std::string path = (fs::path(dir) / ("map_" + m.name + ".pgm")).string();
    write_pgm16(path, m.map);
    written.push_back(path);
    written.push_back(path + ".json");
  }
  std::string spath = (fs::path(dir) / "summary.json").string();
  std::ofstream sf = open_out(spath);
  sf << summary_json(report);
  written.push_back(spath);
  return written;
}

}  // namespace ghostlab
