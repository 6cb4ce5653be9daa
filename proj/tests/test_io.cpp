#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "ghostlab/io.hpp"
#include "json.hpp"

using namespace ghostlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ghostlab_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ScenarioReport tiny_report() {
  ScenarioReport r;
  r.scenario = "characterization";
  r.seed = 5;
  r.frames = 10;
  r.config_echo = {{"scenario", "characterization"}, {"frames", "10"}};
  r.check_abs("near_baseline_minus_1", 0.002, 0.01, "radial g2 baseline - 1");
  r.check_abs("bad_metric", 0.5, 0.1);
  r.info("degeneracy", 1.04);
  NamedProfile p;
  p.name = "autocorr";
  p.x = {0.0, 0.5};
  p.y = {2.0, 1.0};
  r.profiles.push_back(p);
  return r;
}

}  // namespace

TEST_CASE("csv profile is two columns at full precision") {
  TempDir tmp;
  std::string path = (tmp.path / "p.csv").string();
  write_csv_profile(path, {0.5, 1.0 / 3.0}, {1.0, 2.0});
  std::string text = slurp(path);
  CHECK(text.substr(0, 17) == "position_m,value\n");
  CHECK(text.find("0.5,1\n") != std::string::npos);
  CHECK(text.find("0.33333333333333331,2\n") != std::string::npos);
}

TEST_CASE("pgm16 writes big-endian samples with a scaling sidecar") {
  TempDir tmp;
  IntensityGrid m(2, 2, 1e-5, 1e-5);
  m.values = {0.0, 1.0, 2.0, 4.0};
  std::string path = (tmp.path / "m.pgm").string();
  write_pgm16(path, m);

  std::string bytes = slurp(path);
  // header: P5, 2 2, 65535
  CHECK(bytes.substr(0, 2) == "P5");
  CHECK(bytes.find("65535") != std::string::npos);
  // 4 samples * 2 bytes at the tail
  std::string data = bytes.substr(bytes.size() - 8);
  auto sample = [&](int i) {
    return (std::uint16_t(std::uint8_t(data[2 * i])) << 8) |
           std::uint8_t(data[2 * i + 1]);
  };
  CHECK(sample(0) == 0);       // min -> 0
  CHECK(sample(3) == 65535);   // max -> full scale
  CHECK(sample(2) == 32768);   // midpoint, rounded
  auto side = nlohmann::json::parse(slurp(path + ".json"));
  CHECK(side["min"].get<double>() == doctest::Approx(0.0));
  CHECK(side["max"].get<double>() == doctest::Approx(4.0));
  CHECK(side["nx"].get<int>() == 2);
}

TEST_CASE("summary json carries metrics, verdicts and the config echo") {
  auto j = nlohmann::json::parse(summary_json(tiny_report()));
  CHECK(j["scenario"] == "characterization");
  CHECK(j["seed"] == 5);
  CHECK(j["all_pass"] == false);
  CHECK(j["config"]["frames"] == "10");
  CHECK(j["config"].contains("workers") == false);
  REQUIRE(j["metrics"].size() == 3);
  CHECK(j["metrics"][0]["name"] == "near_baseline_minus_1");
  CHECK(j["metrics"][0]["pass"] == true);
  CHECK(j["metrics"][1]["pass"] == false);
  CHECK(j["metrics"][2].contains("tolerance") == false);
  REQUIRE(j["failures"].size() == 1);
  CHECK(j["failures"][0] == "bad_metric");
}

TEST_CASE("write_outputs lays out profiles, maps and the summary") {
  TempDir tmp;
  ScenarioReport r = tiny_report();
  NamedMap nm;
  nm.name = "G";
  nm.map = IntensityGrid(2, 2, 1e-5, 1e-5);
  nm.map.values = {0.0, 1.0, 2.0, 3.0};
  r.maps.push_back(nm);
  std::string dir = (tmp.path / "out").string();
  auto paths = write_outputs(r, dir);
  CHECK(fs::exists(fs::path(dir) / "profile_autocorr.csv"));
  CHECK(fs::exists(fs::path(dir) / "map_G.pgm"));
  CHECK(fs::exists(fs::path(dir) / "map_G.pgm.json"));
  CHECK(fs::exists(fs::path(dir) / "summary.json"));
  CHECK(paths.size() >= 4);
}

TEST_CASE("summary json is byte-stable across repeated serialization") {
  ScenarioReport r = tiny_report();
  CHECK(summary_json(r) == summary_json(r));
}
