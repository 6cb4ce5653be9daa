#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ghostlab/config.hpp"
#include "ghostlab/io.hpp"
#include "ghostlab/scenarios.hpp"

namespace {

struct Overrides {
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::uint64_t frames = 0;
  bool has_frames = false;
  int workers = 0;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ghostlab::ExperimentConfig load(const std::string& text, const Overrides& ov) {
  ghostlab::ExperimentConfig cfg = ghostlab::parse_config(text);
  if (ov.has_seed) cfg.seed = ov.seed;
  if (ov.has_frames) cfg.frames = ov.frames;
  if (ov.workers > 0) cfg.workers = ov.workers;
  if (!ov.out.empty()) cfg.out_dir = ov.out;
  return cfg;
}

std::string out_dir_for(const ghostlab::ExperimentConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("GHOSTLAB_OUT"); env && *env) return env;
  return "ghostlab_out";
}

void print_report(const ghostlab::ScenarioReport& rep) {
  for (const auto& m : rep.metrics) {
    if (m.checked)
      std::printf("[%s] %s = %.6g (tolerance %.6g)%s%s\n",
                  m.pass ? "PASS" : "FAIL", m.name.c_str(), m.value,
                  m.tolerance, m.note.empty() ? "" : " - ", m.note.c_str());
    else
      std::printf("       %s = %.6g%s%s\n", m.name.c_str(), m.value,
                  m.note.empty() ? "" : " - ", m.note.c_str());
  }
}

int run_one(const ghostlab::ExperimentConfig& cfg, const std::string& dir) {
  ghostlab::ScenarioReport rep = ghostlab::run_scenario(cfg);
  auto files = ghostlab::write_outputs(rep, dir);
  print_report(rep);
  std::printf("wrote %zu files to %s\n", files.size(), dir.c_str());
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-thermal ghost imaging/diffraction simulator"};
  app.require_subcommand(1);

  std::string config_path, sweep_key, sweep_values;
  Overrides ov;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "config file")->required();
    sub->add_option("--seed", ov.seed, "override master seed")
        ->each([&](const std::string&) { ov.has_seed = true; });
    sub->add_option("--frames", ov.frames, "override frame count")
        ->each([&](const std::string&) { ov.has_frames = true; });
    sub->add_option("--workers", ov.workers, "override worker count");
    sub->add_option("--out", ov.out, "override output directory");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run the configured scenario");
  add_common(cmd_run);
  CLI::App* cmd_validate =
      app.add_subcommand("validate", "parse and echo the config");
  cmd_validate->add_option("config", config_path, "config file")->required();
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "rerun the scenario for each value of a key");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--key", sweep_key, "config key to sweep")->required();
  cmd_sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_validate->parsed()) {
      ghostlab::ExperimentConfig cfg = ghostlab::parse_config(slurp(config_path));
      std::printf("ok: %s\n", config_path.c_str());
      for (const auto& [k, v] : cfg.echo())
        std::printf("%s = %s\n", k.c_str(), v.c_str());
      return 0;
    }

    const std::string text = slurp(config_path);

    if (cmd_run->parsed()) {
      ghostlab::ExperimentConfig cfg = load(text, ov);
      return run_one(cfg, out_dir_for(cfg));
    }

    // sweep: override one key per run, each into its own subdirectory
    int rc = 0;
    std::istringstream vs(sweep_values);
    std::string value;
    while (std::getline(vs, value, ',')) {
      if (value.empty()) continue;
      ghostlab::ExperimentConfig cfg =
          load(text + "\n" + sweep_key + " = " + value + "\n", ov);
      std::string dir =
          (std::filesystem::path(out_dir_for(cfg)) / (sweep_key + "_" + value))
              .string();
      std::printf("--- %s = %s ---\n", sweep_key.c_str(), value.c_str());
      rc |= run_one(cfg, dir);
    }
    return rc;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
