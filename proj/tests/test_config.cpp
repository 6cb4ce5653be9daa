#include <string>

#include "doctest.h"
#include "ghostlab/config.hpp"

using namespace ghostlab;

namespace {

const std::string kBase =
    "scenario = characterization\n"
    "wavelength = 0.532um\n"
    "focal = 80mm\n"
    "coherence_near = 34um\n"
    "diaphragm = 3mm\n"
    "frames = 100\n";

std::string with(const std::string& extra) { return kBase + extra; }

bool error_mentions(const std::string& text, const std::string& what) {
  try {
    parse_config(text);
  } catch (const std::exception& e) {
    return std::string(e.what()).find(what) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("length units normalize to meters") {
  ExperimentConfig cfg = parse_config(kBase);
  CHECK(cfg.wavelength == doctest::Approx(0.532e-6).epsilon(1e-14));
  CHECK(cfg.focal == doctest::Approx(0.08).epsilon(1e-14));
  CHECK(cfg.coherence_near == doctest::Approx(34e-6).epsilon(1e-14));
  CHECK(cfg.frames == 100);
  CHECK(cfg.sites == 2048);  // default
  CHECK(cfg.seed == 1);      // default
}

TEST_CASE("plain meters and overridden defaults") {
  ExperimentConfig cfg = parse_config(with("pitch = 1e-5m\nseed = 7\n"));
  CHECK(cfg.pitch == doctest::Approx(1e-5));
  CHECK(cfg.seed == 7);
}

TEST_CASE("comments, blank lines and later-key override") {
  ExperimentConfig cfg = parse_config(
      "# a comment\n\n" + kBase + "frames = 250  # trailing comment\n");
  CHECK(cfg.frames == 250);
}

TEST_CASE("missing required keys are named in the error") {
  CHECK(error_mentions(
      "scenario = characterization\nwavelength = 0.5um\nfocal = 80mm\n"
      "coherence_near = 34um\ndiaphragm = 3mm\n",
      "frames"));
  CHECK(error_mentions(
      "scenario = characterization\nfocal = 80mm\ncoherence_near = 34um\n"
      "diaphragm = 3mm\nframes = 10\n",
      "wavelength"));
}

TEST_CASE("exactly one of each paired setting") {
  CHECK(error_mentions(with("envelope_std = 1mm\n"), "coherence_near"));
  CHECK(error_mentions(with("coherence_far = 12um\n"), "diaphragm"));
}

TEST_CASE("unknown keys fail with the line number") {
  CHECK(error_mentions(with("coherenze_far = 12um\n"), "line 7"));
}

TEST_CASE("bad unit suffix is rejected") {
  CHECK(error_mentions(with("pitch = 0.5parsec\n"), "unit"));
}

TEST_CASE("splitter intensities above unity are rejected") {
  CHECK_THROWS(parse_config(with("splitter_t2 = 0.5\nsplitter_r2 = 0.6\n")));
  CHECK_NOTHROW(parse_config(with("splitter_t2 = 0.4\nsplitter_r2 = 0.6\n")));
}

TEST_CASE("zero frames are rejected") {
  CHECK_THROWS(parse_config(
      "scenario = characterization\nwavelength = 0.5um\nfocal = 80mm\n"
      "coherence_near = 34um\ndiaphragm = 3mm\nframes = 0\n"));
}

TEST_CASE("sweep scenarios need sweep values and an object") {
  CHECK_THROWS(parse_config(
      "scenario = coherence_sweep\nwavelength = 0.5um\nfocal = 80mm\n"
      "coherence_near = 34um\ndiaphragm = 3mm\nframes = 10\n"));
  ExperimentConfig cfg = parse_config(
      "scenario = visibility_sweep\nwavelength = 0.532um\nfocal = 80mm\n"
      "coherence_near = 34um\ncoherence_far = 12um\nframes = 10\n"
      "object = double_slit\nsweep_values = 350um, 500um, 690um\n");
  REQUIRE(cfg.sweep_values.size() == 3);
  CHECK(cfg.sweep_values[1] == doctest::Approx(500e-6));
}

TEST_CASE("derived coherence and diaphragm resolutions") {
  ExperimentConfig cfg = parse_config(kBase);
  CHECK(cfg.coherence_near_effective() == doctest::Approx(34e-6).epsilon(1e-9));
  CHECK(cfg.diaphragm_effective() == doctest::Approx(3e-3));
  ExperimentConfig far = parse_config(
      "scenario = characterization\nwavelength = 0.532um\nfocal = 80mm\n"
      "coherence_near = 34um\ncoherence_far = 12um\nframes = 10\n");
  // D = lambda F / dx_f
  CHECK(far.diaphragm_effective() ==
        doctest::Approx(0.532e-6 * 0.08 / 12e-6).epsilon(1e-12));
}

TEST_CASE("fixed pixel accepts auto and explicit forms") {
  CHECK(parse_config(with("fixed_pixel = auto\n")).fixed_pixel_x == -1);
  ExperimentConfig one = parse_config(with("fixed_pixel = 1024\n"));
  CHECK(one.fixed_pixel_x == 1024);
  ExperimentConfig two = parse_config(
      "scenario = characterization\ndim = 2\nsites = 64\n"
      "wavelength = 0.532um\nfocal = 80mm\ncoherence_near = 34um\n"
      "diaphragm = 3mm\nframes = 10\nfixed_pixel = 10, 20\n");
  CHECK(two.fixed_pixel_x == 10);
  CHECK(two.fixed_pixel_y == 20);
  CHECK_THROWS(parse_config(with("fixed_pixel = 5000\n")));
}

TEST_CASE("config echo is canonical and omits workers and out_dir") {
  ExperimentConfig cfg = parse_config(with("workers = 4\n"));
  cfg.out_dir = "/tmp/somewhere";
  bool saw_scenario = false;
  for (auto& [k, v] : cfg.echo()) {
    CHECK(k != "workers");
    CHECK(k != "out_dir");
    if (k == "scenario") {
      saw_scenario = true;
      CHECK(v == "characterization");
    }
  }
  CHECK(saw_scenario);
}

TEST_CASE("object factory produces the configured mask") {
  ExperimentConfig cfg = parse_config(with(
      "object = double_slit\nslit_width = 690um\nneedle_width = 160um\n"));
  TransmissionMask t = cfg.make_object();
  CHECK(t.transmissive_measure() == doctest::Approx(530e-6).epsilon(0.05));
  CHECK_THROWS(parse_config(with(
      "object = double_slit\nslit_width = 100um\nneedle_width = 160um\n")));
}
