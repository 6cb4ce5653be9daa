#ifndef GHOSTLAB_IO_HPP
#define GHOSTLAB_IO_HPP

#include <string>
#include <vector>

#include "ghostlab/grid.hpp"
#include "ghostlab/scenarios.hpp"

namespace ghostlab {

/// Two-column CSV (position_m,value), one row per sample, 17 significant
/// digits so reruns are byte-comparable.
void write_csv_profile(const std::string& path, const std::vector<double>& x,
                       const std::vector<double>& y);

/// 16-bit binary PGM (P5, big-endian samples), values scaled linearly from
/// [min, max] to [0, 65535]. The scaling bounds go to a JSON sidecar at
/// path + ".json".
void write_pgm16(const std::string& path, const IntensityGrid& map);

/// JSON summary of a scenario report: metrics with tolerances and verdicts,
/// config echo, seed and version.
std::string summary_json(const ScenarioReport& report);

/// Writes profile_<name>.csv, map_<name>.pgm (+ sidecars) and summary.json
/// into dir (created if missing). Returns the paths written.
std::vector<std::string> write_outputs(const ScenarioReport& report,
                                       const std::string& dir);

}  // namespace ghostlab

#endif
