#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcmap/fock.hpp"
#include "rcmap/redfield.hpp"
#include "rcmap/spectral.hpp"

namespace rcmap::scenario {

enum class Kind { map_sd, chain, benchmark_set, demon_sweep, report };

Kind parse_kind(std::string_view name);
std::string_view to_string(Kind k);

enum class Axis { delta_s, gamma_s, beta_ratio, beta_gamma };

Axis parse_axis(std::string_view name);
std::string_view to_string(Axis a);

struct Sweep {
  Axis axis;
  double min;
  double max;
  int points_per_decade = 40;
};

/// Log-spaced grid from min to max inclusive with the given density.
std::vector<double> log_grid(double min, double max, int points_per_decade);

/// Single-dot benchmark settings; gamma is set per grid point from beta * Gamma.
struct SetSettings {
  double dot_energy = 1.0;
  double width = 0.1;
  double center = 1.0;
  double beta = 1.0;
  double mu_l = 1.0;
  double mu_r = -1.0;
  double cutoff = 50.0;
};

struct ScenarioConfig {
  Kind kind = Kind::report;
  /// Preset name; ignored when `custom_model` is set.
  fock::ModelVariant model = fock::ModelVariant::model1;
  std::optional<nlohmann::json> custom_model;
  fock::DemonParams params;
  SetSettings set;
  std::optional<Sweep> sweep;
  redfield::GeneratorFlags flags;
  std::string output;
  int workers = 0;  ///< 0 picks the OpenMP default
  /// map-sd / chain input.
  std::optional<nlohmann::json> sd;
  spectral::MapOptions map;
  int steps = 1;
  std::filesystem::path base;
};

/// {"scenario", "model", "params", "set", "sweep": {"axis", "min", "max",
/// "points_per_decade"}, "flags": {"lamb_shift", "secular"}, "output",
/// "workers", "sd", "method", "steps", "grid_points"}. Energies in units of
/// the dot energy. Relative file paths resolve against `base`.
ScenarioConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int failures = 0;

  void write_csv(std::ostream& out) const;
};

/// Runs a tabular scenario. Grid points are solved by a pool of `workers`
/// threads; rows come back in grid order. A failing point fills its `error`
/// column and counts towards `failures`.
Table run_scenario(const ScenarioConfig& cfg);

/// JSON steady-state report for the configured model at one parameter point.
nlohmann::json run_report(const ScenarioConfig& cfg);

}  // namespace rcmap::scenario
