#pragma once

// Run configuration and its line-oriented text format:
//
//   [section]
//   key = value        # lists are comma separated
//
// Every key is addressable as "section.key", which is also the spelling of
// command-line overrides.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pobs/core.hpp"
#include "pobs/solver.hpp"

namespace pobs {

struct GridSpec {
  std::vector<Interval> extents{{-5.0, 5.0}, {-5.0, 5.0}};
  std::vector<int> cells{256, 256};
  bool operator==(const GridSpec&) const = default;
};

struct ScheduleSpec {
  double eps0 = 0.1;
  double factor = 0.5;
  int steps = 6;
  double final_eps() const;
  bool operator==(const ScheduleSpec&) const = default;
};

struct SeedSpec {
  std::vector<double> center;  // empty: box centre
  double radius = 0.0;         // ≤ 0: quarter of the shortest side
  double amplitude = 1.0;
  bool operator==(const SeedSpec&) const = default;
};

struct AnalysisSpec {
  bool growth = true;
  bool nondegeneracy = true;
  bool porosity = true;
  bool boxcount = true;
  bool sigma_scaling = true;
  bool pointwise = true;
  bool barrier = true;
  bool holder = true;

  double tau_factor = 1.0;  // τ_pos = tau_factor·h^{p/(p−1)}
  double growth_lo_cells = 6.0;
  double growth_hi_cells = 24.0;
  int growth_radii = 6;
  double growth_band = 0.2;
  double growth_fraction = 0.8;
  std::vector<double> nondeg_radii_cells{4, 8, 16, 32};
  double nondeg_slack = 0.9;
  std::vector<double> porosity_radii_cells{8, 16, 32, 64};
  double porosity_min = 0.05;
  std::vector<double> box_scales_cells{1, 2, 4, 8, 16};
  double box_dim_tol = 0.15;
  double box_proxy_spread = 0.30;
  std::vector<double> sigmas{0.05, 0.1, 0.2, 0.4, 0.5};
  std::vector<double> sigma_radii{0.75, 1.0, 1.25};
  int sigma_points = 4;
  int s_samples = 32;
  double sigma_ratio_max = 0.7;
  double pointwise_slack = 1.2;
  std::vector<double> holder_alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double holder_factor = 1.1;
  bool operator==(const AnalysisSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "out";
  bool save_steps = false;
  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  ProblemParams problem;
  GridSpec grid;
  CoefficientSpec coefficient{"sin_product", 1.0, 0.2, 0.5};
  ScheduleSpec schedule;
  SeedSpec seed;
  AnalysisSpec analysis;
  OutputSpec output;
  std::uint64_t sample_seed = 1;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  Grid make_grid() const;
  BumpSpec make_bump(const Grid& grid) const;
  bool operator==(const RunConfig&) const = default;
};

/// Keys in file order, "section.key".
std::vector<std::string> config_keys();

/// Sets one key from its text form. Throws ConfigError on unknown keys or
/// unparsable values (no validation of cross-field constraints).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Parses the text format starting from defaults, then validates.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Full dump of every key; reals use the shortest round-trip form so parsing the
/// output reproduces the config exactly.
std::string serialize_config(const RunConfig& cfg);

}  // namespace pobs
