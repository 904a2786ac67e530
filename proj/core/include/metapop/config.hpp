#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metapop/engine.hpp"
#include "metapop/experiments.hpp"
#include "metapop/geo_ingest.hpp"

namespace metapop {

struct NetworkConfig {
  std::optional<std::string> nodes_file;
  std::optional<std::string> intersections_file;
  std::optional<std::string> cells_file;
  std::optional<SynthIslandConfig> synth;
  double d_max_m = 200.0;
  bool normalize_kernel = false;
};

struct MobilityFileConfig {
  std::optional<std::string> file;  // load instead of generating
  MobilityGenConfig gen;
};

struct SeedingConfig {
  int node = -1;  // -1: the most populated node
  double count = 1;
};

struct IntegratorConfig {
  double t0 = 0;
  double t1 = 400;
  double h = 0.05;
  double output_interval = 1.0;
  AquaticMode aquatic_mode = AquaticMode::dynamic;
  std::vector<double> snapshot_times;
};

struct ExperimentConfig {
  // quarantine sweep
  std::vector<double> thresholds = {1.0, 0.5, 0.2, 0.1, 0.02};
  double check_interval_days = 1.0;
  // beta grid
  std::vector<double> beta_h_values;
  std::vector<double> beta_m_values;
  // replicates
  int replicates = 30;
  std::vector<int> observed_nodes;
  // compare
  std::optional<std::string> reference_file;
  std::optional<std::string> simulated_file;  // timeseries.csv to compare
  // verify scale
  int verify_nodes = 100;
};

// Fully validated run configuration; all defaults materialized. The
// echoed canonical form and its hash feed the run manifest.
struct RunConfig {
  std::uint64_t seed = 0;
  ModelParams params;
  NetworkConfig network;
  MobilityFileConfig mobility;
  IntegratorConfig integrator;
  SeedingConfig seeding;
  EventSpec events;
  ExperimentConfig experiment;
  std::string output_dir = "out";
  std::string base_dir;  // directory of the config file; file paths resolve
                         // against it

  std::string materialized_json;  // canonical echo with defaults filled
  std::string config_hash;        // of the canonical echo

  std::string resolve_path(const std::string& rel) const;
};

// JSON configuration document. Unknown keys, missing required keys and type
// mismatches are rejected with the key path; misspelled keys get a
// suggestion. `seed` is mandatory.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin,
                            const std::string& base_dir);

// Subcommand driver: build, gen-mobility, simulate, sweep, quarantine,
// replicates, metrics, compare, verify. Returns the process exit code
// (0 success, 1 validation/check failure); runtime aborts surface as
// simulation_abort.
int dispatch(const std::string& subcommand, const RunConfig& config);

}  // namespace metapop
