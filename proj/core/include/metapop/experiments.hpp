#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metapop/engine.hpp"

namespace metapop {

// Shared knobs for the scenario drivers.
struct ScenarioOptions {
  int seed_node = 0;
  double seed_count = 1;
  IntegrateOptions integ;  // t0/t1/h/output_interval/observed_nodes
};

// Index of the peak of a series, first occurrence on ties.
std::size_t peak_index(std::span<const double> series);

// One infected dropped on a DFE network; per-node curves for the observed
// nodes come back inside the trajectory.
Trajectory run_spread_scenario(const NetworkModel& model, const ModelParams& p,
                               int seed_node, std::vector<int> observed_nodes,
                               const ScenarioOptions& opts);

struct MosquitoMobilityComparison {
  Trajectory with_kernel;
  Trajectory without_kernel;
};

// Identical runs except for the kernel edge set (present vs self-only).
MosquitoMobilityComparison run_mosquito_mobility_comparison(
    const PatchNetwork& net, const TravelMatrices& tm, const ModelParams& p,
    const ScenarioOptions& opts, EngineOptions engine_opts = {});

struct QuarantineSweepResult {
  std::vector<double> thresholds;
  std::vector<Trajectory> runs;  // aligned with thresholds
  Trajectory baseline;           // no quarantine
};

QuarantineSweepResult run_quarantine_sweep(const NetworkModel& model,
                                           const ModelParams& p,
                                           std::vector<double> thresholds,
                                           const ScenarioOptions& opts,
                                           double check_interval_days = 1.0);

struct SweepGrid {
  std::vector<double> beta_h_values;
  std::vector<double> beta_m_values;
  double horizon_days = 400;
  // final seroprevalence fraction of total population, row-major over
  // (beta_h index, beta_m index)
  std::vector<double> seroprevalence;

  double at(std::size_t ih, std::size_t im) const;
};

SweepGrid run_beta_grid(const NetworkModel& model, const ModelParams& base,
                        std::vector<double> beta_h_values,
                        std::vector<double> beta_m_values,
                        const ScenarioOptions& opts);

// Standard bilinear blend on the enclosing cell; queries outside the grid
// hull are rejected (no extrapolation).
double bilinear_interpolate(const SweepGrid& grid, double beta_h, double beta_m);

void save_grid_csv(const SweepGrid& grid, const std::string& path);

// Single run with the one-time (beta_h, beta_m) switch.
Trajectory run_mutation_scenario(const NetworkModel& model,
                                 const ModelParams& pre, const MutationSpec& mutation,
                                 double horizon_days, const ScenarioOptions& opts);

// New cases per week derived by differencing seroprevalence at week
// boundaries (linear interpolation between samples).
std::vector<double> weekly_new_cases(const Trajectory& traj,
                                     double week_start_day, int weeks);

struct TimeseriesComparison {
  double rmse = 0;
  double peak_time_offset_days = 0;  // simulated peak week minus reference
  double final_seroprevalence_gap = 0;
};

// Reference CSV: header week_start_day,new_cases with strictly increasing
// weeks. Metrics are computed over the overlapping whole weeks.
TimeseriesComparison compare_timeseries(const Trajectory& simulated,
                                        const std::string& reference_csv);

struct ReplicateStats {
  struct Row {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, sd = 0;
  };
  std::vector<double> times;
  std::vector<int> node_ids;
  std::vector<Row> node_stats;     // times.size() * node_ids.size(), time-major
  std::vector<Row> network_stats;  // per time, total I_H across the network

  struct Summary {
    int node_id = -1;  // -1 marks the network-level row
    double population = 0;
    double max_sd = 0;
    double max_sd_time = 0;
    double pct_of_population = 0;
  };
  std::vector<Summary> node_summaries;
  Summary network_summary;

  const Row& node_row(std::size_t time_idx, std::size_t node_idx) const;
};

struct ReplicateOptions {
  int n_replicates = 30;
  std::uint64_t master_seed = 0;  // replicate r regenerates mobility with
                                  // a seed derived from this and r
  ScenarioOptions scenario;
};

// Re-draws the destination lists per replicate (population and trip counts
// unchanged), runs each to the horizon, and reduces I_H order statistics.
ReplicateStats run_replicates(const PatchNetwork& net,
                              const MobilityGenConfig& gen_cfg,
                              const ModelParams& p,
                              std::vector<int> observed_nodes,
                              const ReplicateOptions& opts);

void save_replicate_stats_csv(const ReplicateStats& stats, const std::string& path);
void save_replicate_summary_csv(const ReplicateStats& stats, const std::string& path);

}  // namespace metapop
