#include "metapop/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "metapop/csv.hpp"

namespace metapop {

std::size_t peak_index(std::span<const double> series) {
  if (series.empty()) throw std::invalid_argument("peak_index: empty series");
  std::size_t best = 0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    if (series[k] > series[best]) best = k;  // first occurrence wins ties
  }
  return best;
}

Trajectory run_spread_scenario(const NetworkModel& model, const ModelParams& p,
                               int seed_node, std::vector<int> observed_nodes,
                               const ScenarioOptions& opts) {
  NetworkState state = model.dfe(p);
  seed_infection(state, seed_node, opts.seed_count);
  IntegrateOptions integ = opts.integ;
  integ.observed_nodes = std::move(observed_nodes);
  return integrate(model, std::move(state), p, EventSpec{}, integ);
}

MosquitoMobilityComparison run_mosquito_mobility_comparison(
    const PatchNetwork& net, const TravelMatrices& tm, const ModelParams& p,
    const ScenarioOptions& opts, EngineOptions engine_opts) {
  MosquitoMobilityComparison out;
  {
    NetworkModel with(net, tm, engine_opts);
    NetworkState state = with.dfe(p);
    seed_infection(state, opts.seed_node, opts.seed_count);
    out.with_kernel = integrate(with, std::move(state), p, EventSpec{}, opts.integ);
  }
  {
    PatchNetwork isolated = net;
    isolated.edges.clear();  // self-interaction only: psi(0) = 1 remains
    NetworkModel without(isolated, tm, engine_opts);
    NetworkState state = without.dfe(p);
    seed_infection(state, opts.seed_node, opts.seed_count);
    out.without_kernel =
        integrate(without, std::move(state), p, EventSpec{}, opts.integ);
  }
  return out;
}

QuarantineSweepResult run_quarantine_sweep(const NetworkModel& model,
                                           const ModelParams& p,
                                           std::vector<double> thresholds,
                                           const ScenarioOptions& opts,
                                           double check_interval_days) {
  for (double th : thresholds) {
    if (!(th > 0 && th <= 1)) {
      throw std::invalid_argument("run_quarantine_sweep: thresholds must be in (0, 1]");
    }
  }
  QuarantineSweepResult out;
  out.thresholds = std::move(thresholds);
  {
    NetworkState state = model.dfe(p);
    seed_infection(state, opts.seed_node, opts.seed_count);
    out.baseline = integrate(model, std::move(state), p, EventSpec{}, opts.integ);
  }
  out.runs.resize(out.thresholds.size());
  for (std::size_t k = 0; k < out.thresholds.size(); ++k) {
    EventSpec events;
    events.quarantine = QuarantineSpec{out.thresholds[k], check_interval_days};
    NetworkState state = model.dfe(p);
    seed_infection(state, opts.seed_node, opts.seed_count);
    out.runs[k] = integrate(model, std::move(state), p, events, opts.integ);
  }
  return out;
}

double SweepGrid::at(std::size_t ih, std::size_t im) const {
  return seroprevalence.at(ih * beta_m_values.size() + im);
}

SweepGrid run_beta_grid(const NetworkModel& model, const ModelParams& base,
                        std::vector<double> beta_h_values,
                        std::vector<double> beta_m_values,
                        const ScenarioOptions& opts) {
  if (beta_h_values.empty() || beta_m_values.empty()) {
    throw std::invalid_argument("run_beta_grid: empty grid");
  }
  SweepGrid grid;
  grid.beta_h_values = std::move(beta_h_values);
  grid.beta_m_values = std::move(beta_m_values);
  grid.horizon_days = opts.integ.t1 - opts.integ.t0;
  const std::size_t nh = grid.beta_h_values.size();
  const std::size_t nm = grid.beta_m_values.size();
  grid.seroprevalence.assign(nh * nm, 0.0);
  const double total_pop = model.network().total_population();

  // cells are independent; own state per cell, results stored by index
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (std::size_t ih = 0; ih < nh; ++ih) {
    for (std::size_t im = 0; im < nm; ++im) {
      ModelParams p = base;
      p.beta_h = grid.beta_h_values[ih];
      p.beta_m = grid.beta_m_values[im];
      NetworkState state = model.dfe(p);
      seed_infection(state, opts.seed_node, opts.seed_count);
      IntegrateOptions integ = opts.integ;
      integ.observed_nodes.clear();
      const Trajectory traj =
          integrate(model, std::move(state), p, EventSpec{}, integ);
      grid.seroprevalence[ih * nm + im] =
          total_pop > 0 ? traj.points.back().totals.seroprevalence / total_pop : 0.0;
    }
  }
  return grid;
}

double bilinear_interpolate(const SweepGrid& grid, double beta_h, double beta_m) {
  const auto& xs = grid.beta_h_values;
  const auto& ys = grid.beta_m_values;
  if (xs.empty() || ys.empty()) throw std::invalid_argument("bilinear: empty grid");
  if (beta_h < xs.front() || beta_h > xs.back() || beta_m < ys.front() ||
      beta_m > ys.back()) {
    throw std::domain_error("bilinear: query outside the grid hull");
  }
  auto cell_of = [](const std::vector<double>& vals, double q) {
    auto it = std::upper_bound(vals.begin(), vals.end(), q);
    std::size_t hi = std::min<std::size_t>(it - vals.begin(), vals.size() - 1);
    if (hi == 0) hi = 1;
    return hi - 1;
  };
  // degenerate 1 x m / n x 1 grids interpolate along the live axis only
  const std::size_t i0 = xs.size() > 1 ? cell_of(xs, beta_h) : 0;
  const std::size_t j0 = ys.size() > 1 ? cell_of(ys, beta_m) : 0;
  const std::size_t i1 = xs.size() > 1 ? i0 + 1 : 0;
  const std::size_t j1 = ys.size() > 1 ? j0 + 1 : 0;
  const double tx =
      xs.size() > 1 ? (beta_h - xs[i0]) / (xs[i1] - xs[i0]) : 0.0;
  const double ty =
      ys.size() > 1 ? (beta_m - ys[j0]) / (ys[j1] - ys[j0]) : 0.0;
  const double v00 = grid.at(i0, j0);
  const double v10 = grid.at(i1, j0);
  const double v01 = grid.at(i0, j1);
  const double v11 = grid.at(i1, j1);
  return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 +
         (1 - tx) * ty * v01 + tx * ty * v11;
}

void save_grid_csv(const SweepGrid& grid, const std::string& path) {
  CsvWriter w(path, {"beta_h", "beta_m", "seroprevalence"});
  for (std::size_t ih = 0; ih < grid.beta_h_values.size(); ++ih) {
    for (std::size_t im = 0; im < grid.beta_m_values.size(); ++im) {
      w.begin_row();
      w.field(grid.beta_h_values[ih]);
      w.field(grid.beta_m_values[im]);
      w.field(grid.at(ih, im));
      w.end_row();
    }
  }
}

Trajectory run_mutation_scenario(const NetworkModel& model,
                                 const ModelParams& pre, const MutationSpec& mutation,
                                 double horizon_days, const ScenarioOptions& opts) {
  if (!(mutation.time_days < horizon_days)) {
    throw std::invalid_argument("run_mutation_scenario: mutation must precede the horizon");
  }
  EventSpec events;
  events.mutation = mutation;
  NetworkState state = model.dfe(pre);
  seed_infection(state, opts.seed_node, opts.seed_count);
  IntegrateOptions integ = opts.integ;
  integ.t1 = integ.t0 + horizon_days;
  return integrate(model, std::move(state), pre, events, integ);
}

namespace {

// seroprevalence at time t, linear between samples
double sero_at(const Trajectory& traj, double t) {
  const auto& pts = traj.points;
  if (pts.empty()) throw std::invalid_argument("empty trajectory");
  if (t <= pts.front().t) return pts.front().totals.seroprevalence;
  if (t >= pts.back().t) return pts.back().totals.seroprevalence;
  std::size_t lo = 0, hi = pts.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (pts[mid].t <= t ? lo : hi) = mid;
  }
  const double span = pts[hi].t - pts[lo].t;
  const double u = span > 0 ? (t - pts[lo].t) / span : 0.0;
  return pts[lo].totals.seroprevalence +
         u * (pts[hi].totals.seroprevalence - pts[lo].totals.seroprevalence);
}

}  // namespace

std::vector<double> weekly_new_cases(const Trajectory& traj,
                                     double week_start_day, int weeks) {
  std::vector<double> out;
  out.reserve(weeks);
  for (int w = 0; w < weeks; ++w) {
    const double a = week_start_day + 7.0 * w;
    out.push_back(sero_at(traj, a + 7.0) - sero_at(traj, a));
  }
  return out;
}

TimeseriesComparison compare_timeseries(const Trajectory& simulated,
                                        const std::string& reference_csv) {
  const CsvTable t = read_csv(reference_csv);
  const int c_w = t.require_column("week_start_day");
  const int c_n = t.require_column("new_cases");
  std::vector<double> week_start, ref_cases;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    week_start.push_back(parse_double_field(t.rows[r][c_w], t, r, c_w));
    ref_cases.push_back(parse_double_field(t.rows[r][c_n], t, r, c_n));
    if (r > 0 && !(week_start[r] > week_start[r - 1])) {
      throw std::invalid_argument(reference_csv + ": weeks must be strictly increasing");
    }
  }
  if (simulated.points.empty()) {
    throw std::invalid_argument("compare_timeseries: empty trajectory");
  }
  const double t_lo = simulated.points.front().t;
  const double t_hi = simulated.points.back().t;
  double se = 0;
  std::size_t overlap = 0;
  std::vector<double> sim_cases_overlap, ref_cases_overlap, week_overlap;
  for (std::size_t k = 0; k < week_start.size(); ++k) {
    if (week_start[k] < t_lo || week_start[k] + 7.0 > t_hi) continue;
    const double sim = sero_at(simulated, week_start[k] + 7.0) -
                       sero_at(simulated, week_start[k]);
    sim_cases_overlap.push_back(sim);
    ref_cases_overlap.push_back(ref_cases[k]);
    week_overlap.push_back(week_start[k]);
    se += (sim - ref_cases[k]) * (sim - ref_cases[k]);
    ++overlap;
  }
  if (overlap == 0) {
    throw std::invalid_argument(
        "compare_timeseries: no overlap between reference weeks and the run");
  }
  TimeseriesComparison out;
  out.rmse = std::sqrt(se / double(overlap));
  out.peak_time_offset_days = week_overlap[peak_index(sim_cases_overlap)] -
                              week_overlap[peak_index(ref_cases_overlap)];
  const double sim_total =
      std::accumulate(sim_cases_overlap.begin(), sim_cases_overlap.end(), 0.0);
  const double ref_total =
      std::accumulate(ref_cases_overlap.begin(), ref_cases_overlap.end(), 0.0);
  out.final_seroprevalence_gap = sim_total - ref_total;
  return out;
}

const ReplicateStats::Row& ReplicateStats::node_row(std::size_t time_idx,
                                                    std::size_t node_idx) const {
  return node_stats.at(time_idx * node_ids.size() + node_idx);
}

namespace {

ReplicateStats::Row reduce_samples(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  auto quantile = [&](double q) {
    // linear interpolation between order statistics (the common default)
    const double pos = q * double(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - double(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
  };
  ReplicateStats::Row row;
  row.min = v.front();
  row.max = v.back();
  row.q1 = quantile(0.25);
  row.median = quantile(0.5);
  row.q3 = quantile(0.75);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(n);
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  row.sd = n > 1 ? std::sqrt(ss / double(n - 1)) : 0.0;
  return row;
}

}  // namespace

ReplicateStats run_replicates(const PatchNetwork& net,
                              const MobilityGenConfig& gen_cfg,
                              const ModelParams& p,
                              std::vector<int> observed_nodes,
                              const ReplicateOptions& opts) {
  if (opts.n_replicates < 2) {
    throw std::invalid_argument("run_replicates: need at least 2 replicates");
  }
  const int reps = opts.n_replicates;
  std::vector<Trajectory> trajectories(reps);

  // the population and the number of displacements stay fixed; only the
  // destination draws change between replicates
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    MobilityGenConfig cfg = gen_cfg;
    cfg.seed = derive_seed(opts.master_seed, std::uint64_t(r));
    const TravelMatrices tm = generate_mobility(net, cfg);
    NetworkModel model(net, tm);
    NetworkState state = model.dfe(p);
    seed_infection(state, opts.scenario.seed_node, opts.scenario.seed_count);
    IntegrateOptions integ = opts.scenario.integ;
    integ.observed_nodes = observed_nodes;
    trajectories[r] = integrate(model, std::move(state), p, EventSpec{}, integ);
  }

  ReplicateStats stats;
  stats.node_ids = std::move(observed_nodes);
  stats.times = trajectories[0].times();
  const std::size_t nt = stats.times.size();
  const std::size_t nn = stats.node_ids.size();
  stats.node_stats.resize(nt * nn);
  stats.network_stats.resize(nt);
  std::vector<double> samples(reps);
  for (std::size_t ti = 0; ti < nt; ++ti) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      for (int r = 0; r < reps; ++r) {
        samples[r] = trajectories[r].points[ti].observed[ni].i_h_present;
      }
      stats.node_stats[ti * nn + ni] = reduce_samples(samples);
    }
    for (int r = 0; r < reps; ++r) {
      samples[r] = trajectories[r].points[ti].totals.i_h;
    }
    stats.network_stats[ti] = reduce_samples(samples);
  }

  for (std::size_t ni = 0; ni < nn; ++ni) {
    ReplicateStats::Summary s;
    s.node_id = stats.node_ids[ni];
    s.population = net.nodes[stats.node_ids[ni]].population;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const double sd = stats.node_stats[ti * nn + ni].sd;
      if (sd > s.max_sd) {
        s.max_sd = sd;
        s.max_sd_time = stats.times[ti];
      }
    }
    s.pct_of_population = s.population > 0 ? 100.0 * s.max_sd / s.population : 0.0;
    stats.node_summaries.push_back(s);
  }
  stats.network_summary.node_id = -1;
  stats.network_summary.population = net.total_population();
  for (std::size_t ti = 0; ti < nt; ++ti) {
    const double sd = stats.network_stats[ti].sd;
    if (sd > stats.network_summary.max_sd) {
      stats.network_summary.max_sd = sd;
      stats.network_summary.max_sd_time = stats.times[ti];
    }
  }
  stats.network_summary.pct_of_population =
      stats.network_summary.population > 0
          ? 100.0 * stats.network_summary.max_sd / stats.network_summary.population
          : 0.0;
  return stats;
}

void save_replicate_stats_csv(const ReplicateStats& stats, const std::string& path) {
  CsvWriter w(path, {"t_days", "node_id", "min", "q1", "median", "q3", "max", "sd"});
  const std::size_t nn = stats.node_ids.size();
  for (std::size_t ti = 0; ti < stats.times.size(); ++ti) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const auto& row = stats.node_stats[ti * nn + ni];
      w.begin_row();
      w.field(stats.times[ti]);
      w.field(stats.node_ids[ni]);
      w.field(row.min);
      w.field(row.q1);
      w.field(row.median);
      w.field(row.q3);
      w.field(row.max);
      w.field(row.sd);
      w.end_row();
    }
    const auto& net_row = stats.network_stats[ti];
    w.begin_row();
    w.field(stats.times[ti]);
    w.field(-1);
    w.field(net_row.min);
    w.field(net_row.q1);
    w.field(net_row.median);
    w.field(net_row.q3);
    w.field(net_row.max);
    w.field(net_row.sd);
    w.end_row();
  }
}

void save_replicate_summary_csv(const ReplicateStats& stats, const std::string& path) {
  CsvWriter w(path, {"node_id", "population", "max_sd", "max_sd_t_days",
                     "pct_of_population"});
  auto row = [&](const ReplicateStats::Summary& s) {
    w.begin_row();
    w.field(s.node_id);
    w.field(s.population);
    w.field(s.max_sd);
    w.field(s.max_sd_time);
    w.field(s.pct_of_population);
    w.end_row();
  };
  for (const auto& s : stats.node_summaries) row(s);
  row(stats.network_summary);
}

}  // namespace metapop
