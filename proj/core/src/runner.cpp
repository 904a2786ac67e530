#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "metapop/config.hpp"
#include "metapop/csv.hpp"
#include "metapop/graph_metrics.hpp"
#include "metapop/patch_model.hpp"
#include "metapop/version.hpp"

namespace metapop {

namespace {

namespace fs = std::filesystem;

void write_manifest(const RunConfig& cfg, const std::string& subcommand) {
  nlohmann::json manifest;
  manifest["tool"] = "metapop";
  manifest["version"] = kVersion;
  manifest["format_version"] = kFormatVersion;
  manifest["subcommand"] = subcommand;
  manifest["seed"] = cfg.seed;
  manifest["config_hash"] = cfg.config_hash;
  manifest["config"] = nlohmann::json::parse(cfg.materialized_json);
  std::ofstream out(fs::path(cfg.output_dir) / "manifest.json");
  out << manifest.dump(2) << "\n";
}

PatchNetwork build_network(const RunConfig& cfg, std::vector<std::string>& warnings) {
  const auto& nc = cfg.network;
  if (nc.synth) {
    return synthesize_island(*nc.synth, cfg.params);
  }
  if (nc.nodes_file) {
    PatchNetwork net = load_nodes_csv(cfg.resolve_path(*nc.nodes_file), nc.d_max_m);
    finalize_network(net, cfg.params);
    return net;
  }
  if (nc.intersections_file) {
    auto pts = load_intersections(cfg.resolve_path(*nc.intersections_file), &warnings);
    PatchNetwork net;
    net.d_max_m = nc.d_max_m;
    if (nc.cells_file) {
      const auto cells = load_cells_csv(cfg.resolve_path(*nc.cells_file));
      const auto assign = distribute_population(cells, pts, &warnings);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        net.nodes.push_back({static_cast<int>(i), pts[i].x, pts[i].y,
                             double(assign.node_population[i]), 0, 0, 0});
      }
      for (std::size_t k = 0; k < assign.created_nodes.size(); ++k) {
        net.nodes.push_back({static_cast<int>(net.nodes.size()),
                             assign.created_nodes[k].x, assign.created_nodes[k].y,
                             double(assign.created_population[k]), 0, 0, 0});
      }
    } else {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        net.nodes.push_back({static_cast<int>(i), pts[i].x, pts[i].y, 0, 0, 0, 0});
      }
    }
    finalize_network(net, cfg.params);
    return net;
  }
  throw std::invalid_argument(
      "config: network requires one of synth, nodes_file, intersections_file");
}

TravelMatrices obtain_mobility(const RunConfig& cfg, const PatchNetwork& net,
                               std::vector<std::string>& warnings) {
  if (cfg.mobility.file) {
    return load_mobility_csv(cfg.resolve_path(*cfg.mobility.file), net.node_count());
  }
  return generate_mobility(net, cfg.mobility.gen, &warnings);
}

int pick_seed_node(const RunConfig& cfg, const PatchNetwork& net) {
  if (cfg.seeding.node >= 0) {
    if (cfg.seeding.node >= net.node_count()) {
      throw std::invalid_argument("config: seeding.node out of range");
    }
    return cfg.seeding.node;
  }
  int best = 0;
  for (int i = 1; i < net.node_count(); ++i) {
    if (net.nodes[i].population > net.nodes[best].population) best = i;
  }
  return best;
}

ScenarioOptions scenario_from(const RunConfig& cfg, const PatchNetwork& net) {
  ScenarioOptions opts;
  opts.seed_node = pick_seed_node(cfg, net);
  opts.seed_count = cfg.seeding.count;
  opts.integ.t0 = cfg.integrator.t0;
  opts.integ.t1 = cfg.integrator.t1;
  opts.integ.h = cfg.integrator.h;
  opts.integ.output_interval = cfg.integrator.output_interval;
  opts.integ.observed_nodes = cfg.experiment.observed_nodes;
  return opts;
}

EngineOptions engine_options_from(const RunConfig& cfg) {
  EngineOptions opts;
  opts.aquatic_mode = cfg.integrator.aquatic_mode;
  opts.normalize_kernel = cfg.network.normalize_kernel;
  return opts;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
}

std::string threshold_dir_name(double th) {
  std::string s = "threshold_" + format_double(th);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

int cmd_build(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const PatchNetwork net = build_network(cfg, warnings);
  print_warnings(warnings);
  fs::create_directories(cfg.output_dir);
  save_nodes_csv(net, (fs::path(cfg.output_dir) / "nodes.csv").string());
  save_edges_csv(net.edges, (fs::path(cfg.output_dir) / "mosq_edges.csv").string());
  write_manifest(cfg, "build");
  std::cout << "nodes: " << net.node_count()
            << ", kernel edges: " << net.edges.size()
            << ", population: " << format_double(net.total_population()) << "\n";
  return 0;
}

int cmd_gen_mobility(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const PatchNetwork net = build_network(cfg, warnings);
  const TravelMatrices tm = generate_mobility(net, cfg.mobility.gen, &warnings);
  print_warnings(warnings);
  fs::create_directories(cfg.output_dir);
  save_mobility_csv(tm, (fs::path(cfg.output_dir) / "mobility.csv").string());
  write_manifest(cfg, "gen-mobility");
  std::cout << "OD pairs: " << tm.pair_count() << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const PatchNetwork net = build_network(cfg, warnings);
  const TravelMatrices tm = obtain_mobility(cfg, net, warnings);
  print_warnings(warnings);
  NetworkModel model(net, tm, engine_options_from(cfg));
  NetworkState state = model.dfe(cfg.params);
  const int seed_node = pick_seed_node(cfg, net);
  if (cfg.seeding.count > 0) seed_infection(state, seed_node, cfg.seeding.count);

  fs::create_directories(cfg.output_dir);
  IntegrateOptions integ;
  integ.t0 = cfg.integrator.t0;
  integ.t1 = cfg.integrator.t1;
  integ.h = cfg.integrator.h;
  integ.output_interval = cfg.integrator.output_interval;
  integ.observed_nodes = cfg.experiment.observed_nodes;
  std::vector<double> snap_times = cfg.integrator.snapshot_times;
  integ.on_output = [&](double t, const NetworkState& x) {
    for (double st : snap_times) {
      if (std::abs(t - st) <= 1e-9 * std::max(1.0, std::abs(st))) {
        const std::string name = "snapshot_t" + format_double(st) + ".csv";
        save_snapshot_csv(x, (fs::path(cfg.output_dir) / name).string());
      }
    }
  };
  const Trajectory traj = integrate(model, std::move(state), cfg.params,
                                    cfg.events, integ);
  save_timeseries_csv(traj, (fs::path(cfg.output_dir) / "timeseries.csv").string());
  write_manifest(cfg, "simulate");
  std::cout << "simulated " << format_double(integ.t1 - integ.t0) << " days; final seroprevalence "
            << format_double(traj.points.back().totals.seroprevalence) << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.experiment.beta_h_values.empty() || cfg.experiment.beta_m_values.empty()) {
    throw std::invalid_argument(
        "config: sweep needs experiment.beta_h_values and beta_m_values");
  }
  std::vector<std::string> warnings;
  const PatchNetwork net = build_network(cfg, warnings);
  const TravelMatrices tm = obtain_mobility(cfg, net, warnings);
  print_warnings(warnings);
  NetworkModel model(net, tm, engine_options_from(cfg));
  const SweepGrid grid =
      run_beta_grid(model, cfg.params, cfg.experiment.beta_h_values,
                    cfg.experiment.beta_m_values, scenario_from(cfg, net));
  fs::create_directories(cfg.output_dir);
  save_grid_csv(grid, (fs::path(cfg.output_dir) / "grid.csv").string());
  write_manifest(cfg, "sweep");
  std::cout << "grid cells: " << grid.seroprevalence.size() << "\n";
  return 0;
}

int cmd_quarantine(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const PatchNetwork net = build_network(cfg, warnings);
  const TravelMatrices tm = obtain_mobility(cfg, net, warnings);
  print_warnings(warnings);
  NetworkModel model(net, tm, engine_options_from(cfg));
  const auto result =
      run_quarantine_sweep(model, cfg.params, cfg.experiment.thresholds,
                           scenario_from(cfg, net), cfg.experiment.check_interval_days);
  fs::create_directories(fs::path(cfg.output_dir) / "baseline");
  save_timeseries_csv(
      result.baseline,
      (fs::path(cfg.output_dir) / "baseline" / "timeseries.csv").string());
  for (std::size_t k = 0; k < result.thresholds.size(); ++k) {
    const fs::path dir =
        fs::path(cfg.output_dir) / threshold_dir_name(result.thresholds[k]);
    fs::create_directories(dir);
    save_timeseries_csv(result.runs[k], (dir / "timeseries.csv").string());
  }
  CsvWriter summary((fs::path(cfg.output_dir) / "summary.csv").string(),
                    {"threshold", "peak_i_h", "peak_t_days", "final_seroprevalence"});
  auto row = [&](double th, const Trajectory& traj) {
    const auto ih = traj.total_i_h();
    const std::size_t pk = peak_index(ih);
    summary.begin_row();
    summary.field(th);
    summary.field(ih[pk]);
    summary.field(traj.points[pk].t);
    summary.field(traj.points.back().totals.seroprevalence);
    summary.end_row();
  };
  row(1.0, result.baseline);
  for (std::size_t k = 0; k < result.thresholds.size(); ++k) {
    row(result.thresholds[k], result.runs[k]);
  }
  write_manifest(cfg, "quarantine");
  std::cout << "thresholds run: " << result.thresholds.size() << " + baseline\n";
  return 0;
}

int cmd_replicates(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const PatchNetwork net = build_network(cfg, warnings);
  print_warnings(warnings);
  std::vector<int> observed = cfg.experiment.observed_nodes;
  if (observed.empty()) {
    // default: the five most populated nodes
    std::vector<int> order(net.node_count());
    for (int i = 0; i < net.node_count(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (net.nodes[a].population != net.nodes[b].population) {
        return net.nodes[a].population > net.nodes[b].population;
      }
      return a < b;
    });
    order.resize(std::min<std::size_t>(5, order.size()));
    observed = order;
  }
  ReplicateOptions opts;
  opts.n_replicates = cfg.experiment.replicates;
  opts.master_seed = cfg.seed;
  opts.scenario = scenario_from(cfg, net);
  const ReplicateStats stats =
      run_replicates(net, cfg.mobility.gen, cfg.params, observed, opts);
  fs::create_directories(cfg.output_dir);
  save_replicate_stats_csv(
      stats, (fs::path(cfg.output_dir) / "replicate_stats.csv").string());
  save_replicate_summary_csv(
      stats, (fs::path(cfg.output_dir) / "replicate_summary.csv").string());
  write_manifest(cfg, "replicates");
  std::cout << "replicates: " << opts.n_replicates << ", network max SD "
            << format_double(stats.network_summary.max_sd) << " ("
            << format_double(stats.network_summary.pct_of_population)
            << "% of population)\n";
  return 0;
}

int cmd_metrics(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  const PatchNetwork net = build_network(cfg, warnings);
  print_warnings(warnings);
  std::vector<std::pair<int, int>> mosq_links;
  mosq_links.reserve(net.edges.size());
  for (const auto& e : net.edges) mosq_links.emplace_back(e.i, e.j);
  GraphMetricsOptions gopts;
  const GraphMetrics mosq = graph_metrics(mosq_links, net.node_count(), gopts);

  std::optional<GraphMetrics> human;
  if (cfg.mobility.file || net.node_count() >= 2) {
    const TravelMatrices tm = obtain_mobility(cfg, net, warnings);
    human = graph_metrics(travel_links(tm), net.node_count(), gopts);
  }

  auto print = [](const char* name, const GraphMetrics& m) {
    std::cout << name << ":\n"
              << "  number of nodes   " << m.node_count << "\n"
              << "  number of links   " << m.link_count << "\n"
              << "  average degree    " << format_double(m.average_degree) << "\n"
              << "  connectivity      "
              << (m.connected_component_count == 1
                      ? "yes"
                      : "no (" + std::to_string(m.connected_component_count) +
                            " connected components)")
              << "\n"
              << "  diameter          "
              << (m.diameter ? std::to_string(*m.diameter) : std::string("n/a"))
              << (m.connected_component_count > 1 ? " (for the biggest component)" : "")
              << "\n";
  };
  print("mosquito graph", mosq);
  if (human) print("human graph", *human);

  fs::create_directories(cfg.output_dir);
  CsvWriter w((fs::path(cfg.output_dir) / "metrics.csv").string(),
              {"graph", "node_count", "link_count", "average_degree",
               "connected_components", "diameter"});
  auto emit = [&](const std::string& name, const GraphMetrics& m) {
    w.begin_row();
    w.field(name);
    w.field(static_cast<long long>(m.node_count));
    w.field(static_cast<long long>(m.link_count));
    w.field(m.average_degree);
    w.field(static_cast<long long>(m.connected_component_count));
    w.field(m.diameter ? std::to_string(*m.diameter) : std::string());
    w.end_row();
  };
  emit("mosquito", mosq);
  if (human) emit("human", *human);
  write_manifest(cfg, "metrics");
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  if (!cfg.experiment.reference_file || !cfg.experiment.simulated_file) {
    throw std::invalid_argument(
        "config: compare needs experiment.reference_file and simulated_file");
  }
  const Trajectory sim =
      load_timeseries_csv(cfg.resolve_path(*cfg.experiment.simulated_file));
  const TimeseriesComparison cmp =
      compare_timeseries(sim, cfg.resolve_path(*cfg.experiment.reference_file));
  fs::create_directories(cfg.output_dir);
  CsvWriter w((fs::path(cfg.output_dir) / "compare.csv").string(),
              {"rmse", "peak_time_offset_days", "final_seroprevalence_gap"});
  w.begin_row();
  w.field(cmp.rmse);
  w.field(cmp.peak_time_offset_days);
  w.field(cmp.final_seroprevalence_gap);
  w.end_row();
  write_manifest(cfg, "compare");
  std::cout << "rmse " << format_double(cmp.rmse) << ", peak offset "
            << format_double(cmp.peak_time_offset_days) << " days, sero gap "
            << format_double(cmp.final_seroprevalence_gap) << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  int failures = 0;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!pass) ++failures;
  };
  const ModelParams& p = cfg.params;

  // vector endemic equilibrium is a stationary point
  {
    const auto eq = vector_endemic_equilibrium(p, p.k_e, p.k_l);
    PatchState st;
    st.e = eq.e;
    st.l = eq.l;
    st.a = eq.a;
    st.s_m = eq.a;
    st.s_h = 1000;
    const PatchState dx = single_patch_rhs(st, p);
    const double scale = std::max({eq.e, eq.l, eq.a, 1.0});
    const double res =
        std::max({std::abs(dx.e), std::abs(dx.l), std::abs(dx.a)}) / scale;
    report("endemic equilibrium residual < 1e-10", res < 1e-10,
           "residual " + format_double(res));
  }

  // synthetic island shared by the network checks
  SynthIslandConfig synth;
  synth.node_count = cfg.experiment.verify_nodes;
  synth.width_m = 6000;
  synth.height_m = 6000;
  synth.population_total = 400 * synth.node_count;
  synth.cluster_count = 5;
  synth.seed = cfg.seed;
  synth.d_max_m = cfg.network.d_max_m;
  const PatchNetwork net = synthesize_island(synth, p);
  MobilityGenConfig gen = cfg.mobility.gen;
  gen.destinations_per_node = std::min(gen.destinations_per_node, net.node_count() - 1);
  const TravelMatrices tm = generate_mobility(net, gen);
  NetworkModel model(net, tm, engine_options_from(cfg));

  // DFE stationarity
  {
    const NetworkState dfe = model.dfe(p);
    NetworkState dx(model.layout_ptr());
    model.rhs(dfe, p, dx);
    double max_res = 0;
    for (double v : dx.raw()) max_res = std::max(max_res, std::abs(v));
    report("network DFE residual < 1e-10", max_res < 1e-10,
           "max |rhs| " + format_double(max_res));
  }

  // conservation and positivity over a seeded run
  {
    ModelParams pe = p;
    if (pe.beta_h == 0 && pe.beta_m == 0) {
      pe.beta_h = 0.2;  // exercise the infection terms
      pe.beta_m = 0.15;
    }
    NetworkState state = model.dfe(pe);
    const int seed_node = pick_seed_node(cfg, net);
    seed_infection(state, seed_node, 1);
    const auto before = state.resident_totals();
    IntegrateOptions integ;
    integ.t0 = 0;
    integ.t1 = 400;
    integ.h = cfg.integrator.h;
    integ.output_interval = 50;
    Trajectory traj;
    NetworkState final_state(model.layout_ptr());
    integ.on_output = [&](double, const NetworkState& x) { final_state = x; };
    traj = integrate(model, std::move(state), pe, EventSpec{}, integ);
    const auto after = final_state.resident_totals();
    double drift = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i] > 0) {
        drift = std::max(drift, std::abs(after[i] - before[i]) / before[i]);
      }
    }
    report("resident totals drift < 1e-9 over 400 days", drift < 1e-9,
           "max relative drift " + format_double(drift));
    report("pre-clamp undershoot > -1e-12", traj.min_preclamp > -1e-12,
           "min " + format_double(traj.min_preclamp));
  }

  // endemic/extinct regimes of the network (theorem properties, executable)
  {
    // ring travel graph: strongly connected
    const int n_ring = 20;
    PatchNetwork ring;
    ring.d_max_m = 200;
    for (int i = 0; i < n_ring; ++i) {
      ring.nodes.push_back({i, 1000.0 * i, 0.0, 500.0, 0, 0, 0});
    }
    finalize_network(ring, p);
    std::vector<std::vector<int>> dests(n_ring);
    for (int i = 0; i < n_ring; ++i) dests[i] = {(i + 1) % n_ring};
    MobilityGenConfig ring_cfg;
    ring_cfg.leave_rate = 0.3;
    ring_cfg.return_rate = 1.0;
    const TravelMatrices ring_tm = build_travel_matrices(dests, ring_cfg, n_ring);
    NetworkModel ring_model(ring, ring_tm);

    ModelParams sub = p;
    sub.beta_h = 0.01;
    sub.beta_m = 0.01;
    NetworkState state = ring_model.dfe(sub);
    seed_infection(state, 0, 5);
    IntegrateOptions integ;
    integ.t1 = 400;
    integ.h = 0.05;
    integ.output_interval = 400;
    NetworkState final_state(ring_model.layout_ptr());
    integ.on_output = [&](double, const NetworkState& x) { final_state = x; };
    integrate(ring_model, std::move(state), sub, EventSpec{}, integ);
    double worst = 0;
    const auto present_i = final_state.present_infected();
    for (int i = 0; i < n_ring; ++i) {
      worst = std::max({worst, present_i[i], final_state.i_m(i)});
    }
    report("subcritical run returns every node to the DFE (< 1e-8)", worst < 1e-8,
           "max infection " + format_double(worst));

    ModelParams super = p;
    super.beta_h = 0.5;
    super.beta_m = 0.5;
    state = ring_model.dfe(super);
    seed_infection(state, 0, 5);
    integ.t1 = 150;
    integ.output_interval = 150;
    integrate(ring_model, std::move(state), super, EventSpec{}, integ);
    double least = std::numeric_limits<double>::infinity();
    const auto present_i2 = final_state.present_infected();
    for (int i = 0; i < n_ring; ++i) least = std::min(least, present_i2[i]);
    report("supercritical run reaches every travel-reachable node (> 1e-6)",
           least > 1e-6, "min present infection " + format_double(least));
  }

  fs::create_directories(cfg.output_dir);
  write_manifest(cfg, "verify");
  std::cout << (failures == 0 ? "verify: all checks passed\n"
                              : "verify: " + std::to_string(failures) +
                                    " check(s) failed\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int dispatch(const std::string& subcommand, const RunConfig& cfg) {
  if (subcommand == "build") return cmd_build(cfg);
  if (subcommand == "gen-mobility") return cmd_gen_mobility(cfg);
  if (subcommand == "simulate") return cmd_simulate(cfg);
  if (subcommand == "sweep") return cmd_sweep(cfg);
  if (subcommand == "quarantine") return cmd_quarantine(cfg);
  if (subcommand == "replicates") return cmd_replicates(cfg);
  if (subcommand == "metrics") return cmd_metrics(cfg);
  if (subcommand == "compare") return cmd_compare(cfg);
  if (subcommand == "verify") return cmd_verify(cfg);
  throw std::invalid_argument("unknown subcommand: " + subcommand);
}

}  // namespace metapop
