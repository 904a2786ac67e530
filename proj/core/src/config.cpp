#include "metapop/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "detail/key_suggest.hpp"

namespace metapop {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

// Walks one JSON object, rejecting keys outside `allowed`.
void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  std::vector<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument(detail::unknown_key_message(where, key, known));
    }
  }
}

double get_number(const json& obj, const std::string& where, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
  return obj[key].get<double>();
}

long long get_integer(const json& obj, const std::string& where, const char* key,
                      long long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) fail(where + "." + key, "expected an integer");
  return obj[key].get<long long>();
}

bool get_bool(const json& obj, const std::string& where, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) fail(where + "." + key, "expected a boolean");
  return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) fail(where + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

std::vector<double> get_number_list(const json& obj, const std::string& where,
                                    const char* key,
                                    const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_array()) fail(where + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) fail(where + "." + key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> get_int_list(const json& obj, const std::string& where,
                              const char* key, const std::vector<int>& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_array()) fail(where + "." + key, "expected an array of integers");
  std::vector<int> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number_integer()) fail(where + "." + key, "expected an array of integers");
    out.push_back(v.get<int>());
  }
  return out;
}

ModelParams parse_params_object(const json& obj, const std::string& where) {
  check_keys(obj, where,
             {"b", "k_e", "k_l", "s", "s_l", "d", "d_l", "d_m", "b_h", "gamma_h",
              "beta_h", "beta_m"});
  ModelParams p;
  p.b = get_number(obj, where, "b", p.b);
  p.k_e = get_number(obj, where, "k_e", p.k_e);
  p.k_l = get_number(obj, where, "k_l", p.k_l);
  p.s = get_number(obj, where, "s", p.s);
  p.s_l = get_number(obj, where, "s_l", p.s_l);
  p.d = get_number(obj, where, "d", p.d);
  p.d_l = get_number(obj, where, "d_l", p.d_l);
  p.d_m = get_number(obj, where, "d_m", p.d_m);
  p.b_h = get_number(obj, where, "b_h", p.b_h);
  p.gamma_h = get_number(obj, where, "gamma_h", p.gamma_h);
  p.beta_h = get_number(obj, where, "beta_h", p.beta_h);
  p.beta_m = get_number(obj, where, "beta_m", p.beta_m);
  p.validate();
  return p;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json params_to_json(const ModelParams& p) {
  return json{{"b", p.b},     {"k_e", p.k_e},     {"k_l", p.k_l},
              {"s", p.s},     {"s_l", p.s_l},     {"d", p.d},
              {"d_l", p.d_l}, {"d_m", p.d_m},     {"b_h", p.b_h},
              {"gamma_h", p.gamma_h}, {"beta_h", p.beta_h}, {"beta_m", p.beta_m}};
}

}  // namespace

std::string RunConfig::resolve_path(const std::string& rel) const {
  std::filesystem::path p(rel);
  if (p.is_absolute() || base_dir.empty()) return rel;
  return (std::filesystem::path(base_dir) / p).string();
}

RunConfig parse_config_text(const std::string& text, const std::string& origin,
                            const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  if (!doc.is_object()) fail(origin, "top level must be an object");
  check_keys(doc, origin,
             {"seed", "params", "params_file", "network", "mobility", "integrator",
              "seeding", "events", "experiment", "output_dir"});

  RunConfig cfg;
  cfg.base_dir = base_dir;

  if (!doc.contains("seed")) {
    fail(origin, "missing required key 'seed' (runs must be reproducible)");
  }
  if (!doc["seed"].is_number_integer()) fail(origin + ".seed", "expected an integer");
  cfg.seed = doc["seed"].get<std::uint64_t>();

  if (doc.contains("params") && doc.contains("params_file")) {
    fail(origin, "give either 'params' or 'params_file', not both");
  }
  if (doc.contains("params_file")) {
    if (!doc["params_file"].is_string()) fail(origin + ".params_file", "expected a string");
    const std::string path = cfg.resolve_path(doc["params_file"].get<std::string>());
    if (!std::filesystem::exists(path)) fail(origin + ".params_file", "file not found: " + path);
    cfg.params = load_params(path);
  } else if (doc.contains("params")) {
    if (!doc["params"].is_object()) fail(origin + ".params", "expected an object");
    cfg.params = parse_params_object(doc["params"], origin + ".params");
  }

  if (doc.contains("network")) {
    const json& net = doc["network"];
    if (!net.is_object()) fail(origin + ".network", "expected an object");
    const std::string where = origin + ".network";
    check_keys(net, where,
               {"nodes_file", "intersections_file", "cells_file", "synth",
                "d_max_m", "normalize_kernel"});
    cfg.network.d_max_m = get_number(net, where, "d_max_m", cfg.network.d_max_m);
    if (!(cfg.network.d_max_m > 0)) fail(where + ".d_max_m", "must be > 0");
    cfg.network.normalize_kernel =
        get_bool(net, where, "normalize_kernel", cfg.network.normalize_kernel);
    if (net.contains("nodes_file")) {
      cfg.network.nodes_file = get_string(net, where, "nodes_file", "");
    }
    if (net.contains("intersections_file")) {
      cfg.network.intersections_file = get_string(net, where, "intersections_file", "");
    }
    if (net.contains("cells_file")) {
      cfg.network.cells_file = get_string(net, where, "cells_file", "");
    }
    if (net.contains("synth")) {
      const json& sy = net["synth"];
      if (!sy.is_object()) fail(where + ".synth", "expected an object");
      const std::string sw = where + ".synth";
      check_keys(sy, sw,
                 {"node_count", "width_m", "height_m", "population_total",
                  "cluster_count", "seed"});
      SynthIslandConfig s;
      s.node_count = static_cast<int>(get_integer(sy, sw, "node_count", s.node_count));
      s.width_m = get_number(sy, sw, "width_m", s.width_m);
      s.height_m = get_number(sy, sw, "height_m", s.height_m);
      s.population_total = get_integer(sy, sw, "population_total", s.population_total);
      s.cluster_count = static_cast<int>(get_integer(sy, sw, "cluster_count", s.cluster_count));
      s.seed = static_cast<std::uint64_t>(
          get_integer(sy, sw, "seed", static_cast<long long>(cfg.seed)));
      s.d_max_m = cfg.network.d_max_m;
      s.validate();
      cfg.network.synth = s;
    }
    const int sources = int(cfg.network.nodes_file.has_value()) +
                        int(cfg.network.intersections_file.has_value()) +
                        int(cfg.network.synth.has_value());
    if (sources > 1) {
      fail(where, "give exactly one of nodes_file, intersections_file, synth");
    }
    // referenced files must exist now, before any computation
    for (const auto& f : {cfg.network.nodes_file, cfg.network.intersections_file,
                          cfg.network.cells_file}) {
      if (f && !std::filesystem::exists(cfg.resolve_path(*f))) {
        fail(where, "file not found: " + cfg.resolve_path(*f));
      }
    }
  }

  if (doc.contains("mobility")) {
    const json& mob = doc["mobility"];
    if (!mob.is_object()) fail(origin + ".mobility", "expected an object");
    const std::string where = origin + ".mobility";
    check_keys(mob, where,
               {"file", "delta_r0_km", "kappa_km", "power_beta",
                "destinations_per_node", "leave_rate", "return_rate", "seed"});
    if (mob.contains("file")) {
      cfg.mobility.file = get_string(mob, where, "file", "");
      if (!std::filesystem::exists(cfg.resolve_path(*cfg.mobility.file))) {
        fail(where + ".file", "file not found: " + cfg.resolve_path(*cfg.mobility.file));
      }
    }
    auto& g = cfg.mobility.gen;
    g.delta_r0_km = get_number(mob, where, "delta_r0_km", g.delta_r0_km);
    g.kappa_km = get_number(mob, where, "kappa_km", g.kappa_km);
    g.power_beta = get_number(mob, where, "power_beta", g.power_beta);
    g.destinations_per_node = static_cast<int>(
        get_integer(mob, where, "destinations_per_node", g.destinations_per_node));
    g.leave_rate = get_number(mob, where, "leave_rate", g.leave_rate);
    g.return_rate = get_number(mob, where, "return_rate", g.return_rate);
    g.seed = static_cast<std::uint64_t>(
        get_integer(mob, where, "seed", static_cast<long long>(cfg.seed)));
    g.validate();
  } else {
    cfg.mobility.gen.seed = cfg.seed;
  }

  if (doc.contains("integrator")) {
    const json& integ = doc["integrator"];
    if (!integ.is_object()) fail(origin + ".integrator", "expected an object");
    const std::string where = origin + ".integrator";
    check_keys(integ, where,
               {"t0", "t1", "h", "output_interval", "aquatic_mode", "snapshot_times"});
    cfg.integrator.t0 = get_number(integ, where, "t0", cfg.integrator.t0);
    cfg.integrator.t1 = get_number(integ, where, "t1", cfg.integrator.t1);
    cfg.integrator.h = get_number(integ, where, "h", cfg.integrator.h);
    cfg.integrator.output_interval =
        get_number(integ, where, "output_interval", cfg.integrator.output_interval);
    const std::string mode = get_string(integ, where, "aquatic_mode", "dynamic");
    if (mode == "dynamic") {
      cfg.integrator.aquatic_mode = AquaticMode::dynamic;
    } else if (mode == "frozen") {
      cfg.integrator.aquatic_mode = AquaticMode::frozen;
    } else {
      fail(where + ".aquatic_mode", "expected 'dynamic' or 'frozen'");
    }
    cfg.integrator.snapshot_times =
        get_number_list(integ, where, "snapshot_times", {});
    if (!(cfg.integrator.h > 0)) fail(where + ".h", "must be > 0");
    if (!(cfg.integrator.t1 >= cfg.integrator.t0)) fail(where + ".t1", "must be >= t0");
    if (!(cfg.integrator.output_interval > 0)) {
      fail(where + ".output_interval", "must be > 0");
    }
  }

  if (doc.contains("seeding")) {
    const json& sd = doc["seeding"];
    if (!sd.is_object()) fail(origin + ".seeding", "expected an object");
    const std::string where = origin + ".seeding";
    check_keys(sd, where, {"node", "count"});
    cfg.seeding.node = static_cast<int>(get_integer(sd, where, "node", cfg.seeding.node));
    cfg.seeding.count = get_number(sd, where, "count", cfg.seeding.count);
    if (cfg.seeding.count < 0) fail(where + ".count", "must be >= 0");
  }

  if (doc.contains("events")) {
    const json& ev = doc["events"];
    if (!ev.is_object()) fail(origin + ".events", "expected an object");
    const std::string where = origin + ".events";
    check_keys(ev, where, {"quarantine", "mutation"});
    if (ev.contains("quarantine")) {
      const json& q = ev["quarantine"];
      const std::string qw = where + ".quarantine";
      if (!q.is_object()) fail(qw, "expected an object");
      check_keys(q, qw, {"threshold", "check_interval_days"});
      QuarantineSpec spec;
      spec.threshold = get_number(q, qw, "threshold", spec.threshold);
      spec.check_interval_days =
          get_number(q, qw, "check_interval_days", spec.check_interval_days);
      cfg.events.quarantine = spec;
    }
    if (ev.contains("mutation")) {
      const json& m = ev["mutation"];
      const std::string mw = where + ".mutation";
      if (!m.is_object()) fail(mw, "expected an object");
      check_keys(m, mw, {"time_days", "beta_h", "beta_m"});
      MutationSpec spec;
      spec.time_days = get_number(m, mw, "time_days", spec.time_days);
      spec.beta_h = get_number(m, mw, "beta_h", spec.beta_h);
      spec.beta_m = get_number(m, mw, "beta_m", spec.beta_m);
      cfg.events.mutation = spec;
    }
    cfg.events.validate();
  }

  if (doc.contains("experiment")) {
    const json& ex = doc["experiment"];
    if (!ex.is_object()) fail(origin + ".experiment", "expected an object");
    const std::string where = origin + ".experiment";
    check_keys(ex, where,
               {"thresholds", "check_interval_days", "beta_h_values",
                "beta_m_values", "replicates", "observed_nodes", "reference_file",
                "simulated_file", "verify_nodes"});
    cfg.experiment.thresholds =
        get_number_list(ex, where, "thresholds", cfg.experiment.thresholds);
    cfg.experiment.check_interval_days = get_number(
        ex, where, "check_interval_days", cfg.experiment.check_interval_days);
    cfg.experiment.beta_h_values =
        get_number_list(ex, where, "beta_h_values", cfg.experiment.beta_h_values);
    cfg.experiment.beta_m_values =
        get_number_list(ex, where, "beta_m_values", cfg.experiment.beta_m_values);
    cfg.experiment.replicates = static_cast<int>(
        get_integer(ex, where, "replicates", cfg.experiment.replicates));
    cfg.experiment.observed_nodes =
        get_int_list(ex, where, "observed_nodes", cfg.experiment.observed_nodes);
    if (ex.contains("reference_file")) {
      cfg.experiment.reference_file = get_string(ex, where, "reference_file", "");
      if (!std::filesystem::exists(cfg.resolve_path(*cfg.experiment.reference_file))) {
        fail(where + ".reference_file",
             "file not found: " + cfg.resolve_path(*cfg.experiment.reference_file));
      }
    }
    if (ex.contains("simulated_file")) {
      cfg.experiment.simulated_file = get_string(ex, where, "simulated_file", "");
      if (!std::filesystem::exists(cfg.resolve_path(*cfg.experiment.simulated_file))) {
        fail(where + ".simulated_file",
             "file not found: " + cfg.resolve_path(*cfg.experiment.simulated_file));
      }
    }
    cfg.experiment.verify_nodes = static_cast<int>(
        get_integer(ex, where, "verify_nodes", cfg.experiment.verify_nodes));
  }

  cfg.output_dir = get_string(doc, origin, "output_dir", cfg.output_dir);

  // canonical echo with every default materialized
  json echo;
  echo["seed"] = cfg.seed;
  echo["params"] = params_to_json(cfg.params);
  echo["network"] = {{"d_max_m", cfg.network.d_max_m},
                     {"normalize_kernel", cfg.network.normalize_kernel}};
  if (cfg.network.nodes_file) echo["network"]["nodes_file"] = *cfg.network.nodes_file;
  if (cfg.network.intersections_file) {
    echo["network"]["intersections_file"] = *cfg.network.intersections_file;
  }
  if (cfg.network.cells_file) echo["network"]["cells_file"] = *cfg.network.cells_file;
  if (cfg.network.synth) {
    echo["network"]["synth"] = {{"node_count", cfg.network.synth->node_count},
                                {"width_m", cfg.network.synth->width_m},
                                {"height_m", cfg.network.synth->height_m},
                                {"population_total", cfg.network.synth->population_total},
                                {"cluster_count", cfg.network.synth->cluster_count},
                                {"seed", cfg.network.synth->seed}};
  }
  echo["mobility"] = {{"delta_r0_km", cfg.mobility.gen.delta_r0_km},
                      {"kappa_km", cfg.mobility.gen.kappa_km},
                      {"power_beta", cfg.mobility.gen.power_beta},
                      {"destinations_per_node", cfg.mobility.gen.destinations_per_node},
                      {"leave_rate", cfg.mobility.gen.leave_rate},
                      {"return_rate", cfg.mobility.gen.return_rate},
                      {"seed", cfg.mobility.gen.seed}};
  if (cfg.mobility.file) echo["mobility"]["file"] = *cfg.mobility.file;
  echo["integrator"] = {
      {"t0", cfg.integrator.t0},
      {"t1", cfg.integrator.t1},
      {"h", cfg.integrator.h},
      {"output_interval", cfg.integrator.output_interval},
      {"aquatic_mode",
       cfg.integrator.aquatic_mode == AquaticMode::dynamic ? "dynamic" : "frozen"},
      {"snapshot_times", cfg.integrator.snapshot_times}};
  echo["seeding"] = {{"node", cfg.seeding.node}, {"count", cfg.seeding.count}};
  echo["events"] = json::object();
  if (cfg.events.quarantine) {
    echo["events"]["quarantine"] = {
        {"threshold", cfg.events.quarantine->threshold},
        {"check_interval_days", cfg.events.quarantine->check_interval_days}};
  }
  if (cfg.events.mutation) {
    echo["events"]["mutation"] = {{"time_days", cfg.events.mutation->time_days},
                                  {"beta_h", cfg.events.mutation->beta_h},
                                  {"beta_m", cfg.events.mutation->beta_m}};
  }
  echo["experiment"] = {{"thresholds", cfg.experiment.thresholds},
                        {"check_interval_days", cfg.experiment.check_interval_days},
                        {"beta_h_values", cfg.experiment.beta_h_values},
                        {"beta_m_values", cfg.experiment.beta_m_values},
                        {"replicates", cfg.experiment.replicates},
                        {"observed_nodes", cfg.experiment.observed_nodes},
                        {"verify_nodes", cfg.experiment.verify_nodes}};
  if (cfg.experiment.reference_file) {
    echo["experiment"]["reference_file"] = *cfg.experiment.reference_file;
  }
  if (cfg.experiment.simulated_file) {
    echo["experiment"]["simulated_file"] = *cfg.experiment.simulated_file;
  }
  echo["output_dir"] = cfg.output_dir;

  cfg.materialized_json = echo.dump(2);
  std::ostringstream hash;
  hash << std::hex << fnv1a(cfg.materialized_json);
  cfg.config_hash = hash.str();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  const std::string base =
      std::filesystem::path(path).parent_path().string();
  return parse_config_text(text.str(), path, base);
}

}  // namespace metapop
