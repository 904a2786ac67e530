#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "metapop/mobility.hpp"
#include "metapop/network.hpp"
#include "metapop/state.hpp"

namespace metapop {

struct QuarantineSpec {
  double threshold = 1.0;           // present-infection fraction triggering it
  double check_interval_days = 1.0;
};

struct MutationSpec {
  double time_days = 0.0;  // from this time on (closed boundary) ...
  double beta_h = 0.0;     // ... these infection rates replace the originals
  double beta_m = 0.0;
};

struct EventSpec {
  std::optional<QuarantineSpec> quarantine;
  std::optional<MutationSpec> mutation;

  void validate() const;
};

// Returns params with (beta_h, beta_m) switched once t >= mutation time.
ModelParams apply_mutation(const ModelParams& p,
                           const std::optional<MutationSpec>& mutation, double t);

// Non-destructive quarantine mask: every departure and return rate crossing
// the boundary of a node whose infection fraction reaches the threshold is
// zeroed; the kernel graph is untouched (mosquitoes are not stopped).
TravelMatrices apply_quarantine(const TravelMatrices& tm,
                                std::span<const double> infection_fraction,
                                double threshold);

// Moves `count` humans from S_H(node,node) to I_H(node,node).
void seed_infection(NetworkState& state, int node, double count);

struct Observables {
  double s_h = 0, i_h = 0, r_h = 0;      // human totals
  double s_m = 0, i_m = 0, e = 0, l = 0; // mosquito totals
  double seroprevalence = 0;             // ever infected: I_H + R_H
};

struct AggregateObservables {
  Observables totals;
  std::vector<double> i_h_present;        // per node
  std::vector<double> infection_fraction; // per node, I_H^p / N_H^p
};

AggregateObservables aggregate_observables(const NetworkState& state);

enum class AquaticMode {
  dynamic,  // E and L integrate alongside the rest
  frozen,   // E and L held fixed (initialize L at L* for the classic variant)
};

struct EngineOptions {
  AquaticMode aquatic_mode = AquaticMode::dynamic;
  bool normalize_kernel = false;  // divide kernel weights by the
                                  // closed-neighborhood weight sum
};

class RhsWorkspace;

// The network dynamical system: state layout, kernel adjacency and per-node
// capacities bound together. Immutable after construction; one model may be
// shared by any number of concurrent runs.
class NetworkModel {
 public:
  NetworkModel(const PatchNetwork& net, const TravelMatrices& tm,
               EngineOptions opts = {});

  const StateLayout& layout() const { return *layout_; }
  std::shared_ptr<const StateLayout> layout_ptr() const { return layout_; }
  const TravelMatrices& matrices() const { return matrices_; }
  const PatchNetwork& network() const { return network_; }
  const EngineOptions& options() const { return opts_; }

  NetworkState dfe(const ModelParams& p) const;

  // Derivative of the full system into dx. The depart/ret spans override the
  // stored rates (quarantine masking); they must align with the matrices'
  // pair arrays.
  void rhs(const NetworkState& x, const ModelParams& p,
           std::span<const double> depart, std::span<const double> ret,
           NetworkState& dx, RhsWorkspace& ws) const;
  void rhs(const NetworkState& x, const ModelParams& p, NetworkState& dx) const;

  // Directed travel reachability from a node (departure arcs).
  std::vector<char> travel_reachable(int from) const;

 private:
  PatchNetwork network_;
  TravelMatrices matrices_;
  std::shared_ptr<const StateLayout> layout_;
  EngineOptions opts_;
  // kernel adjacency CSR (both directions), neighbor-sorted
  std::vector<int> kadj_ptr_, kadj_;
  std::vector<double> kweight_;
  std::vector<double> knorm_;  // closed-neighborhood weight sums
  std::vector<double> cap_e_, cap_l_, node_pop_;

  friend class RhsWorkspace;
};

class RhsWorkspace {
 public:
  explicit RhsWorkspace(const NetworkModel& model);

 private:
  friend class NetworkModel;
  std::vector<double> present_n_, present_i_, resident_, out_rate_;
  std::vector<double> w_, v_;  // kernel-weighted infection pressures
};

struct NodeObservation {
  double s_h_present = 0, i_h_present = 0, infection_fraction = 0;
  double s_m = 0, i_m = 0, e = 0, l = 0;
};

struct TrajectoryPoint {
  double t = 0;
  Observables totals;
  std::vector<NodeObservation> observed;
};

struct Trajectory {
  std::vector<int> observed_nodes;
  std::vector<TrajectoryPoint> points;
  double min_preclamp = 0;  // most negative pre-clamp value seen in the run

  std::vector<double> times() const;
  std::vector<double> total_i_h() const;
  std::vector<double> seroprevalence() const;
  std::vector<double> observed_i_h(std::size_t observed_index) const;
};

struct IntegrateOptions {
  double t0 = 0;
  double t1 = 400;
  double h = 0.05;
  double output_interval = 1.0;
  std::vector<int> observed_nodes;
  // called at every output point (after recording); used for snapshot dumps
  std::function<void(double, const NetworkState&)> on_output;

  void validate() const;
};

// Classical fixed-step RK4 advance. Events apply at step boundaries only:
// the mutation switch at its time, quarantine re-masked every check
// interval. Negative undershoot is clamped to zero after each step.
// Non-finite values abort with a diagnostic naming time, node, compartment.
Trajectory integrate(const NetworkModel& model, NetworkState state,
                     const ModelParams& p, const EventSpec& events,
                     const IntegrateOptions& opts);

// Thrown when a run must stop (non-finite state).
class simulation_abort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// timeseries.csv: t_days,S_H,I_H,R_H,S_m,I_m,E,L,seroprevalence
void save_timeseries_csv(const Trajectory& traj, const std::string& path);
Trajectory load_timeseries_csv(const std::string& path);  // totals only
// per-node snapshot: node_id,I_H_present,infection_fraction,S_m,I_m,E,L
void save_snapshot_csv(const NetworkState& state, const std::string& path);

}  // namespace metapop
