#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metapop/network.hpp"
#include "metapop/rng.hpp"
#include "metapop/state.hpp"

namespace metapop {

// Sparse origin-destination travel-rate tables, CSR over origins with the
// destination lists in Zipf rank order. Departures (g_i * m_ji) and returns
// (r_ij) share this one sparsity pattern; diagonals are never stored.
struct TravelMatrices {
  int n = 0;
  std::vector<int> row_ptr;        // n + 1
  std::vector<int> dest;           // destination node per stored pair
  std::vector<double> depart;      // g_i * m_ji, per day
  std::vector<double> ret;         // r_ij, per day
  std::vector<double> leave_rate;  // realized g_i (row sum of depart)

  std::size_t pair_count() const { return dest.size(); }
  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct MobilityGenConfig {
  double delta_r0_km = 1.5;      // trip-length law cutoff
  double kappa_km = 80.0;        // exponential tail scale
  double power_beta = 1.75;      // power-law exponent (free calibration knob;
                                 // the source analysis does not pin it)
  int destinations_per_node = 20;
  double leave_rate = 0.2;       // g, per day (free calibration knob)
  double return_rate = 1.0;      // r_ij, per day; daily-return pattern
  std::uint64_t seed = 0;

  void validate() const;
};

// Trip-length sampler for P(dr) ~ (dr + dr0)^-beta * exp(-dr / kappa) on
// (0, inf), via inverse CDF on a tabulated numeric integral: 2^14 knots,
// log-spaced out to 5 kappa, linear interpolation.
class TripLengthSampler {
 public:
  explicit TripLengthSampler(const MobilityGenConfig& cfg);
  double sample(Rng& rng) const;  // km, always > 0

 private:
  std::vector<double> x_;    // knots, km
  std::vector<double> cdf_;  // normalized cumulative mass at knots
};

double sample_trip_length(Rng& rng, const MobilityGenConfig& cfg);

// Zipf presence probabilities by rank: f(k) = (1/k) / H_n, k = 1..n.
std::vector<double> zipf_presence(int n);

// Ranked destination lists, one per origin: repeatedly sample a trip length
// and pick the node whose distance is nearest to it, resampling duplicates
// (capped, then nearest unused node). Per-origin RNG streams are derived
// from cfg.seed by node id, so results are schedule-independent.
std::vector<std::vector<int>> generate_destinations(
    const PatchNetwork& net, const MobilityGenConfig& cfg,
    std::vector<std::string>* warnings = nullptr);

// m_ji = Zipf weight of rank-j in i's list, g_i = cfg.leave_rate,
// r_ij = cfg.return_rate on the same pattern. leave_rate == 0 produces empty
// matrices (fully sedentary population).
TravelMatrices build_travel_matrices(const std::vector<std::vector<int>>& destinations,
                                     const MobilityGenConfig& cfg, int node_count);

TravelMatrices generate_mobility(const PatchNetwork& net,
                                 const MobilityGenConfig& cfg,
                                 std::vector<std::string>* warnings = nullptr);

// mobility.csv: header origin,dest,depart_rate,return_rate, one row per
// stored pair, grouped by origin in rank order.
TravelMatrices load_mobility_csv(const std::string& path, int node_count);
void save_mobility_csv(const TravelMatrices& tm, const std::string& path);

// Undirected node pairs of the human travel graph (for graph metrics).
std::vector<std::pair<int, int>> travel_links(const TravelMatrices& tm);

// Disease-free equilibrium of the network system: closed-form susceptible
// occupancy over the stored OD pairs, zero infection everywhere, and the
// per-node vector endemic equilibrium (E*, L*, S_m* = A*, I_m* = 0).
NetworkState network_dfe(const PatchNetwork& net, const TravelMatrices& tm,
                         const ModelParams& p);

}  // namespace metapop
