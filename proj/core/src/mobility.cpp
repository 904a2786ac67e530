#include "metapop/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "metapop/csv.hpp"
#include "metapop/patch_model.hpp"

namespace metapop {

void TravelMatrices::validate() const {
  if (static_cast<int>(row_ptr.size()) != n + 1) {
    throw std::invalid_argument("TravelMatrices: row_ptr size mismatch");
  }
  if (dest.size() != depart.size() || dest.size() != ret.size()) {
    throw std::invalid_argument("TravelMatrices: column arrays differ in length");
  }
  if (static_cast<int>(leave_rate.size()) != n) {
    throw std::invalid_argument("TravelMatrices: leave_rate size mismatch");
  }
  for (int i = 0; i < n; ++i) {
    std::set<int> seen;
    for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
      if (dest[q] == i) throw std::invalid_argument("TravelMatrices: diagonal entry stored");
      if (dest[q] < 0 || dest[q] >= n) {
        throw std::invalid_argument("TravelMatrices: destination out of range");
      }
      if (!seen.insert(dest[q]).second) {
        throw std::invalid_argument("TravelMatrices: duplicate destination in a row");
      }
      if (!(depart[q] >= 0) || !(ret[q] >= 0)) {
        throw std::invalid_argument("TravelMatrices: negative rate");
      }
    }
  }
}

void MobilityGenConfig::validate() const {
  if (!(delta_r0_km > 0)) throw std::invalid_argument("mobility: delta_r0_km must be > 0");
  if (!(kappa_km > 0)) throw std::invalid_argument("mobility: kappa_km must be > 0");
  if (!(power_beta > 0)) throw std::invalid_argument("mobility: power_beta must be > 0");
  if (destinations_per_node < 1) {
    throw std::invalid_argument("mobility: destinations_per_node must be >= 1");
  }
  if (!(leave_rate >= 0)) throw std::invalid_argument("mobility: leave_rate must be >= 0");
  if (!(return_rate >= 0)) throw std::invalid_argument("mobility: return_rate must be >= 0");
}

TripLengthSampler::TripLengthSampler(const MobilityGenConfig& cfg) {
  cfg.validate();
  const int knots = 1 << 14;
  const double x_max = 5.0 * cfg.kappa_km;
  const double x_min = cfg.delta_r0_km * 1e-4;
  x_.resize(knots);
  cdf_.resize(knots);
  x_[0] = 0.0;
  const double log_lo = std::log(x_min);
  const double log_hi = std::log(x_max);
  for (int k = 1; k < knots; ++k) {
    x_[k] = std::exp(log_lo + (log_hi - log_lo) * double(k - 1) / double(knots - 2));
  }
  auto density = [&](double x) {
    return std::pow(x + cfg.delta_r0_km, -cfg.power_beta) * std::exp(-x / cfg.kappa_km);
  };
  cdf_[0] = 0.0;
  for (int k = 1; k < knots; ++k) {
    cdf_[k] = cdf_[k - 1] +
              (x_[k] - x_[k - 1]) * 0.5 * (density(x_[k]) + density(x_[k - 1]));
  }
  const double total = cdf_.back();
  for (auto& c : cdf_) c /= total;
}

double TripLengthSampler::sample(Rng& rng) const {
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);  // keep samples strictly positive
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t hi = std::min(std::size_t(it - cdf_.begin()), cdf_.size() - 1);
  const std::size_t lo = hi - 1;
  const double span = cdf_[hi] - cdf_[lo];
  const double t = span > 0 ? (u - cdf_[lo]) / span : 0.5;
  const double x = x_[lo] + t * (x_[hi] - x_[lo]);
  return x > 0 ? x : x_[1] * 0.5;
}

double sample_trip_length(Rng& rng, const MobilityGenConfig& cfg) {
  return TripLengthSampler(cfg).sample(rng);
}

std::vector<double> zipf_presence(int n) {
  if (n < 1) throw std::invalid_argument("zipf_presence: n must be >= 1");
  double harmonic = 0;
  for (int k = 1; k <= n; ++k) harmonic += 1.0 / k;
  std::vector<double> out(n);
  for (int k = 1; k <= n; ++k) out[k - 1] = (1.0 / k) / harmonic;
  return out;
}

std::vector<std::vector<int>> generate_destinations(
    const PatchNetwork& net, const MobilityGenConfig& cfg,
    std::vector<std::string>* warnings) {
  cfg.validate();
  const int n = net.node_count();
  if (n < 2) {
    throw std::invalid_argument("generate_destinations: network needs >= 2 nodes");
  }
  const TripLengthSampler sampler(cfg);
  const auto pts = net.coordinates();
  std::vector<std::vector<int>> lists(n);
  const int want = cfg.destinations_per_node;
  const int reachable = n - 1;
  const int per_node = std::min(want, reachable);
  if (per_node < want && warnings) {
    warnings->push_back("mobility: only " + std::to_string(reachable) +
                        " distinct destinations reachable; truncating lists to " +
                        std::to_string(per_node));
  }

#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(cfg.seed, std::uint64_t(i)));
    // all other nodes sorted by distance; ties broken by node id
    std::vector<std::pair<double, int>> by_dist;
    by_dist.reserve(reachable);
    for (int j = 0; j < n; ++j) {
      if (j != i) by_dist.emplace_back(dist(pts[i], pts[j]), j);
    }
    std::sort(by_dist.begin(), by_dist.end());

    std::vector<char> used(n, 0);
    auto nearest_to = [&](double target_m) {
      auto it = std::lower_bound(
          by_dist.begin(), by_dist.end(), std::make_pair(target_m, -1));
      if (it == by_dist.end()) return it - 1;
      if (it == by_dist.begin()) return it;
      auto prev = it - 1;
      return (target_m - prev->first <= it->first - target_m) ? prev : it;
    };
    auto nearest_unused = [&](double target_m) -> int {
      const auto center = nearest_to(target_m);
      std::ptrdiff_t lo = center - by_dist.begin();
      std::ptrdiff_t hi = lo + 1;
      while (lo >= 0 || hi < std::ptrdiff_t(by_dist.size())) {
        const bool lo_ok = lo >= 0;
        const bool hi_ok = hi < std::ptrdiff_t(by_dist.size());
        bool take_lo;
        if (lo_ok && hi_ok) {
          take_lo = std::abs(by_dist[lo].first - target_m) <=
                    std::abs(by_dist[hi].first - target_m);
        } else {
          take_lo = lo_ok;
        }
        const std::ptrdiff_t k = take_lo ? lo : hi;
        if (!used[by_dist[k].second]) return by_dist[k].second;
        if (take_lo) --lo; else ++hi;
      }
      return -1;
    };

    auto& list = lists[i];
    list.reserve(per_node);
    for (int rank = 0; rank < per_node; ++rank) {
      int chosen = -1;
      double last_target = 0;
      for (int attempt = 0; attempt < 50; ++attempt) {
        last_target = sampler.sample(rng) * 1000.0;  // km -> m
        const int cand = nearest_to(last_target)->second;
        if (!used[cand]) {
          chosen = cand;
          break;
        }
      }
      if (chosen < 0) chosen = nearest_unused(last_target);
      if (chosen < 0) break;  // everything used
      used[chosen] = 1;
      list.push_back(chosen);
    }
  }
  return lists;
}

TravelMatrices build_travel_matrices(
    const std::vector<std::vector<int>>& destinations,
    const MobilityGenConfig& cfg, int node_count) {
  TravelMatrices tm;
  tm.n = node_count;
  tm.row_ptr.assign(node_count + 1, 0);
  tm.leave_rate.assign(node_count, 0.0);
  if (static_cast<int>(destinations.size()) != node_count) {
    throw std::invalid_argument("build_travel_matrices: one list per node required");
  }
  if (cfg.leave_rate == 0) return tm;  // sedentary: empty pattern
  for (int i = 0; i < node_count; ++i) {
    const auto& list = destinations[i];
    tm.row_ptr[i + 1] = tm.row_ptr[i] + static_cast<int>(list.size());
    if (list.empty()) continue;
    const auto weights = zipf_presence(static_cast<int>(list.size()));
    double realized = 0;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (list[k] == i) {
        throw std::invalid_argument("build_travel_matrices: self-destination");
      }
      const double rate = cfg.leave_rate * weights[k];
      tm.dest.push_back(list[k]);
      tm.depart.push_back(rate);
      tm.ret.push_back(cfg.return_rate);
      realized += rate;
    }
    // realized row sum, so sum_j m_ji == 1 holds exactly
    tm.leave_rate[i] = realized;
  }
  return tm;
}

TravelMatrices generate_mobility(const PatchNetwork& net,
                                 const MobilityGenConfig& cfg,
                                 std::vector<std::string>* warnings) {
  const auto lists = generate_destinations(net, cfg, warnings);
  return build_travel_matrices(lists, cfg, net.node_count());
}

TravelMatrices load_mobility_csv(const std::string& path, int node_count) {
  const CsvTable t = read_csv(path);
  const int c_o = t.require_column("origin");
  const int c_d = t.require_column("dest");
  const int c_dep = t.require_column("depart_rate");
  const int c_ret = t.require_column("return_rate");
  // preserve within-origin row order (rank order); origins may appear in any
  // order in the file
  std::vector<std::vector<std::pair<int, std::pair<double, double>>>> rows(node_count);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto o = parse_int_field(t.rows[r][c_o], t, r, c_o);
    const auto d = parse_int_field(t.rows[r][c_d], t, r, c_d);
    if (o < 0 || o >= node_count || d < 0 || d >= node_count) {
      throw std::invalid_argument(path + ":" + std::to_string(t.line_numbers[r]) +
                                  ": node index out of range");
    }
    const double dep = parse_double_field(t.rows[r][c_dep], t, r, c_dep);
    const double rr = parse_double_field(t.rows[r][c_ret], t, r, c_ret);
    rows[o].push_back({static_cast<int>(d), {dep, rr}});
  }
  TravelMatrices tm;
  tm.n = node_count;
  tm.row_ptr.assign(node_count + 1, 0);
  tm.leave_rate.assign(node_count, 0.0);
  for (int i = 0; i < node_count; ++i) {
    tm.row_ptr[i + 1] = tm.row_ptr[i] + static_cast<int>(rows[i].size());
    double realized = 0;
    for (const auto& [d, rates] : rows[i]) {
      tm.dest.push_back(d);
      tm.depart.push_back(rates.first);
      tm.ret.push_back(rates.second);
      realized += rates.first;
    }
    tm.leave_rate[i] = realized;
  }
  tm.validate();
  return tm;
}

void save_mobility_csv(const TravelMatrices& tm, const std::string& path) {
  CsvWriter w(path, {"origin", "dest", "depart_rate", "return_rate"});
  for (int i = 0; i < tm.n; ++i) {
    for (int q = tm.row_ptr[i]; q < tm.row_ptr[i + 1]; ++q) {
      w.begin_row();
      w.field(i);
      w.field(tm.dest[q]);
      w.field(tm.depart[q]);
      w.field(tm.ret[q]);
      w.end_row();
    }
  }
}

std::vector<std::pair<int, int>> travel_links(const TravelMatrices& tm) {
  std::vector<std::pair<int, int>> links;
  links.reserve(tm.pair_count());
  for (int i = 0; i < tm.n; ++i) {
    for (int q = tm.row_ptr[i]; q < tm.row_ptr[i + 1]; ++q) {
      links.emplace_back(i, tm.dest[q]);
    }
  }
  return links;
}

NetworkState network_dfe(const PatchNetwork& net, const TravelMatrices& tm,
                         const ModelParams& p) {
  if (net.node_count() != tm.n) {
    throw std::invalid_argument("network_dfe: network/matrices size mismatch");
  }
  NetworkState state(make_layout(tm));
  const auto& lay = state.layout();
  for (int i = 0; i < tm.n; ++i) {
    // susceptible occupancy: S_ii* = N_i^r / (1 + g_i sum_k m_ki/(d_H + r_ik))
    double denom_sum = 0;
    for (int q = tm.row_ptr[i]; q < tm.row_ptr[i + 1]; ++q) {
      const double dr = p.b_h + tm.ret[q];
      if (!(dr > 0)) {
        throw std::invalid_argument(
            "network_dfe: d_H + r_ij must be > 0 on stored pair (" +
            std::to_string(i) + ", " + std::to_string(tm.dest[q]) + ")");
      }
      // g_i * m_ji equals the stored departure rate
      denom_sum += tm.depart[q] / dr;
    }
    const double s_ii = net.nodes[i].population / (1.0 + denom_sum);
    state.s_h(lay.diagonal_pair(i)) = s_ii;
    for (int q = tm.row_ptr[i]; q < tm.row_ptr[i + 1]; ++q) {
      const int pair = lay.diagonal_pair(i) + 1 + (q - tm.row_ptr[i]);
      state.s_h(pair) = tm.depart[q] / (p.b_h + tm.ret[q]) * s_ii;
    }
    // vector compartments at the endemic equilibrium of this node
    const auto eq = vector_endemic_equilibrium(p, net.nodes[i].k_e, net.nodes[i].k_l);
    state.e(i) = eq.e;
    state.l(i) = eq.l;
    state.s_m(i) = eq.a;  // all adults susceptible at the DFE
    state.i_m(i) = 0.0;
  }
  return state;
}

}  // namespace metapop
