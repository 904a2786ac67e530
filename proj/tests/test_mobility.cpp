#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "metapop/mobility.hpp"
#include "metapop/patch_model.hpp"
#include "test_util.hpp"
#include "trip_length_oracle.hpp"

using metapop::MobilityGenConfig;
using metapop::PatchNetwork;
using metapop::TravelMatrices;
using testutil::TempDir;
using testutil::TripLengthOracle;

namespace {

PatchNetwork line_network(int n, double spacing_m, double population) {
  PatchNetwork net;
  net.d_max_m = 200;
  for (int i = 0; i < n; ++i) {
    net.nodes.push_back({i, i * spacing_m, 0.0, population, 1e4, 1000, 500});
  }
  return net;
}

}  // namespace

TEST_CASE("trip length sampler against the quadrature oracle") {
  MobilityGenConfig cfg;  // dr0 = 1.5 km, kappa = 80 km, beta = 1.75
  cfg.seed = 42;
  const TripLengthOracle oracle(cfg.delta_r0_km, cfg.power_beta, cfg.kappa_km);
  const metapop::TripLengthSampler sampler(cfg);
  metapop::Rng rng(cfg.seed);
  const std::size_t n = 1'000'000;
  std::vector<double> samples(n);
  double sum = 0;
  double min_sample = 1e300;
  for (auto& s : samples) {
    s = sampler.sample(rng);
    sum += s;
    min_sample = std::min(min_sample, s);
  }

  SUBCASE("Kolmogorov-Smirnov distance below 0.01") {
    CHECK(oracle.ks_distance(samples) < 0.01);
  }
  SUBCASE("empirical mean within 2% of the quadrature mean") {
    const double mean = sum / double(n);
    CHECK(std::abs(mean - oracle.mean()) < 0.02 * oracle.mean());
  }
  SUBCASE("all samples strictly positive") { CHECK(min_sample > 0.0); }
}

TEST_CASE("zipf presence probabilities") {
  SUBCASE("single destination takes everything") {
    const auto w = metapop::zipf_presence(1);
    REQUIRE(w.size() == 1);
    CHECK(w[0] == 1.0);
  }
  SUBCASE("n = 3 matches the closed form") {
    const auto w = metapop::zipf_presence(3);  // H_3 = 11/6
    CHECK(w[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
    CHECK(w[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
  }
  SUBCASE("sums to one and strictly decreases") {
    for (int n : {2, 5, 17, 100}) {
      const auto w = metapop::zipf_presence(n);
      double sum = 0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        sum += w[k];
        if (k > 0) CHECK(w[k] < w[k - 1]);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  SUBCASE("zero destinations is an error") {
    CHECK_THROWS_AS(metapop::zipf_presence(0), std::invalid_argument);
  }
}

TEST_CASE("destination generation") {
  SUBCASE("two-node network has only one choice") {
    const auto net = line_network(2, 500, 100);
    MobilityGenConfig cfg;
    cfg.destinations_per_node = 1;
    cfg.seed = 7;
    const auto lists = metapop::generate_destinations(net, cfg);
    REQUIRE(lists.size() == 2);
    CHECK(lists[0] == std::vector<int>{1});
    CHECK(lists[1] == std::vector<int>{0});
  }
  SUBCASE("same seed gives identical lists, different seeds differ") {
    const auto net = line_network(300, 700, 100);
    MobilityGenConfig cfg;
    cfg.destinations_per_node = 10;
    cfg.seed = 99;
    const auto a = metapop::generate_destinations(net, cfg);
    const auto b = metapop::generate_destinations(net, cfg);
    CHECK(a == b);
    cfg.seed = 100;
    const auto c = metapop::generate_destinations(net, cfg);
    CHECK(a != c);
  }
  SUBCASE("destination distances reproduce the trip-length law (KS < 0.05)") {
    // uniform 1-D lattice: 6000 nodes every 50 m; the spacing bounds the
    // resolvable short-trip mass (F(50 m) ~ 0.026) and the 300 km span
    // covers the exponential tail
    const auto net = line_network(6000, 50, 50);
    MobilityGenConfig cfg;
    cfg.destinations_per_node = 20;
    cfg.seed = 31;
    const auto lists = metapop::generate_destinations(net, cfg);
    std::vector<double> distances;
    distances.reserve(6000 * 20);
    for (int i = 0; i < net.node_count(); ++i) {
      for (int j : lists[i]) {
        distances.push_back(std::abs(net.nodes[i].x - net.nodes[j].x) / 1000.0);
      }
    }
    const TripLengthOracle oracle(cfg.delta_r0_km, cfg.power_beta, cfg.kappa_km);
    CHECK(oracle.ks_distance(distances) < 0.05);
  }
  SUBCASE("requesting more destinations than nodes truncates with a warning") {
    const auto net = line_network(5, 500, 100);
    MobilityGenConfig cfg;
    cfg.destinations_per_node = 10;
    std::vector<std::string> warnings;
    const auto lists = metapop::generate_destinations(net, cfg, &warnings);
    for (const auto& l : lists) CHECK(l.size() == 4);
    CHECK(!warnings.empty());
  }
  SUBCASE("lists contain no duplicates and never the origin") {
    const auto net = line_network(200, 300, 100);
    MobilityGenConfig cfg;
    cfg.destinations_per_node = 30;
    cfg.seed = 5;
    const auto lists = metapop::generate_destinations(net, cfg);
    for (int i = 0; i < net.node_count(); ++i) {
      std::set<int> seen(lists[i].begin(), lists[i].end());
      CHECK(seen.size() == lists[i].size());
      CHECK(seen.count(i) == 0);
    }
  }
}

TEST_CASE("travel matrices") {
  MobilityGenConfig cfg;
  cfg.leave_rate = 0.4;
  cfg.return_rate = 1.0;

  SUBCASE("rates follow the zipf ranking") {
    const std::vector<std::vector<int>> dests{{1, 2, 3}, {0}, {0}, {0}};
    const auto tm = metapop::build_travel_matrices(dests, cfg, 4);
    tm.validate();
    CHECK(tm.depart[0] == doctest::Approx(0.4 * 6.0 / 11.0).epsilon(1e-12));
    CHECK(tm.depart[1] == doctest::Approx(0.4 * 3.0 / 11.0).epsilon(1e-12));
    CHECK(tm.depart[2] == doctest::Approx(0.4 * 2.0 / 11.0).epsilon(1e-12));
    CHECK(tm.ret[0] == 1.0);
    CHECK(tm.dest[0] == 1);  // rank order preserved
    CHECK(tm.dest[1] == 2);
    CHECK(tm.dest[2] == 3);
  }
  SUBCASE("departures and returns share one sparsity pattern") {
    const std::vector<std::vector<int>> dests{{1, 2}, {2}, {}};
    const auto tm = metapop::build_travel_matrices(dests, cfg, 3);
    CHECK(tm.depart.size() == tm.ret.size());
    CHECK(tm.dest.size() == tm.depart.size());
    for (double r : tm.ret) CHECK(r == cfg.return_rate);
  }
  SUBCASE("split fractions sum to one wherever there is a leave rate") {
    const std::vector<std::vector<int>> dests{{1, 2, 3, 4}, {0, 2}, {3}, {}, {0}};
    const auto tm = metapop::build_travel_matrices(dests, cfg, 5);
    for (int i = 0; i < tm.n; ++i) {
      if (tm.leave_rate[i] == 0) continue;
      double m_sum = 0;
      for (int q = tm.row_ptr[i]; q < tm.row_ptr[i + 1]; ++q) {
        m_sum += tm.depart[q] / tm.leave_rate[i];
      }
      CHECK(std::abs(m_sum - 1.0) <= 1e-12);
    }
  }
  SUBCASE("zero leave rate produces empty matrices") {
    MobilityGenConfig sedentary = cfg;
    sedentary.leave_rate = 0;
    const std::vector<std::vector<int>> dests{{1}, {0}};
    const auto tm = metapop::build_travel_matrices(dests, sedentary, 2);
    CHECK(tm.pair_count() == 0);
  }
  SUBCASE("mobility csv round trip preserves pattern and rates") {
    TempDir dir;
    const std::vector<std::vector<int>> dests{{2, 1}, {0}, {1, 0}};
    const auto tm = metapop::build_travel_matrices(dests, cfg, 3);
    const std::string path = dir.path("mobility.csv");
    metapop::save_mobility_csv(tm, path);
    const auto back = metapop::load_mobility_csv(path, 3);
    REQUIRE(back.pair_count() == tm.pair_count());
    for (std::size_t q = 0; q < tm.pair_count(); ++q) {
      CHECK(back.dest[q] == tm.dest[q]);
      CHECK(back.depart[q] == tm.depart[q]);
      CHECK(back.ret[q] == tm.ret[q]);
    }
    CHECK(back.leave_rate == tm.leave_rate);
  }
}

TEST_CASE("network disease-free equilibrium") {
  const metapop::ModelParams params;  // d_H = 1/(78*365)

  SUBCASE("sedentary population stays home") {
    PatchNetwork net = line_network(3, 500, 0);
    net.nodes[0].population = 100;
    net.nodes[1].population = 250;
    net.nodes[2].population = 50;
    TravelMatrices tm;
    tm.n = 3;
    tm.row_ptr = {0, 0, 0, 0};
    tm.leave_rate = {0, 0, 0};
    const auto state = metapop::network_dfe(net, tm, params);
    CHECK(state.s_h(state.layout().diagonal_pair(0)) == 100.0);
    CHECK(state.s_h(state.layout().diagonal_pair(1)) == 250.0);
    CHECK(state.s_h(state.layout().diagonal_pair(2)) == 50.0);
    CHECK(state.layout().pair_count() == 3);  // diagonals only
  }

  SUBCASE("symmetric two-node case matches the closed form") {
    PatchNetwork net = line_network(2, 500, 900);
    MobilityGenConfig cfg;
    cfg.leave_rate = 0.5;
    cfg.return_rate = 1.0;
    const std::vector<std::vector<int>> dests{{1}, {0}};
    const auto tm = metapop::build_travel_matrices(dests, cfg, 2);
    const auto state = metapop::network_dfe(net, tm, params);
    const auto& lay = state.layout();
    // frozen from the independent closed-form evaluation
    CHECK(state.s_h(lay.diagonal_pair(0)) ==
          doctest::Approx(600.0070247740364).epsilon(1e-12));
    CHECK(state.s_h(lay.pair_index(0, 1)) ==
          doctest::Approx(299.9929752259636).epsilon(1e-12));
    // infected and recovered empty everywhere
    for (int q = 0; q < static_cast<int>(lay.pair_count()); ++q) {
      CHECK(state.i_h(q) == 0.0);
      CHECK(state.r_h(q) == 0.0);
    }
    for (int i = 0; i < 2; ++i) CHECK(state.i_m(i) == 0.0);
  }

  SUBCASE("resident totals are conserved by the occupancy split") {
    PatchNetwork net = line_network(40, 400, 0);
    for (int i = 0; i < 40; ++i) net.nodes[i].population = 100 + 13 * i;
    MobilityGenConfig cfg;
    cfg.destinations_per_node = 8;
    cfg.leave_rate = 0.3;
    cfg.seed = 17;
    const auto tm = metapop::generate_mobility(net, cfg);
    const auto state = metapop::network_dfe(net, tm, params);
    const auto residents = state.resident_totals();
    for (int i = 0; i < 40; ++i) {
      CHECK(std::abs(residents[i] - net.nodes[i].population) <=
            1e-10 * net.nodes[i].population);
    }
  }

  SUBCASE("mosquitoes start at the node-wise endemic equilibrium") {
    PatchNetwork net = line_network(3, 500, 100);
    net.nodes[1].k_e = 400;  // smaller cell
    net.nodes[1].k_l = 200;
    TravelMatrices tm;
    tm.n = 3;
    tm.row_ptr = {0, 0, 0, 0};
    tm.leave_rate = {0, 0, 0};
    const auto state = metapop::network_dfe(net, tm, params);
    const auto eq1 = metapop::vector_endemic_equilibrium(params, 400, 200);
    CHECK(state.l(1) == doctest::Approx(eq1.l).epsilon(1e-12));
    CHECK(state.s_m(1) == doctest::Approx(eq1.a).epsilon(1e-12));
    CHECK(state.e(1) == doctest::Approx(eq1.e).epsilon(1e-12));
  }

  SUBCASE("a dead return path is rejected") {
    PatchNetwork net = line_network(2, 500, 900);
    metapop::ModelParams no_birth = params;
    no_birth.b_h = 0;
    MobilityGenConfig cfg;
    cfg.leave_rate = 0.5;
    cfg.return_rate = 0.0;  // d_H + r_ij == 0
    const std::vector<std::vector<int>> dests{{1}, {0}};
    const auto tm = metapop::build_travel_matrices(dests, cfg, 2);
    CHECK_THROWS_AS(metapop::network_dfe(net, tm, no_birth), std::invalid_argument);
  }
}
