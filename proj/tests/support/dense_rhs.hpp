#pragma once

// Independent dense transcription of the full network dynamics, written
// directly from the printed equations with n x n matrices and no sparsity.
// Used as the equivalence oracle for the sparse engine.

#include <cmath>
#include <vector>

#include "metapop/mobility.hpp"
#include "metapop/network.hpp"
#include "metapop/params.hpp"

namespace testutil {

struct DenseState {
  int n = 0;
  // humans indexed [origin][present]; mosquitoes per node
  std::vector<std::vector<double>> s, i, r;
  std::vector<double> s_m, i_m, e, l;

  explicit DenseState(int nodes)
      : n(nodes),
        s(nodes, std::vector<double>(nodes, 0.0)),
        i(nodes, std::vector<double>(nodes, 0.0)),
        r(nodes, std::vector<double>(nodes, 0.0)),
        s_m(nodes, 0.0),
        i_m(nodes, 0.0),
        e(nodes, 0.0),
        l(nodes, 0.0) {}
};

struct DenseSystem {
  int n = 0;
  std::vector<double> g;                    // per-capita leave rate
  std::vector<std::vector<double>> m;       // m[j][i]: fraction of i's leavers going to j
  std::vector<std::vector<double>> ret;     // ret[i][j]: return rate of i's residents from j
  std::vector<std::vector<double>> psi;     // kernel weights incl. psi[i][i] = 1
  std::vector<double> k_e, k_l;

  DenseSystem(const metapop::PatchNetwork& net, const metapop::TravelMatrices& tm)
      : n(net.node_count()),
        g(tm.leave_rate),
        m(n, std::vector<double>(n, 0.0)),
        ret(n, std::vector<double>(n, 0.0)),
        psi(n, std::vector<double>(n, 0.0)),
        k_e(n),
        k_l(n) {
    for (int o = 0; o < n; ++o) {
      for (int q = tm.row_ptr[o]; q < tm.row_ptr[o + 1]; ++q) {
        const int d = tm.dest[q];
        if (g[o] > 0) m[d][o] = tm.depart[q] / g[o];
        ret[o][d] = tm.ret[q];
      }
    }
    for (int a = 0; a < n; ++a) {
      psi[a][a] = 1.0;
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        const double dx = net.nodes[a].x - net.nodes[b].x;
        const double dy = net.nodes[a].y - net.nodes[b].y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        psi[a][b] = metapop::kernel(dist, net.d_max_m);
      }
      k_e[a] = net.nodes[a].k_e;
      k_l[a] = net.nodes[a].k_l;
    }
  }

  DenseState rhs(const DenseState& x, const metapop::ModelParams& p) const {
    constexpr double eps = 1e-9;  // mirrors the engine's empty-node guard
    DenseState dx(n);
    std::vector<double> n_r(n, 0.0), n_p(n, 0.0), i_p(n, 0.0);
    for (int o = 0; o < n; ++o) {
      for (int d = 0; d < n; ++d) {
        n_r[o] += x.s[o][d] + x.i[o][d] + x.r[o][d];
        n_p[d] += x.s[o][d] + x.i[o][d] + x.r[o][d];
        i_p[d] += x.i[o][d];
      }
    }
    const double d_h = p.b_h;
    for (int o = 0; o < n; ++o) {
      // resident-and-present block (the diagonal equations)
      double ret_s = 0, ret_i = 0, ret_r = 0;
      for (int k = 0; k < n; ++k) {
        ret_s += ret[o][k] * x.s[o][k];
        ret_i += ret[o][k] * x.i[o][k];
        ret_r += ret[o][k] * x.r[o][k];
      }
      double infection = 0;
      for (int k = 0; k < n; ++k) {
        infection += p.beta_h * psi[o][k] * x.i_m[k] / std::max(n_p[o], eps);
      }
      dx.s[o][o] = d_h * (n_r[o] - x.s[o][o]) - g[o] * x.s[o][o] + ret_s -
                   infection * x.s[o][o];
      dx.i[o][o] = -d_h * x.i[o][o] - g[o] * x.i[o][o] + ret_i +
                   infection * x.s[o][o] - p.gamma_h * x.i[o][o];
      dx.r[o][o] = p.gamma_h * x.i[o][o] - d_h * x.r[o][o] - g[o] * x.r[o][o] + ret_r;
      // travellers: resident at o, present at j
      for (int j = 0; j < n; ++j) {
        if (j == o) continue;
        double foi = 0;
        for (int k = 0; k < n; ++k) {
          foi += p.beta_h * psi[o][k] * x.i_m[k] / std::max(n_p[j], eps);
        }
        dx.s[o][j] = g[o] * m[j][o] * x.s[o][o] - d_h * x.s[o][j] -
                     ret[o][j] * x.s[o][j] - foi * x.s[o][j];
        dx.i[o][j] = g[o] * m[j][o] * x.i[o][o] - d_h * x.i[o][j] -
                     ret[o][j] * x.i[o][j] + foi * x.s[o][j] -
                     p.gamma_h * x.i[o][j];
        dx.r[o][j] = g[o] * m[j][o] * x.r[o][o] + p.gamma_h * x.i[o][j] -
                     d_h * x.r[o][j] - ret[o][j] * x.r[o][j];
      }
    }
    for (int a = 0; a < n; ++a) {
      double infections = 0;
      for (int k = 0; k < n; ++k) {
        infections +=
            p.beta_m * psi[a][k] * x.s_m[a] * i_p[k] / std::max(n_p[k], eps);
      }
      dx.s_m[a] = p.s_l * x.l[a] - p.d_m * x.s_m[a] - infections;
      dx.i_m[a] = infections - p.d_m * x.i_m[a];
      const double brake_e = k_e[a] > 0 ? 1.0 - x.e[a] / k_e[a] : 0.0;
      const double brake_l = k_l[a] > 0 ? 1.0 - x.l[a] / k_l[a] : 0.0;
      dx.e[a] = p.b * (x.s_m[a] + x.i_m[a]) * brake_e - (p.s + p.d) * x.e[a];
      dx.l[a] = p.s * x.e[a] * brake_l - (p.s_l + p.d_l) * x.l[a];
    }
    return dx;
  }
};

}  // namespace testutil
