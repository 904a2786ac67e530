#include "metapop/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metapop/csv.hpp"

namespace metapop {

namespace {
constexpr double kPresentEps = 1e-9;  // guard for transiently empty nodes
constexpr const char* kMosqCompartment[4] = {"E", "L", "S_m", "I_m"};
constexpr const char* kHumanCompartment[3] = {"S_H", "I_H", "R_H"};
}  // namespace

void EventSpec::validate() const {
  if (quarantine) {
    if (!(quarantine->threshold > 0) || !(quarantine->threshold <= 1)) {
      throw std::invalid_argument("quarantine: threshold must be in (0, 1]");
    }
    if (!(quarantine->check_interval_days > 0)) {
      throw std::invalid_argument("quarantine: check_interval_days must be > 0");
    }
  }
  if (mutation && !(mutation->time_days >= 0)) {
    throw std::invalid_argument("mutation: time_days must be >= 0");
  }
}

ModelParams apply_mutation(const ModelParams& p,
                           const std::optional<MutationSpec>& mutation,
                           double t) {
  if (!mutation || t < mutation->time_days) return p;
  ModelParams out = p;
  out.beta_h = mutation->beta_h;
  out.beta_m = mutation->beta_m;
  return out;
}

TravelMatrices apply_quarantine(const TravelMatrices& tm,
                                std::span<const double> infection_fraction,
                                double threshold) {
  if (!(threshold > 0) || !(threshold <= 1)) {
    throw std::invalid_argument("apply_quarantine: threshold must be in (0, 1]");
  }
  if (static_cast<int>(infection_fraction.size()) != tm.n) {
    throw std::invalid_argument("apply_quarantine: fraction vector size mismatch");
  }
  TravelMatrices out = tm;
  std::vector<char> blocked(tm.n, 0);
  for (int i = 0; i < tm.n; ++i) {
    blocked[i] = infection_fraction[i] >= threshold ? 1 : 0;
  }
  for (int i = 0; i < tm.n; ++i) {
    for (int q = tm.row_ptr[i]; q < tm.row_ptr[i + 1]; ++q) {
      if (blocked[i] || blocked[tm.dest[q]]) {
        out.depart[q] = 0.0;
        out.ret[q] = 0.0;
      }
    }
  }
  return out;
}

void seed_infection(NetworkState& state, int node, double count) {
  const auto& lay = state.layout();
  if (node < 0 || node >= lay.n) {
    throw std::invalid_argument("seed_infection: node out of range");
  }
  if (count < 0) throw std::invalid_argument("seed_infection: count must be >= 0");
  const int diag = lay.diagonal_pair(node);
  if (state.s_h(diag) < count) {
    throw std::invalid_argument(
        "seed_infection: not enough susceptibles at node " + std::to_string(node));
  }
  state.s_h(diag) -= count;
  state.i_h(diag) += count;
}

AggregateObservables aggregate_observables(const NetworkState& state) {
  const auto& lay = state.layout();
  AggregateObservables out;
  for (int i = 0; i < lay.n; ++i) {
    out.totals.e += state.e(i);
    out.totals.l += state.l(i);
    out.totals.s_m += state.s_m(i);
    out.totals.i_m += state.i_m(i);
  }
  for (int q = 0; q < static_cast<int>(lay.pair_count()); ++q) {
    out.totals.s_h += state.s_h(q);
    out.totals.i_h += state.i_h(q);
    out.totals.r_h += state.r_h(q);
  }
  out.totals.seroprevalence = out.totals.i_h + out.totals.r_h;
  out.i_h_present.assign(lay.n, 0.0);
  out.infection_fraction.assign(lay.n, 0.0);
  for (int j = 0; j < lay.n; ++j) {
    double present = 0, infected = 0;
    for (int k = lay.dest_ptr[j]; k < lay.dest_ptr[j + 1]; ++k) {
      const int q = lay.by_dest[k];
      present += state.s_h(q) + state.i_h(q) + state.r_h(q);
      infected += state.i_h(q);
    }
    out.i_h_present[j] = infected;
    out.infection_fraction[j] = present > 0 ? infected / present : 0.0;
  }
  return out;
}

NetworkModel::NetworkModel(const PatchNetwork& net, const TravelMatrices& tm,
                           EngineOptions opts)
    : network_(net), matrices_(tm), opts_(opts) {
  if (net.node_count() != tm.n) {
    throw std::invalid_argument("NetworkModel: network/matrices size mismatch");
  }
  matrices_.validate();
  layout_ = make_layout(matrices_);
  const int n = tm.n;
  cap_e_.resize(n);
  cap_l_.resize(n);
  node_pop_.resize(n);
  for (int i = 0; i < n; ++i) {
    cap_e_[i] = net.nodes[i].k_e;
    cap_l_[i] = net.nodes[i].k_l;
    node_pop_[i] = net.nodes[i].population;
  }
  // kernel adjacency, both directions, neighbor-sorted for determinism
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : net.edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n || e.i == e.j) {
      throw std::invalid_argument("NetworkModel: bad kernel edge");
    }
    adj[e.i].emplace_back(e.j, e.weight);
    adj[e.j].emplace_back(e.i, e.weight);
  }
  kadj_ptr_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    kadj_ptr_[i + 1] = kadj_ptr_[i] + static_cast<int>(adj[i].size());
  }
  kadj_.resize(kadj_ptr_[n]);
  kweight_.resize(kadj_ptr_[n]);
  knorm_.assign(n, 1.0);  // self-weight psi(0) = 1, implicit
  for (int i = 0; i < n; ++i) {
    int k = kadj_ptr_[i];
    for (const auto& [j, w] : adj[i]) {
      kadj_[k] = j;
      kweight_[k] = w;
      knorm_[i] += w;
      ++k;
    }
  }
}

NetworkState NetworkModel::dfe(const ModelParams& p) const {
  return network_dfe(network_, matrices_, p);
}

RhsWorkspace::RhsWorkspace(const NetworkModel& model) {
  const int n = model.layout().n;
  present_n_.resize(n);
  present_i_.resize(n);
  resident_.resize(n);
  out_rate_.resize(n);
  w_.resize(n);
  v_.resize(n);
}

void NetworkModel::rhs(const NetworkState& x, const ModelParams& p,
                       std::span<const double> depart,
                       std::span<const double> ret, NetworkState& dx,
                       RhsWorkspace& ws) const {
  const StateLayout& lay = *layout_;
  const int n = lay.n;
  double* pres_n = ws.present_n_.data();
  double* pres_i = ws.present_i_.data();
  double* resident = ws.resident_.data();
  double* out_rate = ws.out_rate_.data();
  double* w = ws.w_.data();
  double* v = ws.v_.data();

  // present and resident population sums; outflow rate per origin is the sum
  // of stored (possibly masked) departure rates so that residents are
  // conserved under quarantine masking
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double total = 0, infected = 0;
    for (int k = lay.dest_ptr[j]; k < lay.dest_ptr[j + 1]; ++k) {
      const int q = lay.by_dest[k];
      total += x.s_h(q) + x.i_h(q) + x.r_h(q);
      infected += x.i_h(q);
    }
    pres_n[j] = total;
    pres_i[j] = infected;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double res = 0;
    for (int q = lay.row_ptr[i]; q < lay.row_ptr[i + 1]; ++q) {
      res += x.s_h(q) + x.i_h(q) + x.r_h(q);
    }
    resident[i] = res;
    double out = 0;
    for (int t = matrices_.row_ptr[i]; t < matrices_.row_ptr[i + 1]; ++t) {
      out += depart[t];
    }
    out_rate[i] = out;
  }

  // kernel-weighted infection pressures:
  //   w[i] = sum_k psi(d_ik) I_m_k           (drives human infection)
  //   v[i] = sum_k psi(d_ik) I_H^p_k / N^p_k (drives mosquito infection)
  const bool normalize = opts_.normalize_kernel;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double wi = x.i_m(i);
    double vi = pres_i[i] / std::max(pres_n[i], kPresentEps);
    for (int k = kadj_ptr_[i]; k < kadj_ptr_[i + 1]; ++k) {
      const int nb = kadj_[k];
      const double psi = kweight_[k];
      wi += psi * x.i_m(nb);
      vi += psi * pres_i[nb] / std::max(pres_n[nb], kPresentEps);
    }
    if (normalize) {
      wi /= knorm_[i];
      vi /= knorm_[i];
    }
    w[i] = wi;
    v[i] = vi;
  }

  const double d_h = p.b_h;
  const double gamma = p.gamma_h;

  // human OD pairs, origin by origin; all writes for origin i happen here
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const int diag = lay.row_ptr[i];
    const double s_ii = x.s_h(diag);
    const double i_ii = x.i_h(diag);
    const double r_ii = x.r_h(diag);
    double ret_s = 0, ret_i = 0, ret_r = 0;
    const int tm_base = matrices_.row_ptr[i];
    for (int t = tm_base; t < matrices_.row_ptr[i + 1]; ++t) {
      const int q = diag + 1 + (t - tm_base);
      const int j = lay.dest[q];
      const double s = x.s_h(q);
      const double ih = x.i_h(q);
      const double r = x.r_h(q);
      const double dq = depart[t];
      const double rq = ret[t];
      // travellers from i present at j are bitten by the mosquito pressure
      // of their origin's neighborhood, normalized by j's present population
      const double foi = p.beta_h * w[i] / std::max(pres_n[j], kPresentEps) * s;
      dx.s_h(q) = dq * s_ii - d_h * s - rq * s - foi;
      dx.i_h(q) = dq * i_ii - d_h * ih - rq * ih + foi - gamma * ih;
      dx.r_h(q) = dq * r_ii + gamma * ih - d_h * r - rq * r;
      ret_s += rq * s;
      ret_i += rq * ih;
      ret_r += rq * r;
    }
    const double foi_ii =
        p.beta_h * w[i] / std::max(pres_n[i], kPresentEps) * s_ii;
    dx.s_h(diag) = d_h * (resident[i] - s_ii) - out_rate[i] * s_ii + ret_s - foi_ii;
    dx.i_h(diag) = -d_h * i_ii - out_rate[i] * i_ii + ret_i + foi_ii - gamma * i_ii;
    dx.r_h(diag) = gamma * i_ii - d_h * r_ii - out_rate[i] * r_ii + ret_r;
  }

  // mosquito compartments
  const bool dynamic_aquatic = opts_.aquatic_mode == AquaticMode::dynamic;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double sm = x.s_m(i);
    const double im = x.i_m(i);
    const double infections = p.beta_m * sm * v[i];
    dx.s_m(i) = p.s_l * x.l(i) - p.d_m * sm - infections;
    dx.i_m(i) = infections - p.d_m * im;
    if (dynamic_aquatic) {
      const double brake_e = cap_e_[i] > 0 ? 1.0 - x.e(i) / cap_e_[i] : 0.0;
      const double brake_l = cap_l_[i] > 0 ? 1.0 - x.l(i) / cap_l_[i] : 0.0;
      dx.e(i) = p.b * (sm + im) * brake_e - (p.s + p.d) * x.e(i);
      dx.l(i) = p.s * x.e(i) * brake_l - (p.s_l + p.d_l) * x.l(i);
    } else {
      dx.e(i) = 0.0;
      dx.l(i) = 0.0;
    }
  }
}

void NetworkModel::rhs(const NetworkState& x, const ModelParams& p,
                       NetworkState& dx) const {
  RhsWorkspace ws(*this);
  rhs(x, p, matrices_.depart, matrices_.ret, dx, ws);
}

std::vector<char> NetworkModel::travel_reachable(int from) const {
  const auto& tm = matrices_;
  std::vector<char> seen(tm.n, 0);
  std::vector<int> stack = {from};
  seen[from] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int q = tm.row_ptr[u]; q < tm.row_ptr[u + 1]; ++q) {
      if (tm.depart[q] > 0 && !seen[tm.dest[q]]) {
        seen[tm.dest[q]] = 1;
        stack.push_back(tm.dest[q]);
      }
    }
  }
  return seen;
}

void IntegrateOptions::validate() const {
  if (!(h > 0)) throw std::invalid_argument("integrate: h must be > 0");
  if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 must be >= t0");
  if (!(output_interval > 0)) {
    throw std::invalid_argument("integrate: output_interval must be > 0");
  }
}

namespace {

NodeObservation observe_node(const NetworkState& x, int node,
                             std::span<const double> present_n,
                             std::span<const double> present_i,
                             std::span<const double> present_s) {
  NodeObservation o;
  o.s_h_present = present_s[node];
  o.i_h_present = present_i[node];
  o.infection_fraction =
      present_n[node] > 0 ? present_i[node] / present_n[node] : 0.0;
  o.s_m = x.s_m(node);
  o.i_m = x.i_m(node);
  o.e = x.e(node);
  o.l = x.l(node);
  return o;
}

void record_point(Trajectory& traj, const NetworkState& x, double t,
                  std::span<const int> observed) {
  const auto& lay = x.layout();
  TrajectoryPoint pt;
  pt.t = t;
  for (int i = 0; i < lay.n; ++i) {
    pt.totals.e += x.e(i);
    pt.totals.l += x.l(i);
    pt.totals.s_m += x.s_m(i);
    pt.totals.i_m += x.i_m(i);
  }
  for (int q = 0; q < static_cast<int>(lay.pair_count()); ++q) {
    pt.totals.s_h += x.s_h(q);
    pt.totals.i_h += x.i_h(q);
    pt.totals.r_h += x.r_h(q);
  }
  pt.totals.seroprevalence = pt.totals.i_h + pt.totals.r_h;
  if (!observed.empty()) {
    std::vector<double> pres_n(lay.n, 0.0), pres_i(lay.n, 0.0), pres_s(lay.n, 0.0);
    for (int j = 0; j < lay.n; ++j) {
      for (int k = lay.dest_ptr[j]; k < lay.dest_ptr[j + 1]; ++k) {
        const int q = lay.by_dest[k];
        pres_n[j] += x.s_h(q) + x.i_h(q) + x.r_h(q);
        pres_i[j] += x.i_h(q);
        pres_s[j] += x.s_h(q);
      }
    }
    for (int node : observed) {
      pt.observed.push_back(observe_node(x, node, pres_n, pres_i, pres_s));
    }
  }
  traj.points.push_back(std::move(pt));
}

void check_finite(const NetworkState& x, double t) {
  const auto& lay = x.layout();
  for (int i = 0; i < lay.n; ++i) {
    const double vals[4] = {x.e(i), x.l(i), x.s_m(i), x.i_m(i)};
    for (int c = 0; c < 4; ++c) {
      if (!std::isfinite(vals[c])) {
        throw simulation_abort("non-finite state at t=" + format_double(t) +
                               ", node " + std::to_string(i) + ", compartment " +
                               kMosqCompartment[c]);
      }
    }
  }
  for (int q = 0; q < static_cast<int>(lay.pair_count()); ++q) {
    const double vals[3] = {x.s_h(q), x.i_h(q), x.r_h(q)};
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(vals[c])) {
        throw simulation_abort(
            "non-finite state at t=" + format_double(t) + ", OD pair (" +
            std::to_string(lay.origin[q]) + ", " + std::to_string(lay.dest[q]) +
            "), compartment " + kHumanCompartment[c]);
      }
    }
  }
}

}  // namespace

Trajectory integrate(const NetworkModel& model, NetworkState x,
                     const ModelParams& p, const EventSpec& events,
                     const IntegrateOptions& opts) {
  opts.validate();
  events.validate();
  p.validate();
  for (int node : opts.observed_nodes) {
    if (node < 0 || node >= model.layout().n) {
      throw std::invalid_argument("integrate: observed node out of range");
    }
  }

  Trajectory traj;
  traj.observed_nodes = opts.observed_nodes;
  traj.min_preclamp = 0;

  RhsWorkspace ws(model);
  NetworkState k1(model.layout_ptr()), k2(model.layout_ptr()),
      k3(model.layout_ptr()), k4(model.layout_ptr()), xt(model.layout_ptr());

  // working copies of the rate arrays (remasked from the originals at every
  // quarantine check)
  std::vector<double> depart(model.matrices().depart);
  std::vector<double> ret(model.matrices().ret);

  const double tiny = 1e-9 * opts.h;
  record_point(traj, x, opts.t0, traj.observed_nodes);
  if (opts.on_output) opts.on_output(opts.t0, x);

  long long out_index = 0;
  long long q_index = 0;
  const bool has_q = events.quarantine.has_value();
  const double q_every = has_q ? events.quarantine->check_interval_days : 0.0;

  auto mask_rates = [&](const NetworkState& state) {
    const auto& tm = model.matrices();
    const auto frac = aggregate_observables(state).infection_fraction;
    const double threshold = events.quarantine->threshold;
    std::vector<char> blocked(tm.n, 0);
    for (int i = 0; i < tm.n; ++i) blocked[i] = frac[i] >= threshold ? 1 : 0;
    for (int i = 0; i < tm.n; ++i) {
      for (int q = tm.row_ptr[i]; q < tm.row_ptr[i + 1]; ++q) {
        const bool cut = blocked[i] || blocked[tm.dest[q]];
        depart[q] = cut ? 0.0 : tm.depart[q];
        ret[q] = cut ? 0.0 : tm.ret[q];
      }
    }
  };

  double t = opts.t0;
  if (has_q) {
    mask_rates(x);  // cadence starts at t0
    ++q_index;
  }

  const auto dim = x.raw().size();
  while (t < opts.t1 - tiny) {
    // next step-boundary event: output, quarantine check, mutation, end
    double t_next = opts.t0 + double(out_index + 1) * opts.output_interval;
    if (has_q) {
      t_next = std::min(t_next, opts.t0 + double(q_index) * q_every);
    }
    if (events.mutation && events.mutation->time_days > t + tiny) {
      t_next = std::min(t_next, events.mutation->time_days);
    }
    t_next = std::min(t_next, opts.t1);

    const ModelParams p_now = apply_mutation(p, events.mutation, t);

    // fixed steps across the segment, last one truncated to the boundary
    const double seg = t_next - t;
    const long long nsteps = std::max<long long>(
        1, static_cast<long long>(std::ceil(seg / opts.h - 1e-9)));
    for (long long s = 0; s < nsteps; ++s) {
      const double t_step = t + double(s) * opts.h;
      const double hs = std::min(opts.h, t_next - t_step);
      model.rhs(x, p_now, depart, ret, k1, ws);
      double* xr = x.raw().data();
      double* xtr = xt.raw().data();
      const double* k1r = k1.raw().data();
#pragma omp parallel for schedule(static)
      for (long long c = 0; c < static_cast<long long>(dim); ++c) {
        xtr[c] = xr[c] + hs / 2 * k1r[c];
      }
      model.rhs(xt, p_now, depart, ret, k2, ws);
      const double* k2r = k2.raw().data();
#pragma omp parallel for schedule(static)
      for (long long c = 0; c < static_cast<long long>(dim); ++c) {
        xtr[c] = xr[c] + hs / 2 * k2r[c];
      }
      model.rhs(xt, p_now, depart, ret, k3, ws);
      const double* k3r = k3.raw().data();
#pragma omp parallel for schedule(static)
      for (long long c = 0; c < static_cast<long long>(dim); ++c) {
        xtr[c] = xr[c] + hs * k3r[c];
      }
      model.rhs(xt, p_now, depart, ret, k4, ws);
      const double* k4r = k4.raw().data();
      double min_pre = 0.0;
#pragma omp parallel for schedule(static) reduction(min : min_pre)
      for (long long c = 0; c < static_cast<long long>(dim); ++c) {
        const double vnew =
            xr[c] + hs / 6 * (k1r[c] + 2 * k2r[c] + 2 * k3r[c] + k4r[c]);
        if (vnew < min_pre) min_pre = vnew;
        xr[c] = vnew < 0 ? 0.0 : vnew;  // clamp integrator undershoot
      }
      if (min_pre < traj.min_preclamp) traj.min_preclamp = min_pre;
    }
    t = t_next;

    check_finite(x, t);
    const bool on_grid =
        std::abs(t - (opts.t0 + double(out_index + 1) * opts.output_interval)) <= tiny;
    if (on_grid) ++out_index;
    if (on_grid || t >= opts.t1 - tiny) {
      record_point(traj, x, t, traj.observed_nodes);
      if (opts.on_output) opts.on_output(t, x);
    }
    if (has_q && std::abs(t - (opts.t0 + double(q_index) * q_every)) <= tiny) {
      mask_rates(x);
      ++q_index;
    }
  }
  return traj;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.t);
  return out;
}

std::vector<double> Trajectory::total_i_h() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.totals.i_h);
  return out;
}

std::vector<double> Trajectory::seroprevalence() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.totals.seroprevalence);
  return out;
}

std::vector<double> Trajectory::observed_i_h(std::size_t observed_index) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.observed.at(observed_index).i_h_present);
  return out;
}

void save_timeseries_csv(const Trajectory& traj, const std::string& path) {
  CsvWriter w(path, {"t_days", "S_H", "I_H", "R_H", "S_m", "I_m", "E", "L",
                     "seroprevalence"});
  for (const auto& pt : traj.points) {
    w.begin_row();
    w.field(pt.t);
    w.field(pt.totals.s_h);
    w.field(pt.totals.i_h);
    w.field(pt.totals.r_h);
    w.field(pt.totals.s_m);
    w.field(pt.totals.i_m);
    w.field(pt.totals.e);
    w.field(pt.totals.l);
    w.field(pt.totals.seroprevalence);
    w.end_row();
  }
}

Trajectory load_timeseries_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c_t = t.require_column("t_days");
  const int c_sh = t.require_column("S_H");
  const int c_ih = t.require_column("I_H");
  const int c_rh = t.require_column("R_H");
  const int c_sm = t.require_column("S_m");
  const int c_im = t.require_column("I_m");
  const int c_e = t.require_column("E");
  const int c_l = t.require_column("L");
  const int c_sero = t.require_column("seroprevalence");
  Trajectory traj;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    TrajectoryPoint pt;
    pt.t = parse_double_field(t.rows[r][c_t], t, r, c_t);
    pt.totals.s_h = parse_double_field(t.rows[r][c_sh], t, r, c_sh);
    pt.totals.i_h = parse_double_field(t.rows[r][c_ih], t, r, c_ih);
    pt.totals.r_h = parse_double_field(t.rows[r][c_rh], t, r, c_rh);
    pt.totals.s_m = parse_double_field(t.rows[r][c_sm], t, r, c_sm);
    pt.totals.i_m = parse_double_field(t.rows[r][c_im], t, r, c_im);
    pt.totals.e = parse_double_field(t.rows[r][c_e], t, r, c_e);
    pt.totals.l = parse_double_field(t.rows[r][c_l], t, r, c_l);
    pt.totals.seroprevalence = parse_double_field(t.rows[r][c_sero], t, r, c_sero);
    traj.points.push_back(pt);
  }
  return traj;
}

void save_snapshot_csv(const NetworkState& state, const std::string& path) {
  const auto agg = aggregate_observables(state);
  CsvWriter w(path, {"node_id", "I_H_present", "infection_fraction", "S_m",
                     "I_m", "E", "L"});
  for (int i = 0; i < state.layout().n; ++i) {
    w.begin_row();
    w.field(i);
    w.field(agg.i_h_present[i]);
    w.field(agg.infection_fraction[i]);
    w.field(state.s_m(i));
    w.field(state.i_m(i));
    w.field(state.e(i));
    w.field(state.l(i));
    w.end_row();
  }
}

}  // namespace metapop
