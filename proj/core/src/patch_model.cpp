#include "metapop/patch_model.hpp"

#include <cmath>
#include <stdexcept>

namespace metapop {

double mosquito_threshold_r(const ModelParams& p) {
  if (!(p.s + p.d > 0) || !(p.s_l + p.d_l > 0) || !(p.d_m > 0)) {
    throw std::invalid_argument("mosquito_threshold_r: zero denominator");
  }
  return (p.b / (p.s + p.d)) * (p.s / (p.s_l + p.d_l)) * (p.s_l / p.d_m);
}

double basic_reproduction_number(const ModelParams& p, double n_h, double k_e,
                                 double k_l) {
  if (!(n_h > 0)) {
    throw std::invalid_argument("basic_reproduction_number: n_h must be > 0");
  }
  const double r = mosquito_threshold_r(p);
  if (!(r > 1)) {
    throw std::domain_error(
        "basic_reproduction_number: requires r > 1 (vector persistence)");
  }
  const double demog = p.d_m * (p.gamma_h + p.b_h);
  const double larval =
      (p.s * k_e * p.s_l * k_l) / (p.d_m * (p.s * k_e + (p.s_l + p.d_l) * k_l));
  return (p.beta_m * p.beta_h / demog) * (1.0 / n_h) * (1.0 - 1.0 / r) * larval;
}

double basic_reproduction_number(const ModelParams& p, double n_h) {
  return basic_reproduction_number(p, n_h, p.k_e, p.k_l);
}

VectorEquilibrium vector_endemic_equilibrium(const ModelParams& p, double k_e,
                                             double k_l) {
  const double r = mosquito_threshold_r(p);
  if (!(r > 1)) {
    throw std::domain_error(
        "vector_endemic_equilibrium: requires r > 1; only the extinction "
        "equilibrium exists");
  }
  if (!(k_e > 0) || !(k_l > 0)) return {0, 0, 0};
  const double gamma_l = 1.0 + (p.s_l + p.d_l) * k_l / (p.s * k_e);
  const double l = (1.0 - 1.0 / r) * k_l / gamma_l;
  const double a = p.s_l * l / p.d_m;
  const double e = (p.s_l + p.d_l) * l / (p.s * (1.0 - l / k_l));
  return {e, l, a};
}

PatchState single_patch_rhs(const PatchState& x, const ModelParams& p,
                            double /*t*/) {
  const double n_h = x.n_h();
  if (!(n_h > 0)) {
    throw std::invalid_argument("single_patch_rhs: total human population must be > 0");
  }
  PatchState dx;
  dx.e = p.b * x.a * (1.0 - x.e / p.k_e) - (p.s + p.d) * x.e;
  dx.l = p.s * x.e * (1.0 - x.l / p.k_l) - (p.s_l + p.d_l) * x.l;
  dx.a = p.s_l * x.l - p.d_m * x.a;
  const double foi_m = p.beta_m * x.i_h / n_h * x.s_m;  // new mosquito infections
  dx.s_m = p.s_l * x.l - p.d_m * x.s_m - foi_m;
  dx.i_m = foi_m - p.d_m * x.i_m;
  const double foi_h = p.beta_h * x.i_m / n_h * x.s_h;  // new human infections
  dx.s_h = -foi_h + p.b_h * n_h - p.b_h * x.s_h;
  dx.i_h = foi_h - p.gamma_h * x.i_h - p.b_h * x.i_h;
  dx.r_h = p.gamma_h * x.i_h - p.b_h * x.r_h;
  return dx;
}

namespace {

PatchState axpy(const PatchState& x, double c, const PatchState& d) {
  return {x.e + c * d.e,     x.l + c * d.l,     x.a + c * d.a,
          x.s_m + c * d.s_m, x.i_m + c * d.i_m, x.s_h + c * d.s_h,
          x.i_h + c * d.i_h, x.r_h + c * d.r_h};
}

}  // namespace

PatchState advance_patch(PatchState x, const ModelParams& p, double days,
                         double h) {
  if (!(h > 0)) throw std::invalid_argument("advance_patch: h must be > 0");
  double t = 0;
  while (t < days - 1e-12) {
    const double hs = std::min(h, days - t);
    const PatchState k1 = single_patch_rhs(x, p);
    const PatchState k2 = single_patch_rhs(axpy(x, hs / 2, k1), p);
    const PatchState k3 = single_patch_rhs(axpy(x, hs / 2, k2), p);
    const PatchState k4 = single_patch_rhs(axpy(x, hs, k3), p);
    auto step = [hs](double v, double d1, double d2, double d3, double d4) {
      const double out = v + hs / 6.0 * (d1 + 2 * d2 + 2 * d3 + d4);
      return out < 0 ? 0.0 : out;
    };
    x.e = step(x.e, k1.e, k2.e, k3.e, k4.e);
    x.l = step(x.l, k1.l, k2.l, k3.l, k4.l);
    x.a = step(x.a, k1.a, k2.a, k3.a, k4.a);
    x.s_m = step(x.s_m, k1.s_m, k2.s_m, k3.s_m, k4.s_m);
    x.i_m = step(x.i_m, k1.i_m, k2.i_m, k3.i_m, k4.i_m);
    x.s_h = step(x.s_h, k1.s_h, k2.s_h, k3.s_h, k4.s_h);
    x.i_h = step(x.i_h, k1.i_h, k2.i_h, k3.i_h, k4.i_h);
    x.r_h = step(x.r_h, k1.r_h, k2.r_h, k3.r_h, k4.r_h);
    t += hs;
  }
  return x;
}

}  // namespace metapop
