#pragma once

#include "metapop/params.hpp"

namespace metapop {

// Full single-patch state: aquatic stages, adult females (total and split by
// disease status) and the resident human SIR compartments.
struct PatchState {
  double e = 0, l = 0, a = 0;         // eggs, larvae, adult females
  double s_m = 0, i_m = 0;            // susceptible / infected adults
  double s_h = 0, i_h = 0, r_h = 0;   // human SIR

  double n_h() const { return s_h + i_h + r_h; }
};

// Demographic threshold of the vector population,
//   r = (b/(s+d)) * (s/(s_l+d_l)) * (s_l/d_m);
// the population persists iff r > 1.
double mosquito_threshold_r(const ModelParams& p);

// Basic reproduction number of the single-patch transmission model for a
// patch with human population n_h and capacities (k_e, k_l).
// Requires r > 1 (throws std::domain_error otherwise) and n_h > 0.
double basic_reproduction_number(const ModelParams& p, double n_h, double k_e,
                                 double k_l);
// Same, using the capacities stored in the parameters.
double basic_reproduction_number(const ModelParams& p, double n_h);

struct VectorEquilibrium {
  double e = 0, l = 0, a = 0;
};

// Endemic equilibrium of the (E, L, A) subsystem at the given capacities:
//   L* = (1 - 1/r) * k_l / gamma_l,   gamma_l = 1 + (s_l+d_l) k_l / (s k_e),
//   A* = s_l L* / d_m,                E* from stationarity of the L equation.
// Requires r > 1; a zero capacity yields the extinction state (0, 0, 0).
VectorEquilibrium vector_endemic_equilibrium(const ModelParams& p, double k_e,
                                             double k_l);

// Time derivative of all eight compartments. The system is autonomous; t is
// accepted for integrator hooks only. Requires n_h > 0.
PatchState single_patch_rhs(const PatchState& x, const ModelParams& p,
                            double t = 0.0);

// Fixed-step RK4 advance with negative undershoot clamped to zero after each
// step. Intended for single-patch studies and convergence checks.
PatchState advance_patch(PatchState x, const ModelParams& p, double days,
                         double h);

}  // namespace metapop
