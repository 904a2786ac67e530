#pragma once

#include <string>

namespace metapop {

// Biological and epidemiological rates of the coupled vector/transmission
// model. All rates are per day; capacities are individuals at the reference
// surface scale. Defaults are the standard literature values; the infection
// rates beta_h / beta_m are scenario inputs and default to zero.
struct ModelParams {
  double b = 6.0;                      // oviposition rate (eggs/female/day)
  double k_e = 1000.0;                 // egg carrying capacity
  double k_l = 500.0;                  // larva carrying capacity
  double s = 1.0 / 3.0;                // transfer rate egg -> larva
  double s_l = 1.0 / 10.0;             // transfer rate larva -> adult
  double d = 1.0 / 3.0;                // egg mortality rate
  double d_l = 1.0 / 3.0;              // larva mortality rate
  double d_m = 1.0 / 14.0;             // adult female mortality rate
  double b_h = 1.0 / (78.0 * 365.0);   // human birth rate; deaths use the same rate
  double gamma_h = 1.0 / 7.0;          // human recovery rate
  double beta_h = 0.0;                 // infection rate, vector -> human
  double beta_m = 0.0;                 // infection rate, human -> vector

  // Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

// Flat key/value parameter file: one `key = value` per line, `#` comments.
// All twelve keys are required; unknown keys are rejected with a suggestion.
ModelParams load_params(const std::string& path);
void save_params(const ModelParams& p, const std::string& path);

}  // namespace metapop
