#include "metapop/params.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "detail/key_suggest.hpp"
#include "metapop/csv.hpp"

namespace metapop {

namespace {

const std::array<std::string, 12> kParamKeys = {
    "b",   "k_e", "k_l",     "s",      "s_l",    "d",
    "d_l", "d_m", "b_h",     "gamma_h", "beta_h", "beta_m"};

double* field_of(ModelParams& p, const std::string& key) {
  static const std::map<std::string, double ModelParams::*> fields = {
      {"b", &ModelParams::b},         {"k_e", &ModelParams::k_e},
      {"k_l", &ModelParams::k_l},     {"s", &ModelParams::s},
      {"s_l", &ModelParams::s_l},     {"d", &ModelParams::d},
      {"d_l", &ModelParams::d_l},     {"d_m", &ModelParams::d_m},
      {"b_h", &ModelParams::b_h},     {"gamma_h", &ModelParams::gamma_h},
      {"beta_h", &ModelParams::beta_h}, {"beta_m", &ModelParams::beta_m}};
  auto it = fields.find(key);
  return it == fields.end() ? nullptr : &(p.*(it->second));
}

}  // namespace

void ModelParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("ModelParams: ") + name +
                                  " must be finite and >= 0");
    }
  };
  nonneg(b, "b");
  nonneg(k_e, "k_e");
  nonneg(k_l, "k_l");
  nonneg(s, "s");
  nonneg(s_l, "s_l");
  nonneg(d, "d");
  nonneg(d_l, "d_l");
  nonneg(d_m, "d_m");
  nonneg(b_h, "b_h");
  nonneg(gamma_h, "gamma_h");
  nonneg(beta_h, "beta_h");
  nonneg(beta_m, "beta_m");
  if (!(k_e > 0)) throw std::invalid_argument("ModelParams: k_e must be > 0");
  if (!(k_l > 0)) throw std::invalid_argument("ModelParams: k_l must be > 0");
  if (!(d_m > 0)) throw std::invalid_argument("ModelParams: d_m must be > 0");
  if (!(s + d > 0)) throw std::invalid_argument("ModelParams: s + d must be > 0");
  if (!(s_l + d_l > 0)) {
    throw std::invalid_argument("ModelParams: s_l + d_l must be > 0");
  }
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open parameter file: " + path);
  ModelParams p;
  std::map<std::string, bool> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw std::invalid_argument(where + ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto b2 = s.find_first_not_of(" \t");
      if (b2 == std::string::npos) return std::string();
      const auto e2 = s.find_last_not_of(" \t");
      return s.substr(b2, e2 - b2 + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    double* slot = field_of(p, key);
    if (!slot) {
      throw std::invalid_argument(
          detail::unknown_key_message(where, key, kParamKeys));
    }
    if (seen[key]) throw std::invalid_argument(where + ": duplicate key '" + key + "'");
    seen[key] = true;
    double v = 0;
    auto res = std::from_chars(val.data(), val.data() + val.size(), v);
    if (res.ec != std::errc() || res.ptr != val.data() + val.size() ||
        !std::isfinite(v)) {
      throw std::invalid_argument(where + ": key '" + key +
                                  "': not a finite number: '" + val + "'");
    }
    *slot = v;
  }
  for (const auto& key : kParamKeys) {
    if (!seen[key]) {
      throw std::invalid_argument(path + ": missing required key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

void save_params(const ModelParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write parameter file: " + path);
  ModelParams copy = p;
  for (const auto& key : kParamKeys) {
    out << key << " = " << format_double(*field_of(copy, key)) << "\n";
  }
}

}  // namespace metapop
