#pragma once

// The scalar parameter set of the ground/excited spin Hamiltonians, with
// flat key=value and JSON serialization. Keys carry their unit
// (lambda_e_GHz, D2_e_MHz, P2_e_kHz, ...); everything is stored in MHz
// internally (fields suffixed _mhz), magnetic field in tesla.

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/constants.hpp"

#include "json.hpp"

namespace spinlab {

struct ParamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpinParams {
  // excited-state orbital/spin structure
  double lambda_e_mhz = 0.0;
  double d_e_mhz = 0.0;
  double d1_e_mhz = 0.0;
  double d2_e_mhz = 0.0;
  // ground-state zero-field splitting
  double d_g_mhz = 0.0;
  // hyperfine
  double apar_g_mhz = 0.0;
  double aperp_g_mhz = 0.0;
  double apar_e_mhz = 0.0;
  double aperp_e_mhz = 0.0;
  double a1_e_mhz = 0.0;
  double a2_e_mhz = 0.0;
  double aorb_e_mhz = 0.0;
  // quadrupole
  double p_g_mhz = 0.0;
  double p_e_mhz = 0.0;
  double p1_e_mhz = 0.0;
  double p2_e_mhz = 0.0;
  // strain and field
  double delta_x_mhz = 0.0;
  double delta_y_mhz = 0.0;
  Eigen::Vector3d b_field_tesla = Eigen::Vector3d::Zero();
  // g-factors
  double g_s = constants::g_electron;
  double g_l = constants::g_orbital;
  double g_i = constants::g_nuclear_n14;

  bool all_finite() const {
    for (double v : {lambda_e_mhz, d_e_mhz, d1_e_mhz, d2_e_mhz, d_g_mhz, apar_g_mhz, aperp_g_mhz,
                     apar_e_mhz, aperp_e_mhz, a1_e_mhz, a2_e_mhz, aorb_e_mhz, p_g_mhz, p_e_mhz,
                     p1_e_mhz, p2_e_mhz, delta_x_mhz, delta_y_mhz, b_field_tesla.x(),
                     b_field_tesla.y(), b_field_tesla.z(), g_s, g_l, g_i})
      if (!std::isfinite(v)) return false;
    return true;
  }
};

namespace detail {

struct ParamKey {
  const char* key;
  double SpinParams::* field;
  double to_mhz;  // multiply parsed value by this; 0 marks dimensionless/tesla handled apart
};

inline const std::vector<ParamKey>& param_keys() {
  static const std::vector<ParamKey> keys = {
      {"lambda_e_GHz", &SpinParams::lambda_e_mhz, 1e3},
      {"D_e_GHz", &SpinParams::d_e_mhz, 1e3},
      {"D1_e_MHz", &SpinParams::d1_e_mhz, 1.0},
      {"D2_e_MHz", &SpinParams::d2_e_mhz, 1.0},
      {"D_g_GHz", &SpinParams::d_g_mhz, 1e3},
      {"Apar_g_MHz", &SpinParams::apar_g_mhz, 1.0},
      {"Aperp_g_MHz", &SpinParams::aperp_g_mhz, 1.0},
      {"Apar_e_MHz", &SpinParams::apar_e_mhz, 1.0},
      {"Aperp_e_MHz", &SpinParams::aperp_e_mhz, 1.0},
      {"A1_e_kHz", &SpinParams::a1_e_mhz, 1e-3},
      {"A2_e_kHz", &SpinParams::a2_e_mhz, 1e-3},
      {"Aorb_e_MHz", &SpinParams::aorb_e_mhz, 1.0},
      {"P_g_MHz", &SpinParams::p_g_mhz, 1.0},
      {"P_e_MHz", &SpinParams::p_e_mhz, 1.0},
      {"P1_e_kHz", &SpinParams::p1_e_mhz, 1e-3},
      {"P2_e_kHz", &SpinParams::p2_e_mhz, 1e-3},
      {"deltaX_GHz", &SpinParams::delta_x_mhz, 1e3},
      {"deltaY_GHz", &SpinParams::delta_y_mhz, 1e3},
      {"gS", &SpinParams::g_s, 0.0},
      {"gL", &SpinParams::g_l, 0.0},
      {"gI", &SpinParams::g_i, 0.0},
  };
  return keys;
}

}  // namespace detail

// Assemble a parameter set from key=value entries. Keys that are absent
// default to zero (g-factors keep their physical defaults); the returned
// warning list names them so callers can surface the defaulting.
inline SpinParams assemble_spin_params(const std::map<std::string, double>& kv,
                                       std::vector<std::string>* warnings = nullptr) {
  SpinParams p;
  std::map<std::string, bool> seen;
  for (const auto& [k, v] : kv) seen[k] = false;
  for (const auto& pk : detail::param_keys()) {
    auto it = kv.find(pk.key);
    if (it == kv.end()) {
      if (warnings && pk.to_mhz != 0.0)
        warnings->push_back(std::string("missing ") + pk.key + ", defaulting to 0");
      continue;
    }
    seen[pk.key] = true;
    p.*(pk.field) = pk.to_mhz == 0.0 ? it->second : it->second * pk.to_mhz;
  }
  for (const char* bk : {"Bx_T", "By_T", "Bz_T"}) {
    auto it = kv.find(bk);
    if (it != kv.end()) seen[bk] = true;
  }
  if (auto it = kv.find("Bx_T"); it != kv.end()) p.b_field_tesla.x() = it->second;
  if (auto it = kv.find("By_T"); it != kv.end()) p.b_field_tesla.y() = it->second;
  if (auto it = kv.find("Bz_T"); it != kv.end()) p.b_field_tesla.z() = it->second;
  for (const auto& [k, used] : seen)
    if (!used) throw ParamError("unknown parameter key '" + k + "'");
  if (!p.all_finite()) throw ParamError("non-finite parameter value");
  return p;
}

inline std::map<std::string, double> spin_params_to_kv(const SpinParams& p) {
  std::map<std::string, double> kv;
  for (const auto& pk : detail::param_keys()) {
    const double raw = p.*(pk.field);
    kv[pk.key] = pk.to_mhz == 0.0 ? raw : raw / pk.to_mhz;
  }
  kv["Bx_T"] = p.b_field_tesla.x();
  kv["By_T"] = p.b_field_tesla.y();
  kv["Bz_T"] = p.b_field_tesla.z();
  return kv;
}

// Flat key=value text, one entry per line, '#' comments allowed.
inline std::map<std::string, double> load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open '" + path + "'");
  std::map<std::string, double> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string trimmed;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty()) trimmed.push_back(c);
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ParamError("bad line " + std::to_string(lineno) + " in '" + path + "': expected key=value");
    std::string key = trimmed.substr(0, eq);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    const std::string val = trimmed.substr(eq + 1);
    try {
      kv[key] = std::stod(val);
    } catch (const std::exception&) {
      throw ParamError("bad value for '" + key + "' in '" + path + "'");
    }
  }
  return kv;
}

inline SpinParams load_spin_params(const std::string& path,
                                   std::vector<std::string>* warnings = nullptr) {
  return assemble_spin_params(load_key_values(path), warnings);
}

inline void save_spin_params_kv(const SpinParams& p, std::ostream& out) {
  out.precision(12);
  for (const auto& [k, v] : spin_params_to_kv(p)) out << k << " = " << v << '\n';
}

inline nlohmann::ordered_json spin_params_to_json(const SpinParams& p) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : spin_params_to_kv(p)) j[k] = v;
  return j;
}

}  // namespace spinlab
