#pragma once

// Nuclear spin-flip probabilities over repeated optical cycles: perturbative
// (golden-rule) hyperfine channels, the coherent quadrupole-driven flip with
// its dephasing-window accumulation, the single-pass limit, the quadrupole
// P1 channel, the phonon-limited orbital coherence model and the four-process
// bookkeeping of one absorption/emission cycle.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "spinlab/constants.hpp"
#include "spinlab/hamiltonian.hpp"
#include "spinlab/params.hpp"

namespace spinlab {

struct DynamicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReadoutConfig {
  double tau_rad_ns = 12.0;
  double tau_wait_ns = 0.5;  // saturated re-excitation
  int n_cycles = 0;          // derived from total_time_us when 0
  double total_time_us = 0.0;
  double t2_star_us = 4.0;
  double t2_star_err_us = 0.0;
  double b_z_mt = 0.0;
  double gamma_n_khz_per_mt = constants::gamma_n14_khz_per_mt;
  StrainGaps strain_gaps;

  int cycles() const {
    if (n_cycles > 0) return n_cycles;
    if (total_time_us > 0.0)
      return static_cast<int>(std::floor(total_time_us * 1e3 / (tau_rad_ns + tau_wait_ns) + 0.5));
    return 0;
  }
  double nuclear_zeeman_khz() const { return gamma_n_khz_per_mt * b_z_mt; }
  void validate() const {
    if (tau_rad_ns <= 0 || tau_wait_ns < 0) throw DynamicsError("readout times must be positive");
    if (t2_star_us <= 0) throw DynamicsError("T2* must be positive");
  }
};

// key=value loader sharing the SpinParams file conventions.
inline ReadoutConfig load_readout_config(const std::string& path) {
  ReadoutConfig cfg;
  const auto kv = load_key_values(path);
  for (const auto& [k, v] : kv) {
    if (k == "tau_rad_ns") cfg.tau_rad_ns = v;
    else if (k == "tau_wait_ns") cfg.tau_wait_ns = v;
    else if (k == "n_cycles") cfg.n_cycles = static_cast<int>(v);
    else if (k == "total_time_us") cfg.total_time_us = v;
    else if (k == "T2_star_us") cfg.t2_star_us = v;
    else if (k == "T2_star_err_us") cfg.t2_star_err_us = v;
    else if (k == "Bz_mT") cfg.b_z_mt = v;
    else if (k == "gammaN_kHz_per_mT") cfg.gamma_n_khz_per_mt = v;
    else if (k == "Xi_A1_GHz") cfg.strain_gaps.xi_a1_ghz = v;
    else if (k == "Xi_A2_GHz") cfg.strain_gaps.xi_a2_ghz = v;
    else if (k == "Xi_E12_GHz") cfg.strain_gaps.xi_e12_ghz = v;
    else throw DynamicsError("unknown readout config key '" + k + "'");
  }
  cfg.validate();
  return cfg;
}

enum class FlipChannel {
  AperpToE12,
  AperpToA1,
  AperpToA2,
  P2Coherent,
  P1Naive,
  P1Coherent,
  SinglePassP2,
};

struct FlipChannelResult {
  FlipChannel channel;
  double probability = 0.0;
  std::optional<double> upper;  // channel value at the optimistic bound
  std::optional<double> lower;
  bool saturated = false;  // linear-in-n formula exceeded 1 and was clamped
};

namespace detail {
inline FlipChannelResult clamp01(FlipChannel ch, double p) {
  FlipChannelResult r;
  r.channel = ch;
  r.saturated = p > 1.0;
  r.probability = std::min(1.0, std::max(0.0, p));
  return r;
}
}  // namespace detail

// Per-readout golden-rule probability of one perturbative channel:
//   p = multiplicity * 2 * (amplitude/gap)^2 * n,
// with the 2 accounting for the flip opportunity at both absorption and
// emission of every optical cycle. amplitude in MHz, gap in GHz.
inline FlipChannelResult golden_rule_channel(double amplitude_mhz, double gap_ghz, int n,
                                             int multiplicity = 1) {
  if (gap_ghz == 0.0)
    throw DynamicsError("zero gap: level anticrossing, use the coherent channel");
  const double ratio = amplitude_mhz / (gap_ghz * 1e3);
  return detail::clamp01(FlipChannel::AperpToE12,
                         multiplicity * 2.0 * ratio * ratio * static_cast<double>(n));
}

struct HyperfineChannels {
  FlipChannelResult e12, a1, a2;  // single-channel values (multiplicity 1)
  double to0 = 0.0;               // |m_I = +-1> -> |0>
  double from0 = 0.0;             // |0> -> |m_I = +-1>
  bool saturated = false;
};

// The E1/E2 degeneracy doubles the E12 channel inside the totals; transitions
// out of |0> get one more factor 2 for the two m_I = +-1 final states.
inline HyperfineChannels total_hyperfine_flip(const SpinParams& p, const ReadoutConfig& cfg) {
  cfg.validate();
  const LevelGaps gaps = level_diagram(p, cfg.strain_gaps);
  const double amp = 0.5 * p.aperp_e_mhz;
  const int n = cfg.cycles();
  HyperfineChannels out;
  out.e12 = golden_rule_channel(amp, gaps.e12_ghz, n, 1);
  out.e12.channel = FlipChannel::AperpToE12;
  out.a1 = golden_rule_channel(amp, gaps.a1_ghz, n, 1);
  out.a1.channel = FlipChannel::AperpToA1;
  out.a2 = golden_rule_channel(amp, gaps.a2_ghz, n, 1);
  out.a2.channel = FlipChannel::AperpToA2;
  const double to0 =
      2.0 * out.e12.probability + out.a1.probability + out.a2.probability;
  out.to0 = std::min(1.0, to0);
  out.from0 = std::min(1.0, 2.0 * to0);
  out.saturated = to0 > 1.0 || 2.0 * to0 > 1.0;
  return out;
}

// Coherent quadrupole-driven |+-1> -> |-+1> flip. Rabi driving at
// sqrt(P2^2 + (gamma_N Bz)^2) restarts after every orbital dephasing window
// of length T2*; each window contributes its excited-state-time Rabi
// probability, and n(tau_wait+tau_rad)/T2* windows fit into the readout.
inline FlipChannelResult coherent_quadrupole_flip(double p2_khz, const ReadoutConfig& cfg) {
  cfg.validate();
  auto eval = [&](double t2_us) {
    const double gb = cfg.nuclear_zeeman_khz();
    const double rabi2 = p2_khz * p2_khz + gb * gb;
    if (rabi2 == 0.0) return 0.0;
    const double filter = p2_khz * p2_khz / rabi2;
    const double windows =
        cfg.cycles() * (cfg.tau_wait_ns + cfg.tau_rad_ns) * 1e-3 / t2_us;
    const double excited_time_us = t2_us * cfg.tau_rad_ns / (cfg.tau_wait_ns + cfg.tau_rad_ns);
    const double phase = 2.0 * M_PI * std::sqrt(rabi2) * 1e-3 * excited_time_us;
    const double s = std::sin(phase);
    return windows * filter * s * s;
  };
  FlipChannelResult r = detail::clamp01(FlipChannel::P2Coherent, eval(cfg.t2_star_us));
  if (cfg.t2_star_err_us > 0.0) {
    r.upper = std::min(1.0, eval(cfg.t2_star_us + cfg.t2_star_err_us));
    r.lower = std::min(1.0, eval(std::max(1e-9, cfg.t2_star_us - cfg.t2_star_err_us)));
  }
  return r;
}

// Single optical pass: lifetime-averaged quadrupole rotation, closed form
// 16 pi^2 P2^2 tau_rad^2.
inline double single_pass_quadrupole(double p2_khz, double tau_rad_ns) {
  const double x = p2_khz * 1e3 * tau_rad_ns * 1e-9;  // P2 * tau, dimensionless
  return 16.0 * M_PI * M_PI * x * x;
}

// Zero-field anticrossing pair: the quadrupole orbital-flip term couples
// |e+> (x) |-1> and |e-> (x) |+1> with strength 2 P2, so the symmetric and
// antisymmetric combinations split by 4 P2.
struct EslacPair {
  Eigen::VectorXcd psi_plus;   // 18-dim product-space vectors
  Eigen::VectorXcd psi_minus;
  double splitting_khz = 0.0;
};

inline EslacPair eslac_eigenstates(double p2_khz) {
  BasisDescriptor b;
  b.orbital = OrbitalBasis::Complex;
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(18);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(18);
  a(b.index(0, 0, -1)) = 1.0;  // |e+, mS=0, mI=-1>
  c(b.index(1, 0, +1)) = 1.0;  // |e-, mS=0, mI=+1>
  const double s = 1.0 / std::sqrt(2.0);
  EslacPair out;
  out.psi_plus = s * (a + c);
  out.psi_minus = s * (a - c);
  out.splitting_khz = 4.0 * p2_khz;
  return out;
}

struct P1Channel {
  double naive = 0.0;
  double coherent = 0.0;
};

// P1 drives |+-1> <-> |0> against the quadrupole gap P. The naive estimate
// treats it like the golden-rule channels; the coherent one evaluates the
// dephasing-window Rabi formula at detuning P.
inline P1Channel p1_channel(double p1_khz, double p_mhz, const ReadoutConfig& cfg) {
  cfg.validate();
  if (p_mhz == 0.0) throw DynamicsError("P1 channel needs a nonzero quadrupole gap P");
  P1Channel out;
  const double ratio = p1_khz * 1e-3 / p_mhz;
  out.naive = std::min(1.0, 2.0 * ratio * ratio * cfg.cycles());
  const double windows = cfg.cycles() * (cfg.tau_wait_ns + cfg.tau_rad_ns) * 1e-3 / cfg.t2_star_us;
  const double excited_time_us =
      cfg.t2_star_us * cfg.tau_rad_ns / (cfg.tau_wait_ns + cfg.tau_rad_ns);
  const double s = std::sin(2.0 * M_PI * p_mhz * excited_time_us);
  out.coherent = std::min(1.0, windows * ratio * ratio * s * s);
  return out;
}

// Phonon-limited coherence of the orbital doublet: one-phonon rates
// gamma_+ = C d^3 n(d,T), gamma_- = C d^3 (n+1), calibrated at a reference
// (delta, T, tau_-) point.
struct CoherenceModel {
  double ref_delta_ghz = 9.8;
  double ref_temp_k = 4.6;
  double ref_tau_minus_us = 0.43;

  static double bose(double delta_ghz, double temp_k) {
    if (temp_k <= 0) return 0.0;
    return 1.0 / std::expm1(constants::kelvin_per_ghz * delta_ghz / temp_k);
  }
  // rate constant C in us^-1 GHz^-3
  double rate_constant() const {
    const double n = bose(ref_delta_ghz, ref_temp_k);
    return 1.0 / (ref_tau_minus_us * std::pow(ref_delta_ghz, 3) * (n + 1.0));
  }
};

struct OrbitalCoherence {
  double tau_plus_us = 0.0;   // absorption-limited (upward) channel
  double tau_minus_us = 0.0;  // emission-limited (downward) channel
};

inline OrbitalCoherence orbital_coherence_time(double delta_perp_ghz, double temp_k,
                                               const CoherenceModel& model = {}) {
  if (delta_perp_ghz <= 0) throw DynamicsError("strain splitting must be positive");
  if (temp_k < 0) throw DynamicsError("temperature must be non-negative");
  const double c = model.rate_constant();
  const double n = CoherenceModel::bose(delta_perp_ghz, temp_k);
  const double d3 = std::pow(delta_perp_ghz, 3);
  OrbitalCoherence out;
  const double gamma_plus = c * d3 * n;
  const double gamma_minus = c * d3 * (n + 1.0);
  out.tau_plus_us = gamma_plus > 0 ? 1.0 / gamma_plus : std::numeric_limits<double>::infinity();
  out.tau_minus_us = 1.0 / gamma_minus;
  return out;
}

// One optical cycle in the perturbed basis: probabilities of the four
// absorption->emission process outcomes for admixture delta = amplitude/gap.
// I: no flip, II: flip at emission, III: double flip, IV: flip at absorption.
inline std::array<double, 4> process_probabilities(double delta) {
  if (std::abs(delta) > 1.0) throw DynamicsError("admixture |delta| must be <= 1");
  const double d2 = delta * delta;
  return {(1 - d2) * (1 - d2), (1 - d2) * d2, d2 * d2, d2 * (1 - d2)};
}

// The three observable transition rows over a full readout.
struct FlipRow {
  double probability = 0.0;
  std::optional<double> upper;
  std::optional<double> lower;
  bool saturated = false;
};

struct FlipReport {
  FlipRow pm1_to_mp1;  // coherent quadrupole
  FlipRow pm1_to_0;
  FlipRow zero_to_pm1;
  HyperfineChannels channels;
  P1Channel p1;
};

inline FlipReport flip_report(const SpinParams& p, const ReadoutConfig& cfg) {
  cfg.validate();
  FlipReport r;
  r.channels = total_hyperfine_flip(p, cfg);
  const FlipChannelResult q = coherent_quadrupole_flip(p.p2_e_mhz * 1e3, cfg);
  r.pm1_to_mp1 = {q.probability, q.upper, q.lower, q.saturated};
  r.pm1_to_0 = {r.channels.to0, std::nullopt, std::nullopt, r.channels.saturated};
  r.zero_to_pm1 = {r.channels.from0, std::nullopt, std::nullopt, r.channels.saturated};
  if (p.p_e_mhz != 0.0) r.p1 = p1_channel(p.p1_e_mhz * 1e3, p.p_e_mhz, cfg);
  return r;
}

}  // namespace spinlab
