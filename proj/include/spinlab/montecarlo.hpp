#pragma once

// Stochastic trajectory oracle for the flip-probability formulas. It
// realizes the optical-cycle process model: every cycle draws an exponential
// excited-state dwell, the hyperfine flip channels act as per-cycle two-level
// transitions (amplitudes and gaps taken from the assembled 18-dim
// Hamiltonian), and the quadrupole-driven nuclear pair evolves coherently
// across cycles under the Ex-branch nuclear block, restarted at every
// orbital dephasing window. Counts are linear (flip events), matching the
// linear-in-n analytic accounting.
//
// Determinism: trajectory k uses an independent generator seeded from
// (seed, ensemble, k); results are bitwise reproducible and independent of
// the number of worker threads.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/dynamics.hpp"
#include "spinlab/hamiltonian.hpp"

namespace spinlab {

namespace rng {

// splitmix64, used for seeding
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256**
struct Xoshiro256 {
  std::uint64_t s[4];

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s) w = splitmix64(sm);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t next() {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }
  double uniform() {  // in [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }
};

}  // namespace rng

struct McOptions {
  bool fixed_lifetime = false;   // deterministic dwell = tau_rad (Rabi cross-check)
  double ey_detuning_ghz = 8.0;  // strain splitting pushing Ey below the driven Ex
  int threads = 0;               // 0: hardware concurrency
};

struct McRow {
  double mean = 0.0;      // sampled flip events per trajectory
  double se = 0.0;        // standard error of the mean
  double expected = 0.0;  // probability-accumulated (no sampling noise)
};

struct McReport {
  McRow pm1_to_mp1;
  McRow pm1_to_0;
  McRow zero_to_pm1;
  int trajectories = 0;
  std::uint64_t seed = 0;
  double unitarity_defect = 0.0;  // max |U U^dag - 1| over the evolutions used
};

namespace detail {

struct FlipPath {
  int target_mi;       // nuclear projection after the flip
  double amp_factor;   // 4V^2 / (gap^2 + 4V^2)
  double omega_mhz;    // sqrt(gap^2 + 4V^2)
};

struct McMachine {
  // channels[1 - m_i] lists the per-cycle flip paths out of |Ex, m_i>
  std::array<std::vector<FlipPath>, 3> channels;
  Eigen::Vector3d nuc_evals;      // eigenvalues of the Ex-branch nuclear block (MHz)
  Eigen::Matrix3cd nuc_evecs;
  double unitarity_defect = 0.0;

  Eigen::Vector3cd evolve_nuclear(const Eigen::Vector3cd& psi, double t_ns) const {
    Eigen::Vector3cd a = nuc_evecs.adjoint() * psi;
    for (int k = 0; k < 3; ++k)
      a(k) *= std::exp(std::complex<double>(0, -2.0 * M_PI * nuc_evals(k) * t_ns * 1e-3));
    return nuc_evecs * a;
  }
};

inline McMachine build_machine(const SpinParams& params, const ReadoutConfig& cfg,
                               const McOptions& opt) {
  // Assemble the excited Hamiltonian with the observed level placement: the
  // electronic multiplets are pinned to the strain-adjusted gaps and Ey is
  // pushed off-resonance, leaving all nuclear couplings intact.
  SpinParams p = params;
  p.delta_x_mhz = 0.0;
  p.delta_y_mhz = 0.0;
  const std::uint32_t coupling_terms = TermAll & ~TermZeeman & ~TermStrain;
  Eigen::MatrixXcd h = build_excited_h(p, Eigen::Vector3d::Zero(), OrbitalBasis::Complex,
                                       coupling_terms).matrix;
  // nuclear Zeeman at the configured operating point
  {
    const double gb_mhz = cfg.nuclear_zeeman_khz() * 1e-3;
    BasisDescriptor b;
    b.orbital = OrbitalBasis::Complex;
    for (int orb = 0; orb < 2; ++orb)
      for (int ms : {+1, 0, -1})
        for (int mi : {+1, 0, -1}) {
          const int k = b.index(orb, ms, mi);
          h(k, k) -= gb_mhz * mi;
        }
  }
  // electronic level placement
  const Eigen::MatrixXcd h_el =
      build_excited_h(p, Eigen::Vector3d::Zero(), OrbitalBasis::Complex,
                      TermZeroField | TermSpinOrbit | TermOrbitalSpinSpin).matrix;
  const LevelGaps gaps = level_diagram(p, cfg.strain_gaps);
  auto expectation = [&](const Eigen::MatrixXcd& m, Multiplet mu) {
    const Eigen::VectorXcd v = multiplet_product_state(mu, 0);
    return std::real(std::complex<double>(v.adjoint() * m * v));
  };
  const double e_ex = expectation(h_el, Multiplet::Ex);
  const std::array<std::pair<Multiplet, double>, 5> targets = {{
      {Multiplet::E1, -gaps.e12_ghz * 1e3},
      {Multiplet::E2, -gaps.e12_ghz * 1e3},
      {Multiplet::A1, gaps.a1_ghz * 1e3},
      {Multiplet::A2, gaps.a2_ghz * 1e3},
      {Multiplet::Ey, -opt.ey_detuning_ghz * 1e3},
  }};
  for (const auto& [mu, target] : targets) {
    const double shift = target - (expectation(h_el, mu) - e_ex);
    for (int mi : {+1, 0, -1}) {
      const Eigen::VectorXcd v = multiplet_product_state(mu, mi);
      h += shift * (v * v.adjoint());
    }
  }

  McMachine m;
  // per-cycle flip channels out of |Ex, m_i>
  for (int mi : {+1, 0, -1}) {
    const Eigen::VectorXcd src = multiplet_product_state(Multiplet::Ex, mi);
    const double e_src = std::real(std::complex<double>(src.adjoint() * h * src));
    for (Multiplet mu : {Multiplet::A1, Multiplet::A2, Multiplet::E1, Multiplet::E2})
      for (int mf : {+1, 0, -1}) {
        if (std::abs(mf - mi) != 1) continue;  // double flips neglected
        const Eigen::VectorXcd dst = multiplet_product_state(mu, mf);
        const double v = std::abs(std::complex<double>(dst.adjoint() * h * src));
        if (v < 1e-12) continue;
        const double gap = std::real(std::complex<double>(dst.adjoint() * h * dst)) - e_src;
        FlipPath path;
        path.target_mi = mf;
        path.omega_mhz = std::sqrt(gap * gap + 4.0 * v * v);
        path.amp_factor = 4.0 * v * v / (path.omega_mhz * path.omega_mhz);
        m.channels[1 - mi].push_back(path);
      }
  }
  // coherent nuclear block within the driven Ex branch
  Eigen::Matrix3cd block;
  for (int a : {+1, 0, -1})
    for (int b : {+1, 0, -1}) {
      const Eigen::VectorXcd va = multiplet_product_state(Multiplet::Ex, a);
      const Eigen::VectorXcd vb = multiplet_product_state(Multiplet::Ex, b);
      block(1 - a, 1 - b) = std::complex<double>(va.adjoint() * h * vb);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(block);
  m.nuc_evals = solver.eigenvalues();
  m.nuc_evecs = solver.eigenvectors();
  m.unitarity_defect =
      (m.nuc_evecs * m.nuc_evecs.adjoint() - Eigen::Matrix3cd::Identity()).norm();
  return m;
}

struct TrajectoryCounts {
  double row1_sampled = 0, row1_expected = 0;
  double row2_sampled = 0, row2_expected = 0;
  double row3_sampled = 0, row3_expected = 0;
};

inline TrajectoryCounts run_trajectory(const McMachine& m, const ReadoutConfig& cfg,
                                       const McOptions& opt, int init_mi, rng::Xoshiro256& gen) {
  TrajectoryCounts out;
  const int n = cfg.cycles();
  const bool windows_enabled = std::isfinite(cfg.t2_star_us) && cfg.t2_star_us > 0;
  const int window_cycles =
      windows_enabled
          ? std::max(1, static_cast<int>(std::lround(cfg.t2_star_us * 1e3 /
                                                     (cfg.tau_rad_ns + cfg.tau_wait_ns))))
          : n + 1;
  Eigen::Vector3cd psi = Eigen::Vector3cd::Zero();
  psi(1 - init_mi) = 1.0;
  const auto& paths = m.channels[1 - init_mi];

  auto sample_windows = [&](Eigen::Vector3cd& state) {
    // dephasing boundary: measure the coherently driven flips, then restart
    for (int mf : {+1, 0, -1}) {
      if (mf == init_mi) continue;
      const double p = std::norm(state(1 - mf));
      const bool row1 = init_mi != 0 && mf == -init_mi;
      const bool row2 = init_mi != 0 && mf == 0;
      const bool row3 = init_mi == 0;
      const double hit = gen.uniform() < p ? 1.0 : 0.0;
      if (row1) {
        out.row1_sampled += hit;
        out.row1_expected += p;
      } else if (row2) {
        out.row2_sampled += hit;
        out.row2_expected += p;
      } else if (row3) {
        out.row3_sampled += hit;
        out.row3_expected += p;
      }
    }
    state.setZero();
    state(1 - init_mi) = 1.0;
  };

  for (int c = 1; c <= n; ++c) {
    const double t = opt.fixed_lifetime ? cfg.tau_rad_ns : gen.exponential(cfg.tau_rad_ns);
    // coherent evolution of the nuclear amplitudes during the excited dwell
    psi = m.evolve_nuclear(psi, t);
    // per-cycle hyperfine flip channels (incoherent by construction: the
    // ground-state dwell dephases the m_S sectors every cycle)
    for (const auto& path : paths) {
      const double s = std::sin(M_PI * path.omega_mhz * t * 1e-3);
      const double p = path.amp_factor * s * s;
      const bool flips_to_zero = path.target_mi == 0;
      if (init_mi == 0) {
        out.row3_expected += p;
        if (gen.uniform() < p) out.row3_sampled += 1.0;
      } else if (flips_to_zero) {
        out.row2_expected += p;
        if (gen.uniform() < p) out.row2_sampled += 1.0;
      }
    }
    if (c % window_cycles == 0) sample_windows(psi);
  }
  if (n % window_cycles != 0) sample_windows(psi);
  return out;
}

}  // namespace detail

inline McReport monte_carlo_readout(const SpinParams& params, const ReadoutConfig& cfg,
                                    std::uint64_t seed, int n_trajectories,
                                    const McOptions& opt = {}) {
  if (n_trajectories < 1) throw DynamicsError("need at least one trajectory");
  cfg.validate();
  const detail::McMachine machine = detail::build_machine(params, cfg, opt);

  // ensemble 0: initial m_I = +-1 (rows 1 and 2); ensemble 1: m_I = 0 (row 3)
  std::vector<detail::TrajectoryCounts> counts(2 * n_trajectories);
  int threads = opt.threads > 0 ? opt.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int job = next.fetch_add(1);
      if (job >= 2 * n_trajectories) break;
      const int ensemble = job / n_trajectories;
      const int k = job % n_trajectories;
      std::uint64_t s = seed;
      rng::splitmix64(s);
      std::uint64_t mix = s ^ (0x517cc1b727220a95ull * (ensemble + 1)) ^
                          (0x2545f4914f6cdd1dull * static_cast<std::uint64_t>(k + 1));
      rng::Xoshiro256 gen(mix);
      const int init_mi = ensemble == 1 ? 0 : (k % 2 == 0 ? +1 : -1);
      counts[job] = detail::run_trajectory(machine, cfg, opt, init_mi, gen);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  auto reduce = [&](int ensemble, auto sampled, auto expected) {
    McRow row;
    double sum = 0, sum2 = 0, esum = 0;
    for (int k = 0; k < n_trajectories; ++k) {
      const auto& c = counts[ensemble * n_trajectories + k];
      const double v = sampled(c);
      sum += v;
      sum2 += v * v;
      esum += expected(c);
    }
    const double nn = n_trajectories;
    row.mean = sum / nn;
    row.expected = esum / nn;
    if (n_trajectories > 1) {
      const double var = std::max(0.0, (sum2 - sum * sum / nn) / (nn - 1.0));
      row.se = std::sqrt(var / nn);
    }
    return row;
  };

  McReport rep;
  rep.pm1_to_mp1 = reduce(0, [](const auto& c) { return c.row1_sampled; },
                          [](const auto& c) { return c.row1_expected; });
  rep.pm1_to_0 = reduce(0, [](const auto& c) { return c.row2_sampled; },
                        [](const auto& c) { return c.row2_expected; });
  rep.zero_to_pm1 = reduce(1, [](const auto& c) { return c.row3_sampled; },
                           [](const auto& c) { return c.row3_expected; });
  rep.trajectories = n_trajectories;
  rep.seed = seed;
  rep.unitarity_defect = machine.unitarity_defect;
  return rep;
}

}  // namespace spinlab
