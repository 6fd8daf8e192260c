#pragma once

// Construction and exact diagonalization of the ground (9-dim) and excited
// (18-dim) spin Hamiltonians on the orbital (x) electron-spin (x) nuclear-spin
// product space, plus eigenstate labeling by multiplet character.
//
// Basis ordering contract: index = (orbital*3 + electron)*3 + nuclear with
// orbital (e+, e-) in the complex basis or (e_x, e_y) in the real one,
// electron m_S in (+1, 0, -1) and nuclear m_I in (+1, 0, -1). All energies
// in MHz.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinlab/constants.hpp"
#include "spinlab/group.hpp"
#include "spinlab/multiplets.hpp"
#include "spinlab/params.hpp"

namespace spinlab {

struct HamiltonianError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OrbitalBasis { None, Real, Complex };

struct BasisDescriptor {
  OrbitalBasis orbital = OrbitalBasis::None;
  int dimension() const { return orbital == OrbitalBasis::None ? 9 : 18; }
  // (orbital, m_s, m_i) -> flat index; m_s, m_i in {+1, 0, -1}
  int index(int orbital_slot, int m_s, int m_i) const {
    const int es = 1 - m_s;
    const int ns = 1 - m_i;
    if (orbital == OrbitalBasis::None) return es * 3 + ns;
    return (orbital_slot * 3 + es) * 3 + ns;
  }
};

struct ProductOperator {
  Eigen::MatrixXcd matrix;
  BasisDescriptor basis;
};

struct SpinMatrices {
  Eigen::Matrix3cd sz, sp, sm, sx, sy;
};

// Standard spin-1 operators in the (+1, 0, -1) ordering.
inline SpinMatrices spin_matrices(int spin_times_two = 2) {
  if (spin_times_two != 2) throw HamiltonianError("only S = 1 is supported");
  SpinMatrices s;
  const double r2 = std::sqrt(2.0);
  s.sz = Eigen::Vector3cd(1, 0, -1).asDiagonal();
  s.sp = Eigen::Matrix3cd::Zero();
  s.sp(0, 1) = r2;
  s.sp(1, 2) = r2;
  s.sm = s.sp.adjoint();
  s.sx = 0.5 * (s.sp + s.sm);
  s.sy = std::complex<double>(0, -0.5) * (s.sp - s.sm);
  return s;
}

struct OrbitalOperators {
  // Pauli-type operators labeled in the real {e_x, e_y} frame, expressed in
  // the requested basis, plus the complex-basis ladder pair.
  Eigen::Matrix2cd s0, sx, sy, sz, sp, sm;
};

inline OrbitalOperators orbital_operators(OrbitalBasis basis) {
  if (basis == OrbitalBasis::None) throw HamiltonianError("orbital operators need a 2-dim basis");
  const std::complex<double> i(0, 1);
  OrbitalOperators o;
  o.s0 = Eigen::Matrix2cd::Identity();
  o.sx << 0, 1, 1, 0;
  o.sy << 0, -i, i, 0;
  o.sz << 1, 0, 0, -1;
  if (basis == OrbitalBasis::Complex) {
    o.sx = real_to_complex_basis(o.sx);
    o.sy = real_to_complex_basis(o.sy);
    o.sz = real_to_complex_basis(o.sz);
    o.sp << 0, 1, 0, 0;  // |e+><e-|
    o.sm << 0, 0, 1, 0;  // |e-><e+|
  } else {
    Eigen::Matrix2cd sp_c;
    sp_c << 0, 1, 0, 0;
    o.sp = complex_to_real_basis(sp_c);
    o.sm = o.sp.adjoint();
  }
  return o;
}

// Toggleable blocks of the excited-state Hamiltonian.
enum ExcitedTerm : std::uint32_t {
  TermZeeman = 1u << 0,
  TermStrain = 1u << 1,
  TermZeroField = 1u << 2,        // D_e
  TermSpinOrbit = 1u << 3,        // lambda
  TermOrbitalSpinSpin = 1u << 4,  // D1, D2
  TermQuadrupole = 1u << 5,       // P_e
  TermOrbitalQuadrupole = 1u << 6,  // P1, P2
  TermOrbitalHyperfine = 1u << 7,   // A_orb
  TermHyperfine = 1u << 8,          // Apar, Aperp
  TermOrbitalHyperfineFlip = 1u << 9,  // A1, A2
  TermAll = 0x3ffu,
};

namespace detail {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

inline Eigen::MatrixXcd kron3(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                              const Eigen::MatrixXcd& c) {
  return kron(kron(a, b), c);
}

inline Eigen::Matrix3cd anticomm(const Eigen::Matrix3cd& a, const Eigen::Matrix3cd& b) {
  return a * b + b * a;
}

}  // namespace detail

// H_g = D_g (Sz^2 - 2/3) + P_g (Iz^2 - 2/3) + Apar Sz Iz
//       + 1/2 Aperp (S+I- + S-I+) + Zeeman.
inline ProductOperator build_ground_h(const SpinParams& p,
                                      const Eigen::Vector3d& b_tesla = Eigen::Vector3d::Zero()) {
  using detail::kron;
  const SpinMatrices s = spin_matrices();
  const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
  const double third2 = 2.0 / 3.0;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(9, 9);
  h += p.d_g_mhz * kron(s.sz * s.sz - third2 * id, id);
  h += p.p_g_mhz * kron(id, s.sz * s.sz - third2 * id);
  h += p.apar_g_mhz * kron(s.sz, s.sz);
  h += 0.5 * p.aperp_g_mhz * (kron(s.sp, s.sm) + kron(s.sm, s.sp));
  const double mu_b = constants::mu_b_mhz_per_tesla;
  const double mu_i = constants::mu_n_mhz_per_tesla;
  const Eigen::Matrix3cd sv[3] = {s.sx, s.sy, s.sz};
  for (int k = 0; k < 3; ++k) {
    h += mu_b * p.g_s * b_tesla(k) * kron(sv[k], id);
    h -= mu_i * p.g_i * b_tesla(k) * kron(id, sv[k]);
  }
  ProductOperator op;
  op.matrix = std::move(h);
  op.basis.orbital = OrbitalBasis::None;
  return op;
}

// Full excited-state Hamiltonian on orbital (x) S (x) I. The strain and
// field terms use the parameter set unless overridden by the caller.
inline ProductOperator build_excited_h(const SpinParams& p,
                                       const Eigen::Vector3d& b_tesla,
                                       OrbitalBasis basis = OrbitalBasis::Complex,
                                       std::uint32_t terms = TermAll) {
  using detail::anticomm;
  using detail::kron3;
  if (basis == OrbitalBasis::None) throw HamiltonianError("excited state needs an orbital basis");
  const SpinMatrices s = spin_matrices();
  const OrbitalOperators o = orbital_operators(basis);
  const Eigen::Matrix3cd id3 = Eigen::Matrix3cd::Identity();
  const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
  const double third2 = 2.0 / 3.0;

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(18, 18);
  if (terms & TermZeroField) h += p.d_e_mhz * kron3(id2, s.sz * s.sz - third2 * id3, id3);
  if (terms & TermSpinOrbit) h -= p.lambda_e_mhz * kron3(o.sy, s.sz, id3);
  if (terms & TermOrbitalSpinSpin) {
    h += p.d1_e_mhz * (kron3(o.sz, anticomm(s.sx, s.sz), id3) - kron3(o.sx, anticomm(s.sy, s.sz), id3));
    h += p.d2_e_mhz * (kron3(o.sz, s.sy * s.sy - s.sx * s.sx, id3) - kron3(o.sx, anticomm(s.sx, s.sy), id3));
  }
  if (terms & TermQuadrupole) h += p.p_e_mhz * kron3(id2, id3, s.sz * s.sz - third2 * id3);
  if (terms & TermOrbitalQuadrupole) {
    h += p.p1_e_mhz * (kron3(o.sz, id3, anticomm(s.sx, s.sz)) - kron3(o.sx, id3, anticomm(s.sy, s.sz)));
    h += p.p2_e_mhz * (kron3(o.sz, id3, s.sy * s.sy - s.sx * s.sx) - kron3(o.sx, id3, anticomm(s.sx, s.sy)));
  }
  if (terms & TermOrbitalHyperfine) h -= p.aorb_e_mhz * kron3(o.sy, id3, s.sz);
  if (terms & TermHyperfine) {
    h += p.apar_e_mhz * kron3(id2, s.sz, s.sz);
    h += p.aperp_e_mhz * (kron3(id2, s.sx, s.sx) + kron3(id2, s.sy, s.sy));
  }
  if (terms & TermOrbitalHyperfineFlip) {
    h += p.a1_e_mhz * (kron3(o.sz, s.sx, s.sz) + kron3(o.sz, s.sz, s.sx) -
                       kron3(o.sx, s.sy, s.sz) - kron3(o.sx, s.sz, s.sy));
    h += p.a2_e_mhz * (kron3(o.sz, s.sy, s.sy) - kron3(o.sz, s.sx, s.sx) -
                       kron3(o.sx, s.sx, s.sy) - kron3(o.sx, s.sy, s.sx));
  }
  if (terms & TermStrain) {
    h -= p.delta_x_mhz * kron3(o.sz, id3, id3);
    h += p.delta_y_mhz * kron3(o.sx, id3, id3);
  }
  if (terms & TermZeeman) {
    const double mu_b = constants::mu_b_mhz_per_tesla;
    const double mu_i = constants::mu_n_mhz_per_tesla;
    const Eigen::Matrix3cd sv[3] = {s.sx, s.sy, s.sz};
    for (int k = 0; k < 3; ++k) {
      h += mu_b * p.g_s * b_tesla(k) * kron3(id2, sv[k], id3);
      h -= mu_i * p.g_i * b_tesla(k) * kron3(id2, id3, sv[k]);
    }
    h += mu_b * p.g_l * b_tesla(2) * kron3(o.sy, id3, id3);
  }

  ProductOperator op;
  op.matrix = std::move(h);
  op.basis.orbital = basis;
  return op;
}

inline ProductOperator build_excited_h(const SpinParams& p, OrbitalBasis basis = OrbitalBasis::Complex,
                                       std::uint32_t terms = TermAll) {
  return build_excited_h(p, p.b_field_tesla, basis, terms);
}

// Electronic 6x6 block over (|E-,+1>, |E+,-1>, |E+,0>, |E-,0>, |E-,-1>, |E+,+1>)
// with the conventional (2D/3, -D/3) diagonal offsets.
inline Eigen::MatrixXcd electronic_block(const SpinParams& p) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(6, 6);
  const double d = p.d_e_mhz, lam = p.lambda_e_mhz;
  const double d1 = p.d1_e_mhz, d2 = p.d2_e_mhz;
  const double r2 = std::sqrt(2.0);
  m(0, 0) = m(1, 1) = 2.0 * d / 3.0 + lam;
  m(2, 2) = m(3, 3) = -d / 3.0;
  m(4, 4) = m(5, 5) = 2.0 * d / 3.0 - lam;
  m(0, 1) = m(1, 0) = 2.0 * d2;
  m(2, 4) = m(4, 2) = r2 * d1;
  m(3, 5) = m(5, 3) = -r2 * d1;
  return m;
}

// Reference product state |multiplet> (x) |m_I> in the complex product basis.
inline Eigen::VectorXcd multiplet_product_state(Multiplet m, int m_i) {
  const Eigen::VectorXcd el = multiplet_state(m).vector();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(18);
  const int ns = 1 - m_i;
  for (int k = 0; k < 6; ++k) v(k * 3 + ns) = el(k);
  return v;
}

struct LabeledLevel {
  double energy_mhz = 0.0;
  std::string label = "mixed";  // multiplet or m_S label
  int m_i = 0;                  // dominant nuclear projection
  double overlap = 0.0;         // squared overlap with the assigned reference
};

namespace detail {

struct Reference {
  std::string label;
  int m_i;
  int multiplet_rank;  // for tie-breaking
  Eigen::VectorXcd state;
};

inline std::vector<Reference> reference_states(const BasisDescriptor& basis) {
  std::vector<Reference> refs;
  if (basis.orbital == OrbitalBasis::None) {
    for (int ms : {+1, 0, -1})
      for (int mi : {+1, 0, -1}) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(9);
        v(basis.index(0, ms, mi)) = 1.0;
        refs.push_back({"mS=" + std::to_string(ms), mi, 1 - ms, std::move(v)});
      }
    return refs;
  }
  for (int r = 0; r < 6; ++r) {
    const Multiplet m = kMultiplets[r];
    for (int mi : {+1, 0, -1}) {
      Eigen::VectorXcd v = multiplet_product_state(m, mi);
      if (basis.orbital == OrbitalBasis::Real) {
        // conj(V)^dagger block-rotates complex-basis vectors into real ones
        const std::complex<double> i(0, 1);
        Eigen::Matrix2cd w;
        w << -1.0, i, 1.0, i;
        w /= std::sqrt(2.0);
        Eigen::MatrixXcd wfull = Eigen::MatrixXcd::Zero(18, 18);
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            wfull.block(a * 9, b * 9, 9, 9) =
                w.adjoint()(a, b) * Eigen::MatrixXcd::Identity(9, 9);
        v = wfull * v;
      }
      refs.push_back({multiplet_name(m), mi, r, std::move(v)});
    }
  }
  return refs;
}

}  // namespace detail

// Eigenvalues ascending; every eigenvector is labeled by its best-matching
// reference product state. Within a degenerate cluster the assignment uses
// the projection weight of each reference onto the cluster subspace, which
// is invariant under arbitrary rotations inside the cluster.
inline std::vector<LabeledLevel> eigenlevels(const ProductOperator& op,
                                             double degeneracy_tol_mhz = 1e-6) {
  const Eigen::MatrixXcd& h = op.matrix;
  const double scale = std::max(1.0, h.norm());
  if ((h - h.adjoint()).norm() > 1e-10 * scale)
    throw HamiltonianError("eigenlevels needs a Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXcd evecs = solver.eigenvectors();
  const int n = static_cast<int>(evals.size());

  const auto refs = detail::reference_states(op.basis);
  std::vector<LabeledLevel> out(n);

  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && evals(end) - evals(end - 1) <= degeneracy_tol_mhz) ++end;
    const int k = end - start;
    if (k == n) {
      // fully degenerate spectrum carries no basis information
      for (int slot = 0; slot < k; ++slot) out[slot].energy_mhz = evals(slot);
      break;
    }
    const Eigen::MatrixXcd cluster = evecs.middleCols(start, k);

    // projection weight of each reference onto the cluster subspace
    std::vector<std::pair<double, int>> weighted;
    for (int r = 0; r < static_cast<int>(refs.size()); ++r) {
      const double w = (cluster.adjoint() * refs[r].state).squaredNorm();
      weighted.emplace_back(w, r);
    }
    std::stable_sort(weighted.begin(), weighted.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      const auto& ra = refs[a.second];
      const auto& rb = refs[b.second];
      if (ra.m_i != rb.m_i) return ra.m_i > rb.m_i;
      return ra.multiplet_rank < rb.multiplet_rank;
    });
    for (int slot = 0; slot < k; ++slot) {
      LabeledLevel lev;
      lev.energy_mhz = evals(start + slot);
      const auto& [w, r] = weighted[slot];
      lev.overlap = w;
      if (w >= 0.5) {
        lev.label = refs[r].label;
        lev.m_i = refs[r].m_i;
      }
      out[start + slot] = lev;
    }
    start = end;
  }
  return out;
}

// Energy gaps (GHz) from |Ex/Ey> to the m_S = +-1 multiplets, using the
// additive strain offsets Xi fitted to observed line positions.
struct StrainGaps {
  double xi_a1_ghz = 0.0;
  double xi_a2_ghz = 0.0;
  double xi_e12_ghz = 0.0;
};

struct LevelGaps {
  double e12_ghz = 0.0;
  double a1_ghz = 0.0;
  double a2_ghz = 0.0;
};

inline LevelGaps level_diagram(const SpinParams& p, const StrainGaps& xi) {
  const double lam = p.lambda_e_mhz * 1e-3;
  const double d = p.d_e_mhz * 1e-3;
  const double d2 = p.d2_e_mhz * 1e-3;
  LevelGaps g;
  g.e12_ghz = lam - d + xi.xi_e12_ghz;
  g.a1_ghz = lam + d - 2.0 * d2 + xi.xi_a1_ghz;
  g.a2_ghz = lam + d + 2.0 * d2 + xi.xi_a2_ghz;
  return g;
}

// Alternative path: gaps from full diagonalization with the (delta_x,
// delta_y) strain operator, measured from the optically driven branch (the
// upper of Ex/Ey). May differ from the Xi-fitted numbers.
inline LevelGaps level_diagram_from_strain(const SpinParams& p) {
  ProductOperator h = build_excited_h(p, Eigen::Vector3d::Zero(), OrbitalBasis::Complex,
                                      TermZeroField | TermSpinOrbit | TermOrbitalSpinSpin | TermStrain);
  const auto levels = eigenlevels(h, 1e-6);
  auto energy_of = [&](const std::string& label) {
    double acc = 0;
    int cnt = 0;
    for (const auto& l : levels)
      if (l.label == label) {
        acc += l.energy_mhz;
        ++cnt;
      }
    if (cnt == 0) throw HamiltonianError("level " + label + " not identified");
    return acc / cnt;
  };
  const double ex = energy_of("Ex");
  LevelGaps g;
  g.e12_ghz = (ex - 0.5 * (energy_of("E1") + energy_of("E2"))) * 1e-3;
  g.a1_ghz = (energy_of("A1") - ex) * 1e-3;
  g.a2_ghz = (energy_of("A2") - ex) * 1e-3;
  return g;
}

}  // namespace spinlab
