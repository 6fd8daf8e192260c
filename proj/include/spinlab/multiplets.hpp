#pragma once

// The six spin-orbit multiplets of the orbital-doublet S=1 manifold, with
// exact coefficients over the product basis |e_mL> (x) |m_S>.
// Basis order matches the Hamiltonian module: index = orbital*3 + spin with
// orbital (e+, e-) and spin m_S (+1, 0, -1).

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "spinlab/exact.hpp"
#include "spinlab/group.hpp"

namespace spinlab {

enum class Multiplet { A1, A2, Ex, Ey, E1, E2 };

inline const char* multiplet_name(Multiplet m) {
  switch (m) {
    case Multiplet::A1: return "A1";
    case Multiplet::A2: return "A2";
    case Multiplet::Ex: return "Ex";
    case Multiplet::Ey: return "Ey";
    case Multiplet::E1: return "E1";
    case Multiplet::E2: return "E2";
  }
  return "?";
}

constexpr std::array<Multiplet, 6> kMultiplets = {Multiplet::A1, Multiplet::A2, Multiplet::Ex,
                                                  Multiplet::Ey, Multiplet::E1, Multiplet::E2};

// Coefficients are stored times sqrt(2); all entries are in {0, +-1, +-i}.
struct MultipletState {
  Multiplet label;
  std::array<ExComplex, 6> num;  // over (e+,+1),(e+,0),(e+,-1),(e-,+1),(e-,0),(e-,-1)

  Eigen::VectorXcd vector() const {
    Eigen::VectorXcd v(6);
    const double s = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < 6; ++k) v(k) = s * num[k].value();
    return v;
  }

  // Exact inner product <this|other> (the 1/2 from the two sqrt(2) factors).
  ExComplex dot(const MultipletState& o) const {
    ExComplex acc(0);
    for (int k = 0; k < 6; ++k) acc = acc + num[k].conj() * o.num[k];
    return acc * ExComplex(Root3(Rational(1, 2)));
  }
};

namespace detail {
inline int product_index(int orbital_pm, int m_s) {
  // orbital_pm: 0 -> e+, 1 -> e- ; m_s: +1,0,-1
  return orbital_pm * 3 + (1 - m_s);
}
}  // namespace detail

inline const std::array<MultipletState, 6>& multiplet_states() {
  static const std::array<MultipletState, 6> states = [] {
    using detail::product_index;
    const ExComplex one(1);
    const ExComplex i = ExComplex::i_unit();
    std::array<MultipletState, 6> s{};
    auto set = [](MultipletState& st, int orb, int ms, ExComplex c) {
      st.num[product_index(orb, ms)] = c;
    };
    s[0].label = Multiplet::A1;  // (|E-,+1> - |E+,-1>)/sqrt2
    set(s[0], 1, +1, one);
    set(s[0], 0, -1, -one);
    s[1].label = Multiplet::A2;  // (|E-,+1> + |E+,-1>)/sqrt2
    set(s[1], 1, +1, one);
    set(s[1], 0, -1, one);
    s[2].label = Multiplet::Ex;  // -(|E+,0> + |E-,0>)/sqrt2
    set(s[2], 0, 0, -one);
    set(s[2], 1, 0, -one);
    s[3].label = Multiplet::Ey;  // i(|E+,0> - |E-,0>)/sqrt2
    set(s[3], 0, 0, i);
    set(s[3], 1, 0, -i);
    s[4].label = Multiplet::E1;  // (|E-,-1> - |E+,+1>)/sqrt2
    set(s[4], 1, -1, one);
    set(s[4], 0, +1, -one);
    s[5].label = Multiplet::E2;  // -i(|E-,-1> + |E+,+1>)/sqrt2
    set(s[5], 1, -1, -i);
    set(s[5], 0, +1, -i);
    return s;
  }();
  return states;
}

inline const MultipletState& multiplet_state(Multiplet m) {
  return multiplet_states()[static_cast<int>(m)];
}

// Action of group element n on the product basis. The orbital kets follow
// g(e+, e-)^T = N_n (e+, e-)^T (source |e_i> maps onto |e_j> with coefficient
// N[i][j]). Spin is axial: the Clebsch-Gordan dictionary pairs the E-rep
// objects with (|+1>, -|-1>), so the m_S = +-1 pair transforms with the
// off-diagonal entries of N_n negated, and m_S = 0 is A2-like (odd under the
// mirrors).
inline MultipletState apply_group_operation(const MultipletState& st, int element_index) {
  const ComplexMat2& nmat = group_elements()[element_index - 1].complex_matrix;
  const ExComplex det(Root3(parity(element_index)));
  MultipletState out{};
  out.label = st.label;
  auto addto = [&](int k, ExComplex c) { out.num[k] = out.num[k] + c; };
  using detail::product_index;
  for (int orb = 0; orb < 2; ++orb)
    for (int ms : {+1, 0, -1}) {
      const ExComplex c = st.num[product_index(orb, ms)];
      if (c.is_zero()) continue;
      for (int orb2 = 0; orb2 < 2; ++orb2) {
        const ExComplex oc = nmat[orb][orb2];
        if (oc.is_zero()) continue;
        if (ms == 0) {
          addto(product_index(orb2, 0), c * oc * det);
        } else {
          const int spin = ms > 0 ? 0 : 1;  // doublet slot (+1, -1)
          for (int spin2 = 0; spin2 < 2; ++spin2) {
            ExComplex sc = nmat[spin][spin2];
            if (sc.is_zero()) continue;
            if (spin != spin2) sc = -sc;
            addto(product_index(orb2, spin2 == 0 ? +1 : -1), c * oc * sc);
          }
        }
      }
    }
  return out;
}

}  // namespace spinlab
