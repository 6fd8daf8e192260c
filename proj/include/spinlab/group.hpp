#pragma once

// C3v single-group machinery: the six symmetry elements in the real {e_x,e_y}
// basis (M_n) and the circularly polarized basis (N_n = V M_n V^-1), the
// multiplication table, characters, the 4-dim product representation on
// {SxSx, SxSy, SySx, SySy}, and the generalized projection operators.
//
// Conventions. Element order is fixed to (E, C3+, C3-, sv1, sv2, sv3) and the
// complex basis is Condon-Shortley, |e_pm> = -/+(|e_x> pm i|e_y>)/sqrt(2).
// Note on the literature: tabulated N matrices for C3v differ between sources
// by a relabeling of C3+/C3- (and of sv2/sv3); both labelings satisfy the
// group axioms.  Here the N_n are *derived* from the M_n by conjugation, so
// the two tables are consistent with each other by construction.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "spinlab/exact.hpp"

namespace spinlab {

enum class Irrep { A1, A2, E };

inline const char* irrep_name(Irrep g) {
  switch (g) {
    case Irrep::A1: return "A1";
    case Irrep::A2: return "A2";
    case Irrep::E: return "E";
  }
  return "?";
}

inline int irrep_dim(Irrep g) { return g == Irrep::E ? 2 : 1; }

using RealMat2 = std::array<std::array<Root3, 2>, 2>;
using ComplexMat2 = std::array<std::array<ExComplex, 2>, 2>;
using RealMat4 = std::array<std::array<Root3, 4>, 4>;

struct GroupOperation {
  int index = 0;  // 1..6
  std::string name;
  RealMat2 real_matrix;       // action on (x, y)^T
  ComplexMat2 complex_matrix; // action on (|e_+>, |e_->)^T

  Eigen::Matrix2d real() const {
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = real_matrix[i][j].value();
    return m;
  }
  Eigen::Matrix2cd complex() const {
    Eigen::Matrix2cd m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = complex_matrix[i][j].value();
    return m;
  }
};

namespace detail {

inline RealMat2 rmat2(Root3 a, Root3 b, Root3 c, Root3 d) {
  return {{{a, b}, {c, d}}};
}

inline RealMat2 mul(const RealMat2& x, const RealMat2& y) {
  RealMat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return r;
}

inline ComplexMat2 mul(const ComplexMat2& x, const ComplexMat2& y) {
  ComplexMat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return r;
}

// Basis-change matrix scaled by sqrt(2): sqrt(2)*V has entries in {-1,+1,-i}.
// Conjugating with V always pairs one factor of V against one of V^dagger,
// so the 1/2 can be pulled out and the arithmetic stays in Q(sqrt3, i).
inline const std::array<std::array<ExComplex, 2>, 2>& v_times_sqrt2() {
  static const std::array<std::array<ExComplex, 2>, 2> v = {{
      {ExComplex(-1), -ExComplex::i_unit()},
      {ExComplex(1), -ExComplex::i_unit()},
  }};
  return v;
}

// V M V^-1 for a real-entried M, done exactly.
inline ComplexMat2 conjugate_by_v(const RealMat2& m) {
  const auto& s = v_times_sqrt2();
  ComplexMat2 r{};
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      ExComplex acc(0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          acc = acc + s[k][i] * ExComplex(m[i][j]) * s[l][j].conj();
      acc = acc * ExComplex(Root3(Rational(1, 2)));
      r[k][l] = acc;
    }
  return r;
}

}  // namespace detail

inline const std::array<GroupOperation, 6>& group_elements() {
  static const std::array<GroupOperation, 6> ops = [] {
    using detail::rmat2;
    const Root3 h = half();
    const Root3 hs = half_sqrt3();
    std::array<GroupOperation, 6> g;
    const std::array<std::string, 6> names = {"E", "C3+", "C3-", "sv1", "sv2", "sv3"};
    const std::array<RealMat2, 6> mats = {
        rmat2(Root3(1), Root3(0), Root3(0), Root3(1)),
        rmat2(-h, hs, -hs, -h),
        rmat2(-h, -hs, hs, -h),
        rmat2(Root3(1), Root3(0), Root3(0), Root3(-1)),
        rmat2(-h, -hs, -hs, h),
        rmat2(-h, hs, hs, h),
    };
    for (int n = 0; n < 6; ++n) {
      g[n].index = n + 1;
      g[n].name = names[n];
      g[n].real_matrix = mats[n];
      g[n].complex_matrix = detail::conjugate_by_v(mats[n]);
    }
    return g;
  }();
  return ops;
}

// chi(E rep) = (2,-1,-1,0,0,0); A2 flips sign on the mirrors.
inline int character(Irrep g, int element_index) {
  if (element_index < 1 || element_index > 6) throw std::out_of_range("element index");
  const bool mirror = element_index >= 4;
  switch (g) {
    case Irrep::A1: return 1;
    case Irrep::A2: return mirror ? -1 : 1;
    case Irrep::E:
      if (element_index == 1) return 2;
      return mirror ? 0 : -1;
  }
  return 0;
}

// det(M_n); +1 for rotations, -1 for mirrors. Equals chi_A2.
inline int parity(int element_index) { return character(Irrep::A2, element_index); }

// Index of the product g_a * g_b (composition of the real matrices).
inline int multiply_elements(int a, int b) {
  const auto& ops = group_elements();
  const RealMat2 p = detail::mul(ops[a - 1].real_matrix, ops[b - 1].real_matrix);
  for (const auto& g : ops) {
    bool same = true;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) same = same && g.real_matrix[i][j] == p[i][j];
    if (same) return g.index;
  }
  throw std::logic_error("group not closed");  // unreachable for a correct table
}

inline std::array<std::array<int, 6>, 6> multiplication_table() {
  std::array<std::array<int, 6>, 6> t{};
  for (int a = 1; a <= 6; ++a)
    for (int b = 1; b <= 6; ++b) t[a - 1][b - 1] = multiply_elements(a, b);
  return t;
}

// Spin pair (Sx, Sy) transforms with U M_n U^-1, U = [[0,1],[-1,0]].
// For M = [[a,b],[c,d]] this is [[d,-c],[-b,a]].
inline RealMat2 spin_pair_matrix(int element_index) {
  const RealMat2& m = group_elements()[element_index - 1].real_matrix;
  return detail::rmat2(m[1][1], -m[1][0], -m[0][1], m[0][0]);
}

// O_n = (U M_n U^-1) (x) (U M_n U^-1) acting on {SxSx, SxSy, SySx, SySy}.
inline RealMat4 product_rep_matrix(int element_index) {
  const RealMat2 a = spin_pair_matrix(element_index);
  RealMat4 o{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) o[2 * i + k][2 * j + l] = a[i][j] * a[k][l];
  return o;
}

inline std::array<RealMat4, 6> product_rep_matrices() {
  std::array<RealMat4, 6> r;
  for (int n = 1; n <= 6; ++n) r[n - 1] = product_rep_matrix(n);
  return r;
}

// Generalized projection operator P^(G)_ij = (l_G/6) sum_n c_n(G,i,j) O_n,
// with c_n the character for A1/A2 and the (i,j) entry of M_n for E.
inline RealMat4 projector(Irrep g, int row_i, int row_j) {
  const int dim = irrep_dim(g);
  if (row_i < 1 || row_i > dim || row_j < 1 || row_j > dim)
    throw std::out_of_range("projector row index exceeds irrep dimension");
  RealMat4 p{};
  for (int n = 1; n <= 6; ++n) {
    Root3 c = g == Irrep::E
                  ? group_elements()[n - 1].real_matrix[row_i - 1][row_j - 1]
                  : Root3(character(g, n));
    const RealMat4 o = product_rep_matrix(n);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) p[i][j] = p[i][j] + c * o[i][j];
  }
  const Root3 scale(Rational(dim, 6));
  for (auto& row : p)
    for (auto& x : row) x = x * scale;
  return p;
}

inline std::array<Root3, 4> project(Irrep g, int row_i, int row_j,
                                    const std::array<Root3, 4>& coeffs) {
  const RealMat4 p = projector(g, row_i, row_j);
  std::array<Root3, 4> r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i] = r[i] + p[i][j] * coeffs[j];
  return r;
}

inline Eigen::Vector4d project(Irrep g, int row_i, int row_j, const Eigen::Vector4d& v) {
  const RealMat4 p = projector(g, row_i, row_j);
  Eigen::Vector4d r;
  for (int i = 0; i < 4; ++i) {
    double acc = 0;
    for (int j = 0; j < 4; ++j) acc += p[i][j].value() * v(j);
    r(i) = acc;
  }
  return r;
}

// Operator components transform with the conjugate of the ket map:
// if (|e+>,|e->)^T = V (|ex>,|ey>)^T then op' = conj(V) op conj(V)^dagger.
// This is what sends sigma_y -> diag(+1,-1) and -sigma_z -> sigma_- + sigma_+.
inline Eigen::Matrix2cd real_to_complex_basis(const Eigen::Matrix2cd& op) {
  const std::complex<double> i(0, 1);
  Eigen::Matrix2cd w;  // conj(V)
  w << -1.0, i, 1.0, i;
  w /= std::sqrt(2.0);
  return w * op * w.adjoint();
}

inline Eigen::Matrix2cd complex_to_real_basis(const Eigen::Matrix2cd& op) {
  const std::complex<double> i(0, 1);
  Eigen::Matrix2cd w;
  w << -1.0, i, 1.0, i;
  w /= std::sqrt(2.0);
  return w.adjoint() * op * w;
}

}  // namespace spinlab
