#pragma once

// Ordered-monomial symbolic algebra over {Sx,Sy,Sz} (or Ix,Iy,Iz) and the
// orbital sigma operators, with coefficients in Q(sqrt 3). Used to state the
// symmetrized operator bases and to verify, exactly, how they transform under
// the six group operations. Operator products are kept ordered (SxSy and SySx
// are distinct monomials); substitution only ever replaces single factors by
// linear combinations, so no commutation rules are needed.

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "spinlab/exact.hpp"
#include "spinlab/group.hpp"

namespace spinlab {

enum class OpSymbol : std::uint8_t { Sx, Sy, Sz, Sigma0, SigmaX, SigmaY, SigmaZ };

inline const char* symbol_name(OpSymbol s) {
  switch (s) {
    case OpSymbol::Sx: return "Sx";
    case OpSymbol::Sy: return "Sy";
    case OpSymbol::Sz: return "Sz";
    case OpSymbol::Sigma0: return "sigma0";
    case OpSymbol::SigmaX: return "sigmax";
    case OpSymbol::SigmaY: return "sigmay";
    case OpSymbol::SigmaZ: return "sigmaz";
  }
  return "?";
}

using Monomial = std::vector<OpSymbol>;

struct OperatorExpr {
  // canonical: sorted by monomial, no zero coefficients
  std::vector<std::pair<Monomial, Root3>> terms;

  static OperatorExpr monomial(Monomial m, Root3 c = Root3(1)) {
    OperatorExpr e;
    if (!c.is_zero()) e.terms.emplace_back(std::move(m), c);
    return e;
  }

  void canonicalize() {
    std::map<Monomial, Root3> acc;
    for (auto& [m, c] : terms) {
      auto it = acc.find(m);
      if (it == acc.end())
        acc.emplace(m, c);
      else
        it->second = it->second + c;
    }
    terms.clear();
    for (auto& [m, c] : acc)
      if (!c.is_zero()) terms.emplace_back(m, c);
  }

  friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) {
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    a.canonicalize();
    return a;
  }
  friend OperatorExpr operator-(OperatorExpr a, const OperatorExpr& b) {
    for (auto& [m, c] : b.terms) a.terms.emplace_back(m, -c);
    a.canonicalize();
    return a;
  }
  friend OperatorExpr operator*(Root3 s, OperatorExpr e) {
    for (auto& [m, c] : e.terms) c = c * s;
    e.canonicalize();
    return e;
  }
  friend bool operator==(const OperatorExpr& a, const OperatorExpr& b) {
    return a.terms == b.terms;
  }

  std::string str() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms) {
      const double v = c.value();
      if (!first) os << (v >= 0 ? " + " : " - ");
      if (first && v < 0) os << "-";
      first = false;
      const double av = std::abs(v);
      if (m.empty() || std::abs(av - 1.0) > 1e-15) os << av << "*";
      if (m.empty())
        os << "1";
      else
        for (size_t k = 0; k < m.size(); ++k) os << (k ? " " : "") << symbol_name(m[k]);
    }
    return os.str();
  }
};

namespace detail {

// Image of a single symbol under group element n, as a linear combination.
// (Sx,Sy) transforms with U*M_n*U^-1; Sz picks up det(M_n) (A2-like);
// (-sigmaz, sigmax) transforms like (x,y); sigmay is A2-like; sigma0 A1.
inline std::vector<std::pair<OpSymbol, Root3>> substitute(OpSymbol s, int n) {
  const RealMat2 a = spin_pair_matrix(n);
  const RealMat2& m = group_elements()[n - 1].real_matrix;
  const Root3 det(parity(n));
  switch (s) {
    case OpSymbol::Sx: return {{OpSymbol::Sx, a[0][0]}, {OpSymbol::Sy, a[0][1]}};
    case OpSymbol::Sy: return {{OpSymbol::Sx, a[1][0]}, {OpSymbol::Sy, a[1][1]}};
    case OpSymbol::Sz: return {{OpSymbol::Sz, det}};
    case OpSymbol::Sigma0: return {{OpSymbol::Sigma0, Root3(1)}};
    case OpSymbol::SigmaY: return {{OpSymbol::SigmaY, det}};
    // (-sz)' = m00*(-sz) + m01*(+sx)  =>  sz' = m00*sz - m01*sx
    case OpSymbol::SigmaZ:
      return {{OpSymbol::SigmaZ, m[0][0]}, {OpSymbol::SigmaX, -m[0][1]}};
    // sx' = m10*(-sz) + m11*sx
    case OpSymbol::SigmaX:
      return {{OpSymbol::SigmaZ, -m[1][0]}, {OpSymbol::SigmaX, m[1][1]}};
  }
  return {};
}

}  // namespace detail

// Apply group element n to every factor of every monomial and expand.
inline OperatorExpr transform(const OperatorExpr& e, int element_index) {
  OperatorExpr out;
  for (const auto& [mono, coeff] : e.terms) {
    std::vector<std::pair<Monomial, Root3>> partial = {{Monomial{}, coeff}};
    for (OpSymbol s : mono) {
      const auto image = detail::substitute(s, element_index);
      std::vector<std::pair<Monomial, Root3>> next;
      next.reserve(partial.size() * image.size());
      for (const auto& [pm, pc] : partial)
        for (const auto& [is, ic] : image) {
          Monomial m2 = pm;
          m2.push_back(is);
          next.emplace_back(std::move(m2), pc * ic);
        }
      partial = std::move(next);
    }
    for (auto& [m, c] : partial) out.terms.emplace_back(std::move(m), c);
  }
  out.canonicalize();
  return out;
}

struct SymmetrizedBasis {
  Irrep irrep;
  int row;  // 1-based; 1 for A1/A2
  std::string family;  // "quadratic", "mixed", "orbital"
  OperatorExpr expr;
};

// The symmetrized operator catalog: quadratic combinations of {Sx,Sy},
// the {Sx,Sy}(x)Sz products, and the orbital sigma rows.
inline std::vector<SymmetrizedBasis> symmetrized_spin_bases() {
  using E = OperatorExpr;
  const Root3 h = half();
  auto m = [](std::initializer_list<OpSymbol> syms, Root3 c) {
    return E::monomial(Monomial(syms), c);
  };
  std::vector<SymmetrizedBasis> out;
  out.push_back({Irrep::A1, 1, "quadratic",
                 m({OpSymbol::Sx, OpSymbol::Sx}, h) + m({OpSymbol::Sy, OpSymbol::Sy}, h)});
  out.push_back({Irrep::A2, 1, "quadratic",
                 m({OpSymbol::Sx, OpSymbol::Sy}, h) - m({OpSymbol::Sy, OpSymbol::Sx}, h)});
  out.push_back({Irrep::E, 1, "quadratic",
                 m({OpSymbol::Sy, OpSymbol::Sy}, h) - m({OpSymbol::Sx, OpSymbol::Sx}, h)});
  out.push_back({Irrep::E, 2, "quadratic",
                 m({OpSymbol::Sx, OpSymbol::Sy}, h) + m({OpSymbol::Sy, OpSymbol::Sx}, h)});
  out.push_back({Irrep::E, 1, "mixed",
                 m({OpSymbol::Sx, OpSymbol::Sz}, Root3(1)) + m({OpSymbol::Sz, OpSymbol::Sx}, Root3(1))});
  out.push_back({Irrep::E, 2, "mixed",
                 m({OpSymbol::Sy, OpSymbol::Sz}, Root3(1)) + m({OpSymbol::Sz, OpSymbol::Sy}, Root3(1))});
  out.push_back({Irrep::A1, 1, "orbital", m({OpSymbol::Sigma0}, Root3(1))});
  out.push_back({Irrep::A2, 1, "orbital", m({OpSymbol::SigmaY}, Root3(1))});
  out.push_back({Irrep::E, 1, "orbital", m({OpSymbol::SigmaZ}, Root3(-1))});
  out.push_back({Irrep::E, 2, "orbital", m({OpSymbol::SigmaX}, Root3(1))});
  return out;
}

// Exact check that a (row1,row2) pair of expressions transforms by M_n for
// every group element; A1/A2 rows must transform by their character.
inline bool transforms_as_e_pair(const OperatorExpr& ex, const OperatorExpr& ey) {
  for (int n = 1; n <= 6; ++n) {
    const RealMat2& m = group_elements()[n - 1].real_matrix;
    if (!(transform(ex, n) == m[0][0] * ex + m[0][1] * ey)) return false;
    if (!(transform(ey, n) == m[1][0] * ex + m[1][1] * ey)) return false;
  }
  return true;
}

inline bool transforms_as_1d(const OperatorExpr& e, Irrep g) {
  for (int n = 1; n <= 6; ++n)
    if (!(transform(e, n) == Root3(character(g, n)) * e)) return false;
  return true;
}

}  // namespace spinlab
