#pragma once

// Ingestion of ab initio 3x3 spin interaction tensors (D, A, P), rotation
// into the defect's [111] local frame, extraction of the symmetry-adapted
// scalar parameters, and the vibronic (Ham) reduction of the orbital-flipping
// components.

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spinlab {

enum class TensorKind { D, A, P };
enum class TensorFrame { CartesianDiamond, Local111 };

struct Occupancy {
  enum class Kind { XX, YY, Phi } kind = Kind::XX;
  double phi_deg = 0.0;  // only for Kind::Phi

  static Occupancy xx() { return {Kind::XX, 0.0}; }
  static Occupancy yy() { return {Kind::YY, 180.0}; }
  static Occupancy phi(double deg) { return {Kind::Phi, deg}; }

  std::string str() const {
    switch (kind) {
      case Kind::XX: return "xx";
      case Kind::YY: return "yy";
      case Kind::Phi: {
        std::ostringstream os;
        os << "phi(" << phi_deg << ")";
        return os.str();
      }
    }
    return "?";
  }
};

struct TensorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const char* tensor_kind_name(TensorKind k) {
  switch (k) {
    case TensorKind::D: return "D";
    case TensorKind::A: return "A";
    case TensorKind::P: return "P";
  }
  return "?";
}

inline TensorKind parse_tensor_kind(const std::string& s) {
  if (s == "D") return TensorKind::D;
  if (s == "A") return TensorKind::A;
  if (s == "P") return TensorKind::P;
  throw TensorError("unknown tensor kind '" + s + "'");
}

inline double unit_to_mhz(const std::string& unit) {
  if (unit == "MHz") return 1.0;
  if (unit == "GHz") return 1e3;
  if (unit == "kHz") return 1e-3;
  throw TensorError("unknown unit '" + unit + "' (expected kHz, MHz or GHz)");
}

inline TensorFrame parse_frame(const std::string& s) {
  if (s == "cartesian-diamond") return TensorFrame::CartesianDiamond;
  if (s == "local-111") return TensorFrame::Local111;
  throw TensorError("unknown frame '" + s + "'");
}

inline Occupancy parse_occupancy(const std::string& s) {
  if (s == "xx") return Occupancy::xx();
  if (s == "yy") return Occupancy::yy();
  if (s.rfind("phi(", 0) == 0 && s.back() == ')') {
    const std::string deg = s.substr(4, s.size() - 5);
    try {
      return Occupancy::phi(std::stod(deg));
    } catch (const std::exception&) {
      throw TensorError("bad occupancy angle '" + s + "'");
    }
  }
  throw TensorError("unknown occupancy '" + s + "'");
}

// Symmetric 3x3 interaction tensor in MHz, tagged with frame and orbital
// occupancy. Inputs are symmetrized on construction and the discarded
// antisymmetric part is kept as a diagnostic.
struct DefectTensor {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();  // MHz
  TensorFrame frame = TensorFrame::CartesianDiamond;
  Occupancy occupancy = Occupancy::xx();
  TensorKind kind = TensorKind::D;
  double asymmetry_mhz = 0.0;  // Frobenius norm of (T - T^t)/2 of the raw input
};

inline DefectTensor make_tensor(const Eigen::Matrix3d& raw, TensorKind kind, TensorFrame frame,
                                Occupancy occ, double asymmetry_tolerance_mhz = 1.0) {
  DefectTensor t;
  const Eigen::Matrix3d anti = 0.5 * (raw - raw.transpose());
  t.asymmetry_mhz = anti.norm();
  if (t.asymmetry_mhz > asymmetry_tolerance_mhz) {
    std::ostringstream os;
    os << "malformed tensor: asymmetry " << t.asymmetry_mhz << " MHz exceeds "
       << asymmetry_tolerance_mhz << " MHz";
    throw TensorError(os.str());
  }
  t.matrix = 0.5 * (raw + raw.transpose());
  t.kind = kind;
  t.frame = frame;
  t.occupancy = occ;
  if (kind != TensorKind::A) {
    // D and P are traceless up to ab initio noise
    const double tr = t.matrix.trace();
    if (std::abs(tr) > 3.0) {
      std::ostringstream os;
      os << tensor_kind_name(kind) << " tensor trace " << tr << " MHz exceeds the 3 MHz noise budget";
      throw TensorError(os.str());
    }
  }
  return t;
}

// File format: one header line "kind unit frame occupancy", then 9 reals
// (row-major, whitespace separated).
inline DefectTensor load_tensor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TensorError("cannot open tensor file '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw TensorError("empty tensor file '" + path + "'");
  std::istringstream hs(header);
  std::string kind_s, unit_s, frame_s, occ_s;
  if (!(hs >> kind_s >> unit_s >> frame_s >> occ_s))
    throw TensorError("malformed tensor header in '" + path + "' (want: kind unit frame occupancy)");
  const TensorKind kind = parse_tensor_kind(kind_s);
  const double scale = unit_to_mhz(unit_s);
  const TensorFrame frame = parse_frame(frame_s);
  const Occupancy occ = parse_occupancy(occ_s);

  std::array<double, 9> vals{};
  for (int k = 0; k < 9; ++k) {
    if (!(in >> vals[k])) throw TensorError("malformed tensor in '" + path + "': expected 9 numbers");
  }
  double extra;
  if (in >> extra) throw TensorError("malformed tensor in '" + path + "': more than 9 numbers");
  Eigen::Matrix3d raw;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) raw(i, j) = vals[3 * i + j] * scale;
  return make_tensor(raw, kind, frame, occ);
}

inline void save_tensor(const DefectTensor& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TensorError("cannot write tensor file '" + path + "'");
  out << tensor_kind_name(t.kind) << " MHz "
      << (t.frame == TensorFrame::CartesianDiamond ? "cartesian-diamond" : "local-111") << ' '
      << t.occupancy.str() << '\n';
  out.precision(12);
  for (int i = 0; i < 3; ++i)
    out << t.matrix(i, 0) << ' ' << t.matrix(i, 1) << ' ' << t.matrix(i, 2) << '\n';
}

// Local frame of a [111]-oriented trigonal defect; columns of R are the
// local axes expressed in the cubic crystal frame.
struct LocalFrame {
  Eigen::Vector3d v_x = Eigen::Vector3d(-1, -1, 2).normalized();
  Eigen::Vector3d v_y = Eigen::Vector3d(1, -1, 0).normalized();
  Eigen::Vector3d v_z = Eigen::Vector3d(1, 1, 1).normalized();

  Eigen::Matrix3d rotation() const {
    Eigen::Matrix3d r;
    r.col(0) = v_x;
    r.col(1) = v_y;
    r.col(2) = v_z;
    return r;
  }

  void validate() const {
    const Eigen::Matrix3d r = rotation();
    if ((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() > 1e-9)
      throw TensorError("local frame is not orthonormal");
    if (r.determinant() < 0) throw TensorError("local frame is left-handed");
  }
};

inline DefectTensor rotate_to_local(const DefectTensor& t, const LocalFrame& f = {}) {
  if (t.frame == TensorFrame::Local111)
    throw TensorError("tensor is already in the local-111 frame");
  f.validate();
  const Eigen::Matrix3d r = f.rotation();
  DefectTensor out = t;
  out.matrix = r.transpose() * t.matrix * r;
  out.frame = TensorFrame::Local111;
  return out;
}

// Scalar parameters extracted from a local-frame tensor. For D and P the
// axial part is gamma; for A it splits into (a_par, a_perp). gamma1/gamma2
// are the orbital-flipping components.
struct ExtractedParams {
  TensorKind kind = TensorKind::D;
  double gamma_mhz = 0.0;     // D- or P-like axial scalar (absent for A)
  double a_par_mhz = 0.0;     // A only
  double a_perp_mhz = 0.0;    // A only
  double gamma1_mhz = 0.0;
  double gamma2_mhz = 0.0;
  bool ham_reduced = false;
};

// Occupancy-resolved extraction. With |e_phi> = cos(phi/2)|e_x> - sin(phi/2)|e_y>
// the orbital-flipping parts of the tensor go as
//   T_xz = g1 cos(phi),  T_yz = g1 sin(phi),
//   (T_yy - T_xx)/2 = g2 cos(phi),  T_xy = g2 sin(phi),
// so xx (phi = 0) reads g1 = +T_xz, g2 = (T_yy - T_xx)/2 and yy (phi = 180)
// reads g1 = -T_xz, g2 = (T_xx - T_yy)/2, each with a definite sign.
inline ExtractedParams extract_axial(const DefectTensor& t) {
  if (t.frame != TensorFrame::Local111)
    throw TensorError("extract_axial needs a local-111 tensor; rotate first");
  if (t.occupancy.kind == Occupancy::Kind::Phi)
    throw TensorError("extract_axial needs xx or yy occupancy; use extract_invariant for phi");
  const Eigen::Matrix3d& m = t.matrix;
  ExtractedParams p;
  p.kind = t.kind;
  const double axial = m(2, 2) - 0.5 * (m(0, 0) + m(1, 1));
  if (t.kind == TensorKind::A) {
    p.a_par_mhz = m(2, 2);
    p.a_perp_mhz = 0.5 * (m(0, 0) + m(1, 1));
  } else {
    p.gamma_mhz = axial;
  }
  if (t.occupancy.kind == Occupancy::Kind::XX) {
    p.gamma1_mhz = m(0, 2);
    p.gamma2_mhz = 0.5 * (m(1, 1) - m(0, 0));
  } else {
    p.gamma1_mhz = -m(0, 2);
    p.gamma2_mhz = 0.5 * (m(0, 0) - m(1, 1));
  }
  return p;
}

// The axial combination T_zz - (T_xx + T_yy)/2 is occupancy-independent.
inline double extract_axial_scalar(const DefectTensor& t) {
  if (t.frame != TensorFrame::Local111)
    throw TensorError("axial extraction needs a local-111 tensor; rotate first");
  const Eigen::Matrix3d& m = t.matrix;
  return m(2, 2) - 0.5 * (m(0, 0) + m(1, 1));
}

// Occupancy-agnostic magnitudes; valid for any pseudorotation angle, but the
// square roots make the signs of gamma1/gamma2 undetermined.
inline std::pair<double, double> extract_invariant(const DefectTensor& t) {
  if (t.frame != TensorFrame::Local111)
    throw TensorError("extract_invariant needs a local-111 tensor; rotate first");
  const Eigen::Matrix3d& m = t.matrix;
  const double g1 = std::hypot(m(0, 2), m(1, 2));
  const double g2 = std::hypot(m(0, 1), 0.5 * (m(0, 0) - m(1, 1)));
  return {g1, g2};
}

// E (x) e vibronic reduction factors. p reduces A2-type orbital operators
// (the spin-orbit lambda), q = (1+p)/2 reduces the E-type gamma1/gamma2.
struct HamReduction {
  double p = 1.0;

  HamReduction() = default;
  explicit HamReduction(double p_) : p(p_) {
    if (!(p >= 0.0 && p <= 1.0)) throw TensorError("Ham factor p must be in [0, 1]");
  }
  double q() const { return 0.5 * (1.0 + p); }
};

inline ExtractedParams ham_reduce(const ExtractedParams& raw, const HamReduction& red) {
  if (raw.ham_reduced) throw TensorError("parameters are already Ham-reduced");
  ExtractedParams out = raw;
  out.gamma1_mhz *= red.q();
  out.gamma2_mhz *= red.q();
  out.ham_reduced = true;
  return out;
}

inline double ham_reduce_lambda(double lambda, const HamReduction& red) { return red.p * lambda; }

}  // namespace spinlab
