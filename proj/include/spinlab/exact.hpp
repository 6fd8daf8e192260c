#pragma once

// Exact scalar arithmetic for the C3v machinery. Every matrix entry that
// appears in the group tables lives in Q(sqrt 3) or its complexification
// (epsilon = -1/2 + i*sqrt(3)/2), so closure, idempotence and character
// checks can be done with no floating point at all.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace spinlab {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  friend Rational operator+(Rational a, Rational b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(Rational a, Rational b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(Rational a, Rational b) {
    return Rational(a.num * b.num, a.den * b.den);
  }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw std::domain_error("rational division by zero");
    return Rational(a.num * b.den, a.den * b.num);
  }
  Rational operator-() const { return Rational(-num, den); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  bool is_zero() const { return num == 0; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// a + b*sqrt(3), a,b rational. Closed under +,-,*,/ (field).
struct Root3 {
  Rational a;
  Rational b;

  Root3() = default;
  Root3(Rational a_) : a(a_), b(0) {}
  Root3(std::int64_t n) : a(n), b(0) {}
  Root3(Rational a_, Rational b_) : a(a_), b(b_) {}

  static Root3 sqrt3() { return Root3(Rational(0), Rational(1)); }

  friend Root3 operator+(const Root3& x, const Root3& y) { return {x.a + y.a, x.b + y.b}; }
  friend Root3 operator-(const Root3& x, const Root3& y) { return {x.a - y.a, x.b - y.b}; }
  friend Root3 operator*(const Root3& x, const Root3& y) {
    return {x.a * y.a + Rational(3) * (x.b * y.b), x.a * y.b + x.b * y.a};
  }
  Root3 operator-() const { return {-a, -b}; }
  Root3 inverse() const {
    // (a + b r3)^-1 = (a - b r3) / (a^2 - 3 b^2); denominator nonzero since
    // sqrt(3) is irrational.
    const Rational d = a * a - Rational(3) * (b * b);
    if (d.is_zero()) throw std::domain_error("Root3 inverse of zero");
    return {a / d, -b / d};
  }
  friend Root3 operator/(const Root3& x, const Root3& y) { return x * y.inverse(); }
  friend bool operator==(const Root3& x, const Root3& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator!=(const Root3& x, const Root3& y) { return !(x == y); }
  bool is_zero() const { return a.is_zero() && b.is_zero(); }
  double value() const { return a.value() + b.value() * std::sqrt(3.0); }
};

inline Root3 half() { return Root3(Rational(1, 2)); }
inline Root3 half_sqrt3() { return Root3(Rational(0), Rational(1, 2)); }

// Complex numbers over Q(sqrt 3); enough for the N_n tables and the
// multiplet coefficients (up to a global 1/sqrt(2) handled by callers).
struct ExComplex {
  Root3 re;
  Root3 im;

  ExComplex() = default;
  ExComplex(Root3 r) : re(r), im(Root3(0)) {}
  ExComplex(std::int64_t n) : re(Root3(n)), im(Root3(0)) {}
  ExComplex(Root3 r, Root3 i) : re(r), im(i) {}

  static ExComplex i_unit() { return {Root3(0), Root3(1)}; }
  // epsilon = exp(+2 pi i / 3)
  static ExComplex epsilon() { return {Root3(Rational(-1, 2)), half_sqrt3()}; }
  static ExComplex epsilon_bar() { return {Root3(Rational(-1, 2)), -half_sqrt3()}; }

  friend ExComplex operator+(const ExComplex& x, const ExComplex& y) {
    return {x.re + y.re, x.im + y.im};
  }
  friend ExComplex operator-(const ExComplex& x, const ExComplex& y) {
    return {x.re - y.re, x.im - y.im};
  }
  friend ExComplex operator*(const ExComplex& x, const ExComplex& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
  }
  ExComplex operator-() const { return {-re, -im}; }
  ExComplex conj() const { return {re, -im}; }
  friend bool operator==(const ExComplex& x, const ExComplex& y) {
    return x.re == y.re && x.im == y.im;
  }
  friend bool operator!=(const ExComplex& x, const ExComplex& y) { return !(x == y); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace spinlab
