#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

namespace octacomp {

using Rational = mpq_class;

/// The two arithmetic modes: exact rationals and doubles.
template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

/// Default tolerance for float mode. An inequality a <= b holds within tol
/// iff a <= b + tol.
inline constexpr double kDefaultTol = 1e-9;

template <Scalar T>
struct Arith;

template <>
struct Arith<Rational> {
  static constexpr bool exact = true;
  static bool eq(const Rational& a, const Rational& b) { return a == b; }
  static bool le(const Rational& a, const Rational& b) { return a <= b; }
  static bool lt(const Rational& a, const Rational& b) { return a < b; }
  static bool is_zero(const Rational& a) { return sgn(a) == 0; }
  static double to_double(const Rational& a) { return a.get_d(); }
  static Rational from_double(double d) { return Rational(d); }
  static Rational abs(const Rational& a) { return ::abs(a); }
  static Rational half(const Rational& a) { return Rational(a / 2); }
};

template <>
struct Arith<double> {
  static constexpr bool exact = false;
  // Geometric coincidence threshold used inside tree computations.
  static constexpr double eps = 1e-10;
  static double scale(double a, double b) {
    return std::max({1.0, std::abs(a), std::abs(b)});
  }
  static bool eq(double a, double b) { return std::abs(a - b) <= eps * scale(a, b); }
  static bool le(double a, double b) { return a <= b + eps * scale(a, b); }
  static bool lt(double a, double b) { return a < b - eps * scale(a, b); }
  static bool is_zero(double a) { return std::abs(a) <= eps; }
  static double to_double(double a) { return a; }
  static double from_double(double d) { return d; }
  static double abs(double a) { return std::abs(a); }
  static double half(double a) { return a / 2; }
};

/// Parses "p/q", "p", or a decimal literal ("1.25", "-3e-2") exactly.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& value);

/// A number r + s*sqrt(k) with rational r, s and rational k >= 0.
///
/// Only numbers sharing the same k (or having s == 0) can be combined; the
/// builder emits every coordinate of a single-tree model in one field.
class QuadraticSurd {
 public:
  QuadraticSurd() = default;
  QuadraticSurd(Rational r) : r_(std::move(r)) {}  // NOLINT: implicit by intent
  QuadraticSurd(Rational r, Rational s, Rational k);

  const Rational& rational_part() const { return r_; }
  const Rational& surd_coefficient() const { return s_; }
  const Rational& radicand() const { return k_; }
  bool is_rational() const { return sgn(s_) == 0; }

  /// Exact sign of r + s*sqrt(k).
  int sign() const;
  double to_double() const;

  QuadraticSurd operator-() const;
  friend QuadraticSurd operator+(const QuadraticSurd& a, const QuadraticSurd& b);
  friend QuadraticSurd operator-(const QuadraticSurd& a, const QuadraticSurd& b);
  friend QuadraticSurd operator*(const QuadraticSurd& a, const QuadraticSurd& b);
  friend bool operator==(const QuadraticSurd& a, const QuadraticSurd& b);
  friend QuadraticSurd exact_sqrt(const Rational& value);

 private:
  void normalize();

  Rational r_{0};
  Rational s_{0};
  Rational k_{0};
};

/// sqrt(value) as f*sqrt(k) with k a non-square integer, or a rational when
/// value is a perfect square. Requires value >= 0.
QuadraticSurd exact_sqrt(const Rational& value);

}  // namespace octacomp
