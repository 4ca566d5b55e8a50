#include "octacomp/numeric.hpp"

#include "octacomp/error.hpp"

#include <algorithm>
#include <cctype>

namespace octacomp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::AsymmetricMatrix: return "AsymmetricMatrix";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorKind::TriangleViolation: return "TriangleViolation";
    case ErrorKind::ZeroDistanceDistinctPoints: return "ZeroDistanceDistinctPoints";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::InvalidTree: return "InvalidTree";
    case ErrorKind::PointNotInTree: return "PointNotInTree";
    case ErrorKind::NotAdditive: return "NotAdditive";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::DisconnectedDiagonals: return "DisconnectedDiagonals";
    case ErrorKind::BadSize: return "BadSize";
    case ErrorKind::LabelingNotBijective: return "LabelingNotBijective";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotTripod: return "NotTripod";
    case ErrorKind::MoveNotMonotone: return "MoveNotMonotone";
    case ErrorKind::ContainmentRuleUnsatisfied: return "ContainmentRuleUnsatisfied";
    case ErrorKind::VerificationFailedAllOrientations: return "VerificationFailedAllOrientations";
    case ErrorKind::InternalExhaustion: return "InternalExhaustion";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::WrongPointCount: return "WrongPointCount";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

Rational parse_decimal(std::string_view text) {
  // [sign] digits [. digits] [e|E [sign] digits]
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long exponent = 0;
  bool any_digit = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    digits += text[pos++];
    any_digit = true;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      digits += text[pos++];
      --exponent;
      any_digit = true;
    }
  }
  if (!any_digit) {
    throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");
  }
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    std::string exp_text(text.substr(pos));
    if (exp_text.empty()) {
      throw Error(ErrorKind::ParseError, "bad exponent in '" + std::string(text) + "'");
    }
    std::size_t used = 0;
    try {
      exponent += std::stol(exp_text, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad exponent in '" + std::string(text) + "'");
    }
    if (used != exp_text.size()) {
      throw Error(ErrorKind::ParseError, "trailing characters in '" + std::string(text) + "'");
    }
    pos = text.size();
  }
  if (pos != text.size()) {
    throw Error(ErrorKind::ParseError, "trailing characters in '" + std::string(text) + "'");
  }
  if (std::labs(exponent) > 4096) {
    throw Error(ErrorKind::ParseError, "exponent out of range in '" + std::string(text) + "'");
  }
  mpz_class numerator(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational value = exponent >= 0 ? Rational(numerator * scale) : Rational(numerator, scale);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

mpz_class parse_integer(std::string_view text, std::string_view whole) {
  std::string s(text);
  std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (start == s.size() ||
      !std::all_of(s.begin() + static_cast<long>(start), s.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    throw Error(ErrorKind::ParseError, "not a rational: '" + std::string(whole) + "'");
  }
  if (s[0] == '+') s.erase(0, 1);
  return mpz_class(s, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  mpz_class num = parse_integer(text.substr(0, slash), text);
  mpz_class den = parse_integer(text.substr(slash + 1), text);
  if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
  Rational value(num, den);
  value.canonicalize();
  return value;
}

std::string to_string(const Rational& value) { return value.get_str(10); }

QuadraticSurd::QuadraticSurd(Rational r, Rational s, Rational k)
    : r_(std::move(r)), s_(std::move(s)), k_(std::move(k)) {
  if (sgn(k_) < 0) throw Error(ErrorKind::ParseError, "negative radicand");
  normalize();
}

void QuadraticSurd::normalize() {
  if (sgn(s_) == 0 || sgn(k_) == 0) {
    s_ = 0;
    k_ = 0;
    return;
  }
  QuadraticSurd root = exact_sqrt(k_);
  if (root.is_rational()) {
    r_ += s_ * root.r_;
    s_ = 0;
    k_ = 0;
  } else if (root.k_ != k_) {
    s_ *= root.s_;
    k_ = root.k_;
  }
}

int QuadraticSurd::sign() const {
  int a = sgn(r_);
  int b = sgn(s_);
  if (b == 0) return a;
  if (a == 0 || a == b) return b;
  // Opposite signs: compare r^2 with s^2 k.
  Rational lhs = r_ * r_;
  Rational rhs = s_ * s_ * k_;
  int c = cmp(lhs, rhs);
  if (c == 0) return 0;
  return c > 0 ? a : b;
}

double QuadraticSurd::to_double() const {
  return r_.get_d() + s_.get_d() * std::sqrt(k_.get_d());
}

QuadraticSurd QuadraticSurd::operator-() const {
  QuadraticSurd out;
  out.r_ = -r_;
  out.s_ = -s_;
  out.k_ = k_;
  return out;
}

namespace {

const Rational& common_radicand(const QuadraticSurd& a, const QuadraticSurd& b) {
  if (a.is_rational()) return b.radicand();
  if (b.is_rational() || a.radicand() == b.radicand()) return a.radicand();
  throw Error(ErrorKind::DimensionMismatch, "surds with different radicands cannot be combined");
}

}  // namespace

QuadraticSurd operator+(const QuadraticSurd& a, const QuadraticSurd& b) {
  const Rational& k = common_radicand(a, b);
  return QuadraticSurd(Rational(a.r_ + b.r_), Rational(a.s_ + b.s_), k);
}

QuadraticSurd operator-(const QuadraticSurd& a, const QuadraticSurd& b) { return a + (-b); }

QuadraticSurd operator*(const QuadraticSurd& a, const QuadraticSurd& b) {
  const Rational& k = common_radicand(a, b);
  Rational r = a.r_ * b.r_ + a.s_ * b.s_ * k;
  Rational s = a.r_ * b.s_ + a.s_ * b.r_;
  return QuadraticSurd(std::move(r), std::move(s), k);
}

bool operator==(const QuadraticSurd& a, const QuadraticSurd& b) {
  return a.r_ == b.r_ && a.s_ == b.s_ && (a.is_rational() || a.k_ == b.k_);
}

QuadraticSurd exact_sqrt(const Rational& value) {
  if (sgn(value) < 0) throw Error(ErrorKind::ParameterOutOfRange, "square root of a negative number");
  if (sgn(value) == 0) return QuadraticSurd();
  // sqrt(p/q) = sqrt(p*q)/q; pull square factors out of p*q.
  mpz_class m = value.get_num() * value.get_den();
  mpz_class outside = 1;
  if (mpz_perfect_square_p(m.get_mpz_t())) {
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), m.get_mpz_t());
    Rational r(root, value.get_den());
    r.canonicalize();
    return QuadraticSurd(r);
  }
  for (unsigned long p = 2; p < 2000 && p * p <= m; ++p) {
    const unsigned long sq = p * p;
    while (mpz_divisible_ui_p(m.get_mpz_t(), sq)) {
      m /= sq;
      outside *= p;
    }
  }
  if (mpz_perfect_square_p(m.get_mpz_t())) {
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), m.get_mpz_t());
    Rational r(outside * root, value.get_den());
    r.canonicalize();
    return QuadraticSurd(r);
  }
  Rational coefficient(outside, value.get_den());
  coefficient.canonicalize();
  QuadraticSurd out;
  out.s_ = coefficient;
  out.k_ = Rational(m);
  return out;
}

}  // namespace octacomp
