#pragma once

#include <optional>
#include <string>

#include "scg/rational.hpp"

namespace scg {

// Term coefficient: rational * sqrt(rad) * pi^pip, kept exact whenever the
// arithmetic stays in that class.  Decimal literals from the model files are
// stored as exact rationals but remember their printed text so the printer
// reproduces them.  Arithmetic that leaves the class (incompatible radicands
// or pi powers under addition) degrades to a plain double, printed with full
// precision so parse(print(x)) is still the identity.
class Coeff {
 public:
  Coeff() = default;
  Coeff(long long n) : r_(n) { sync(); }
  Coeff(const Rational& r) : r_(r) { sync(); }

  static Coeff rational(const Rational& r) { return Coeff(r); }
  // rational * sqrt(sp/sq) * pi^pip
  static Coeff exact(const Rational& r, const Rational& radicand, int pip);
  static Coeff sqrt_of(const Rational& radicand) { return exact(1, radicand, 0); }
  static Coeff pi_pow(int p) { return exact(1, 1, p); }
  static Coeff decimal(const std::string& text);
  static Coeff numeric(double v);

  double value() const { return approx_; }
  bool is_exact() const { return exact_; }
  bool is_zero() const;
  const Rational& rat() const { return r_; }
  long long radicand() const { return rad_; }
  int pi_power() const { return pip_; }
  const std::string& decimal_text() const { return decimal_text_; }

  Coeff operator*(const Coeff& o) const;
  Coeff operator+(const Coeff& o) const;
  Coeff operator-() const;
  Coeff times_rational(const Rational& r) const { return *this * Coeff(r); }

  // Structural equality on exact forms, bit equality on numeric fallbacks.
  bool same_value(const Coeff& o) const;

  std::string str() const;  // canonical printed form for the model grammar

 private:
  void sync();

  bool exact_ = true;
  Rational r_ = Rational(0);
  long long rad_ = 1;  // square-free integer radicand, >= 1
  int pip_ = 0;
  double approx_ = 0.0;
  std::string decimal_text_;  // nonempty when parsed from a decimal literal
};

}  // namespace scg
