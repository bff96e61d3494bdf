#include "scg/coeff.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace scg {

namespace {

// Pull square factors out of rad into front; rad stays square-free.
void reduce_radicand(Rational& front, long long& rad) {
  if (rad <= 1) return;
  for (long long p = 2; p * p <= rad; ++p) {
    while (rad % (p * p) == 0) {
      rad /= p * p;
      front = front * Rational(p);
    }
  }
}

}  // namespace

Coeff Coeff::exact(const Rational& r, const Rational& radicand, int pip) {
  if (radicand.sign() < 0) throw std::domain_error("negative radicand");
  Coeff c;
  c.exact_ = true;
  c.r_ = r;
  c.pip_ = pip;
  // sqrt(p/q) = sqrt(p*q)/q
  long long rad = radicand.num() * radicand.den();
  c.r_ = c.r_ * Rational(1, radicand.den());
  reduce_radicand(c.r_, rad);
  c.rad_ = rad <= 0 ? 1 : rad;
  if (c.r_.is_zero()) { c.rad_ = 1; c.pip_ = 0; }
  if (radicand.is_zero()) { c.r_ = Rational(0); c.rad_ = 1; c.pip_ = 0; }
  c.sync();
  return c;
}

Coeff Coeff::decimal(const std::string& text) {
  // plain fixed-point decimal, e.g. ".04561", "-0.2026", "3"
  std::string t = text;
  bool neg = false;
  size_t i = 0;
  if (i < t.size() && (t[i] == '+' || t[i] == '-')) { neg = t[i] == '-'; ++i; }
  long long num = 0;
  long long den = 1;
  bool frac = false, any = false;
  for (; i < t.size(); ++i) {
    if (t[i] == '.') {
      if (frac) throw std::invalid_argument("bad decimal: " + text);
      frac = true;
      continue;
    }
    if (t[i] < '0' || t[i] > '9') throw std::invalid_argument("bad decimal: " + text);
    any = true;
    if (num > 400000000000000000LL || den > 400000000000000000LL)
      return numeric(std::strtod(text.c_str(), nullptr));  // too long for exact form
    num = num * 10 + (t[i] - '0');
    if (frac) den *= 10;
  }
  if (!any) throw std::invalid_argument("bad decimal: " + text);
  Coeff c;
  c.r_ = Rational(neg ? -num : num, den);
  c.decimal_text_ = text;
  c.sync();
  return c;
}

Coeff Coeff::numeric(double v) {
  Coeff c;
  c.exact_ = false;
  c.approx_ = v;
  return c;
}

void Coeff::sync() {
  if (!exact_) return;
  approx_ = r_.value() * std::sqrt(static_cast<double>(rad_)) *
            std::pow(std::numbers::pi, pip_);
}

bool Coeff::is_zero() const {
  return exact_ ? r_.is_zero() : approx_ == 0.0;
}

Coeff Coeff::operator*(const Coeff& o) const {
  if (!exact_ || !o.exact_) return numeric(value() * o.value());
  Coeff c;
  c.r_ = r_ * o.r_;
  long long rad = rad_ * o.rad_;
  reduce_radicand(c.r_, rad);
  c.rad_ = c.r_.is_zero() ? 1 : rad;
  c.pip_ = c.r_.is_zero() ? 0 : pip_ + o.pip_;
  c.sync();
  return c;
}

Coeff Coeff::operator+(const Coeff& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (exact_ && o.exact_ && rad_ == o.rad_ && pip_ == o.pip_) {
    Coeff c;
    c.r_ = r_ + o.r_;
    c.rad_ = c.r_.is_zero() ? 1 : rad_;
    c.pip_ = c.r_.is_zero() ? 0 : pip_;
    c.sync();
    return c;
  }
  return numeric(value() + o.value());
}

Coeff Coeff::operator-() const {
  if (!exact_) return numeric(-approx_);
  Coeff c = *this;
  c.r_ = -c.r_;
  c.decimal_text_.clear();
  c.sync();
  return c;
}

bool Coeff::same_value(const Coeff& o) const {
  if (exact_ && o.exact_)
    return r_ == o.r_ && rad_ == o.rad_ && pip_ == o.pip_;
  return value() == o.value();
}

std::string Coeff::str() const {
  if (!exact_) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", approx_);
    return buf;
  }
  if (!decimal_text_.empty() && rad_ == 1 && pip_ == 0) return decimal_text_;
  std::string s = r_.str();
  if (rad_ != 1) s += " * sqrt(" + std::to_string(rad_) + ")";
  if (pip_ != 0) s += " * pi^" + std::to_string(pip_);
  return s;
}

}  // namespace scg
