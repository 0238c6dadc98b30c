#pragma once

#include <string>

#include "gtd/bigint.hpp"

namespace gtd {

// Exact rational, always normalized: den > 0, gcd(num, den) == 1.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(int64_t v) : num_(v), den_(1) {}
  Rational(BigInt n) : num_(std::move(n)), den_(1) {}
  Rational(BigInt n, BigInt d);
  Rational(int64_t n, int64_t d) : Rational(BigInt(n), BigInt(d)) {}

  // Accepts "p", "-p", "p/q".
  static Rational from_string(const std::string& s);
  std::string to_string() const;

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == BigInt(1); }
  int sign() const { return num_.sign(); }

  Rational operator-() const;
  Rational abs() const { return sign() < 0 ? -*this : *this; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
  Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
  Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
  Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

  static int cmp(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return cmp(a, b) != 0; }
  friend bool operator<(const Rational& a, const Rational& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a, b) >= 0; }

  Rational half() const { return *this / Rational(2); }

private:
  BigInt num_, den_;
  void normalize();
};

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

}  // namespace gtd
